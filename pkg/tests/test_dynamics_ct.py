import math

import numpy as np
import pytest

import signeddyn as sd
from signeddyn.dynamics_ct import equilibrium_residual, sample_l1_ball
from signeddyn.errors import NonFiniteState

TANH = sd.make_profile("tanh")


def all_negative_triangle():
    return sd.build_graph(3, [(0, 1, -1), (0, 2, -1), (1, 2, -1)])


@pytest.fixture(scope="module")
def window_graph():
    # unbalanced, simple lambda_1/lambda_2, wide two-equilibria window
    G = sd.random_signed_graph(10, 0.5, 0.3, seed=15)
    th = sd.thresholds(G)
    assert th.pi2 - th.pi1 > 0.5
    return G, th


def bisect_alpha(ratio):
    """Solve tanh(a)/a = ratio by bisection (scalar oracle)."""
    lo, hi = 1e-9, 20.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if math.tanh(mid) / mid > ratio:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_vector_field_zero_at_origin():
    G = all_negative_triangle()
    assert np.array_equal(sd.vector_field(G, TANH, 2.5, np.zeros(3)), np.zeros(3))


def test_vector_field_example5_equilibrium():
    G = all_negative_triangle()
    alpha = bisect_alpha(0.5)
    assert alpha == pytest.approx(1.91501, abs=1e-5)
    x = alpha * np.array([1.0, -1.0, 0.0])
    assert np.max(np.abs(sd.vector_field(G, TANH, 4.0, x))) <= 1e-9


def test_vector_field_is_odd():
    G = sd.random_signed_graph(7, 0.6, 0.4, seed=1)
    rng = np.random.default_rng(0)
    for _ in range(5):
        x = rng.standard_normal(7)
        f1 = sd.vector_field(G, TANH, 1.7, x)
        f2 = sd.vector_field(G, TANH, 1.7, -x)
        assert np.max(np.abs(f1 + f2)) <= 1e-13 * (1 + np.max(np.abs(f1)))


def test_jacobian_at_origin_pi_one_is_minus_delta_lnorm():
    G = sd.random_signed_graph(8, 0.5, 0.5, seed=2)
    ops = sd.derive_operators(G)
    J = sd.jacobian(G, TANH, 1.0, np.zeros(8))
    assert np.allclose(J, -np.diag(G.degrees) @ ops.normalized_laplacian, atol=1e-12)


def test_jacobian_matches_finite_differences():
    rng = np.random.default_rng(3)
    for seed in range(2):
        G = sd.random_signed_graph(9, 0.5, 0.4, seed=seed)
        for _ in range(10):
            x = rng.standard_normal(9)
            pi = float(rng.uniform(0.5, 3.0))
            J = sd.jacobian(G, TANH, pi, x)
            fd = np.empty_like(J)
            h = 1e-6
            for i in range(9):
                e = np.zeros(9)
                e[i] = h
                fd[:, i] = (
                    sd.vector_field(G, TANH, pi, x + e)
                    - sd.vector_field(G, TANH, pi, x - e)
                ) / (2 * h)
            assert np.max(np.abs(J - fd)) / (1 + np.max(np.abs(J))) <= 1e-5


def test_jacobian_even_in_x():
    G = sd.random_signed_graph(6, 0.7, 0.5, seed=4)
    x = np.array([0.4, -1.2, 0.3, 2.0, -0.1, 0.8])
    assert np.allclose(sd.jacobian(G, TANH, 2.0, x), sd.jacobian(G, TANH, 2.0, -x), atol=1e-13)


def test_integrate_gas_below_pi1(window_graph):
    G, th = window_graph
    rng = np.random.default_rng(7)
    pi = 0.9 * th.pi1
    for _ in range(3):
        x0 = sample_l1_ball(rng, G.n, pi * G.n)
        traj = sd.integrate(G, TANH, pi, x0, horizon=400, step=0.05, stop_tol=1e-9)
        assert traj.converged
        assert np.max(np.abs(traj.terminal)) <= 1e-6


def test_integrate_midwindow_reaches_equilibrium(window_graph):
    G, th = window_graph
    pi = 0.5 * (th.pi1 + th.pi2)
    eq = sd.find_equilibria(G, TANH, pi, n_seeds=100, seed=0)
    x0 = np.array([0.7, -0.4, 0.2, 0.5, -0.6, 0.1, 0.3, -0.2, 0.4, -0.5])
    traj = sd.integrate(G, TANH, pi, x0, horizon=300, step=0.05, stop_tol=1e-10)
    assert traj.converged
    dist = min(np.max(np.abs(traj.terminal - r.state)) for r in eq.nontrivial())
    assert dist <= 1e-6


def test_integrate_step_halving_is_fourth_order(window_graph):
    G, th = window_graph
    pi = 0.5 * (th.pi1 + th.pi2)
    x0 = np.array([0.7, -0.4, 0.2, 0.5, -0.6, 0.1, 0.3, -0.2, 0.4, -0.5])
    terminal = {
        h: sd.integrate(G, TANH, pi, x0, horizon=6.0, step=h).terminal
        for h in (0.2, 0.1, 0.05)
    }
    d1 = np.max(np.abs(terminal[0.2] - terminal[0.1]))
    d2 = np.max(np.abs(terminal[0.1] - terminal[0.05]))
    assert 10.0 <= d1 / d2 <= 24.0


def test_integrate_adaptive_matches_fine_fixed_step(window_graph):
    G, th = window_graph
    pi = 0.5 * (th.pi1 + th.pi2)
    x0 = np.array([0.7, -0.4, 0.2, 0.5, -0.6, 0.1, 0.3, -0.2, 0.4, -0.5])
    coarse = sd.integrate(G, TANH, pi, x0, horizon=5, step=0.5, adaptive=True, local_tol=1e-10)
    fine = sd.integrate(G, TANH, pi, x0, horizon=5, step=0.01)
    assert np.max(np.abs(coarse.terminal - fine.terminal)) <= 1e-7


def test_integrate_blowup_guard():
    G = sd.random_signed_graph(10, 0.5, 0.3, seed=15)
    with pytest.raises(NonFiniteState):
        sd.integrate(G, TANH, 50.0, 1e6 * np.ones(10), horizon=2000.0, step=5.0)


def test_find_equilibria_unique_below_pi1(window_graph):
    G, th = window_graph
    eq = sd.find_equilibria(G, TANH, 0.9 * th.pi1, n_seeds=100, seed=5)
    assert len(eq) == 1
    assert eq.records[0].norm_inf <= 1e-8
    assert eq.records[0].stability == "stable"


def test_find_equilibria_exactly_three_in_window(window_graph):
    G, th = window_graph
    pi = 0.5 * (th.pi1 + th.pi2)
    eq = sd.find_equilibria(G, TANH, pi, n_seeds=200, seed=6)
    assert len(eq) == 3
    labels = sorted(r.stability for r in eq.records)
    assert labels == ["stable", "stable", "unstable"]
    nz = eq.nontrivial()
    assert np.max(np.abs(nz[0].state + nz[1].state)) <= 1e-6  # ± pair
    for r in eq.records:
        assert r.residual <= 1e-10
    # multiplicity hint pairs the two nontrivial records, origin is self-paired
    origin = [i for i, r in enumerate(eq.records) if r.norm_inf <= 1e-8][0]
    assert eq.records[origin].negation_partner == origin


def test_newton_from_negated_start_finds_negation(window_graph):
    G, th = window_graph
    pi = 0.5 * (th.pi1 + th.pi2)
    eq = sd.find_equilibria(G, TANH, pi, n_seeds=50, seed=7)
    x_star = eq.nontrivial()[0].state
    again = sd.find_equilibria(G, TANH, pi, n_seeds=1, seed=8, warm_starts=[-x_star])
    dists = [np.max(np.abs(r.state + x_star)) for r in again.records]
    assert min(dists) <= 1e-8


def test_origin_stability_flips_at_pi1(window_graph):
    G, th = window_graph
    label_lo, _ = sd.classify_stability(G, TANH, 0.95 * th.pi1, np.zeros(G.n))
    label_hi, _ = sd.classify_stability(G, TANH, 1.05 * th.pi1, np.zeros(G.n))
    label_at, _ = sd.classify_stability(G, TANH, th.pi1, np.zeros(G.n))
    assert label_lo == "stable"
    assert label_hi == "unstable"
    assert label_at == "marginal"


def test_example5_equilibria_thirteen_states():
    G = all_negative_triangle()
    eq = sd.find_equilibria(G, TANH, 4.0, n_seeds=400, seed=9)
    assert len(eq) == 13
    alpha = bisect_alpha(0.5)
    x1 = alpha * np.array([1.0, -1.0, 0.0])
    dists = [np.max(np.abs(r.state - x1)) for r in eq.records]
    assert min(dists) <= 1e-8


def test_balanced_nontrivial_equilibria_live_in_signature_orthants():
    base = sd.random_signed_graph(10, 0.4, 0.0, seed=0)
    scramble = np.random.default_rng(100).integers(0, 2, 10) * 2.0 - 1.0
    G = sd.switch(base, scramble)
    th = sd.thresholds(G)
    assert th.pi2_finite
    _, sig = sd.is_structurally_balanced(G)
    eq = sd.find_equilibria(G, TANH, 0.5 * (th.pi1 + th.pi2), n_seeds=200, seed=1)
    assert len(eq) == 3
    for r in eq.nontrivial():
        prods = sig * r.state
        assert np.all(prods > 0) or np.all(prods < 0)
        assert r.stability == "stable"


def test_lyapunov_basics():
    assert sd.lyapunov_value(TANH, np.zeros(4)) == 0.0
    x = np.array([1.0, 0.0, 0.0])
    assert sd.lyapunov_value(TANH, x) == pytest.approx(math.log(math.cosh(1.0)), abs=1e-12)
    y = np.array([0.3, -1.2, 2.0])
    assert sd.lyapunov_value(TANH, y) == sd.lyapunov_value(TANH, -y)
    assert sd.lyapunov_value(TANH, y) > 0


def test_lyapunov_nonincreasing_below_pi1(window_graph):
    G, th = window_graph
    rng = np.random.default_rng(11)
    pi = 0.95 * th.pi1
    for _ in range(3):
        x0 = sample_l1_ball(rng, G.n, pi * G.n)
        traj = sd.integrate(G, TANH, pi, x0, horizon=40, step=0.02)
        values = [sd.lyapunov_value(TANH, x) for x in traj.states]
        assert np.all(np.diff(values) <= 1e-9)


def test_check_norm_bound_triangle_example5():
    G = all_negative_triangle()
    eq = sd.find_equilibria(G, TANH, 4.0, n_seeds=200, seed=12)
    fr = sd.frustration_exact(G)
    report = sd.check_norm_bound(G, 4.0, eq, fr)
    assert report.bound == pytest.approx(4.0, abs=1e-12)
    assert report.all_pass
    alpha = bisect_alpha(0.5)
    assert max(report.norms) == pytest.approx(2 * 0.72841451224486 + 2.4883776254213847, abs=1e-6) or max(
        report.norms
    ) == pytest.approx(2 * alpha, abs=1e-6)


def test_check_norm_bound_random_window(window_graph):
    G, th = window_graph
    fr = sd.frustration_exact(G)
    for pi in (1.5, 2.0, 3.0):
        eq = sd.find_equilibria(G, TANH, pi, n_seeds=60, seed=13)
        assert sd.check_norm_bound(G, pi, eq, fr).all_pass


def test_trajectory_omega_set_when_regular(window_graph):
    # degree-regularized graph: terminal states inside the frustration box
    G, _ = window_graph
    R = sd.regularize_degrees(G)
    th = sd.thresholds(R)
    fr = sd.frustration_exact(R)
    pi = th.pi1 * 1.5
    rng = np.random.default_rng(15)
    x0 = sample_l1_ball(rng, R.n, 2 * pi * R.n)
    traj = sd.integrate(R, TANH, pi, x0, horizon=200, step=0.05, stop_tol=1e-9)
    assert np.abs(traj.terminal).sum() <= pi * (R.n - 2 * fr.value) + 1e-6


def test_equilibrium_csv_rows(window_graph):
    G, th = window_graph
    pi = 0.5 * (th.pi1 + th.pi2)
    eq = sd.find_equilibria(G, TANH, pi, n_seeds=50, seed=16)
    rows = eq.to_rows()
    assert len(rows) == len(eq)
    assert rows[0][0] == pi
