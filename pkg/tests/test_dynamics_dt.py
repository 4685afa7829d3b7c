import numpy as np
import pytest

import signeddyn as sd
from signeddyn.dynamics_dt import iterate_map, violates_necessary_conditions
from signeddyn.errors import MissingPi1d, NonFiniteState
from signeddyn.spectra import SpectralSummary

TANH = sd.make_profile("tanh")


def all_negative_triangle():
    return sd.build_graph(3, [(0, 1, -1), (0, 2, -1), (1, 2, -1)])


@pytest.fixture(scope="module")
def window_graph():
    G = sd.random_signed_graph(10, 0.5, 0.3, seed=15)
    return G, sd.thresholds(G)


def test_step_zero_fixed():
    G = all_negative_triangle()
    assert np.array_equal(sd.step(G, TANH, 2.0, 0.3, np.zeros(3)), np.zeros(3))


def test_ct_equilibria_are_dt_fixed_points(window_graph):
    G, th = window_graph
    pi = 0.5 * (th.pi1 + th.pi2)
    eq = sd.find_equilibria(G, TANH, pi, n_seeds=80, seed=0)
    for r in eq.records:
        after = sd.step(G, TANH, pi, 0.2, r.state)
        assert np.max(np.abs(after - r.state)) <= 1e-9


def test_linearization_at_origin_matches_jpi():
    # complex-step differentiation: exact to machine precision for tanh
    G = sd.random_signed_graph(8, 0.5, 0.4, seed=3)
    pi, eps = 1.7, 0.2
    L_pi = np.diag(G.degrees) - pi * G.weights
    J_pi = np.eye(8) - eps * L_pi
    h = 1e-20
    J_cs = np.empty((8, 8))
    for i in range(8):
        e = np.zeros(8, dtype=complex)
        e[i] = 1j * h
        J_cs[:, i] = sd.step(G, TANH, pi, eps, np.zeros(8, dtype=complex) + e).imag / h
    assert np.max(np.abs(J_cs - J_pi)) <= 1e-12


def test_simulate_gas_below_thresholds(window_graph):
    G, th = window_graph
    eps = 0.9 / G.max_degree
    s = sd.thresholds(G, eps_step=eps)
    pi = 0.9 * min(s.pi1, s.pi1d)
    rng = np.random.default_rng(1)
    for _ in range(3):
        x0 = sd.dynamics_ct.sample_l1_ball(rng, G.n, pi * G.n)
        out = sd.simulate(G, TANH, pi, eps, x0, max_iters=100000, tol=1e-10)
        assert out.kind == "fixed_point"
        assert out.norm_inf <= 1e-6
        assert out.theorem4_regime


def test_triangle_period_doubling_regime():
    G = all_negative_triangle()
    s = sd.thresholds(G, eps_step=0.45)
    assert s.pi1d == pytest.approx(1.0 / 0.45 - 1.0, abs=1e-6)
    assert sd.classify_first_bifurcation(s) == "period_doubling"

    x0 = np.array([0.3, -0.2, 0.1])
    out_mid = sd.simulate(G, TANH, 1.6, 0.45, x0, max_iters=50000)
    assert out_mid.kind == "period2"
    assert out_mid.amplitude > 0.1
    assert not violates_necessary_conditions(out_mid, s)

    out_lo = sd.simulate(G, TANH, 1.1, 0.45, x0, max_iters=50000)
    assert out_lo.kind == "fixed_point"
    assert out_lo.norm_inf <= 1e-6

    # above pi1 a nonzero fixed point exists (shared with the CT system)
    eq = sd.find_equilibria(G, TANH, 2.5, n_seeds=100, seed=2)
    x_star = eq.nontrivial()[0].state
    assert np.max(np.abs(sd.step(G, TANH, 2.5, 0.45, x_star) - x_star)) <= 1e-9


def test_pitchfork_regime_fixed_point_matches_ct(window_graph):
    G, th = window_graph
    eps = 0.9 / G.max_degree
    s = sd.thresholds(G, eps_step=eps)
    assert sd.classify_first_bifurcation(s) == "pitchfork"
    pi = th.pi1 + 0.25 * (th.pi2 - th.pi1)
    eq = sd.find_equilibria(G, TANH, pi, n_seeds=100, seed=3)
    x0 = np.array([0.7, -0.4, 0.2, 0.5, -0.6, 0.1, 0.3, -0.2, 0.4, -0.5])
    out = sd.simulate(G, TANH, pi, eps, x0, max_iters=200000, tol=1e-10)
    assert out.kind == "fixed_point"
    assert out.norm_inf > 1e-3
    dist = min(np.max(np.abs(out.state - r.state)) for r in eq.nontrivial())
    assert dist <= 1e-6
    assert not violates_necessary_conditions(out, s)


def test_euler_consistency_as_step_shrinks(window_graph):
    # fixed transient horizon: Euler error vs an RK4 reference is O(eps)
    G, th = window_graph
    pi = 0.5 * (th.pi1 + th.pi2)
    x0 = np.array([0.7, -0.4, 0.2, 0.5, -0.6, 0.1, 0.3, -0.2, 0.4, -0.5])
    ref = sd.integrate(G, TANH, pi, x0, horizon=3.0, step=0.005).terminal
    errs = []
    for eps in (0.3, 0.1, 0.03):
        states = iterate_map(G, TANH, pi, eps, x0, int(round(3.0 / eps)))
        errs.append(np.max(np.abs(states[-1] - ref)))
    assert errs[0] > errs[1] > errs[2]
    # terminal attractors coincide with CT equilibria at every step size
    eq = sd.find_equilibria(G, TANH, pi, n_seeds=100, seed=4)
    for eps in (0.3, 0.1, 0.03):
        out = sd.simulate(G, TANH, pi, eps, x0, max_iters=300000, tol=1e-10)
        assert out.kind == "fixed_point"
        dist = min(np.max(np.abs(out.state - r.state)) for r in eq.records)
        assert dist <= 1e-6


def test_corollary_box_absorbs_iterates():
    G0 = sd.random_signed_graph(8, 0.6, 0.4, seed=5)
    G = sd.regularize_degrees(G0)  # Delta = I
    eps, pi = 0.5, 2.0
    assert eps * G.max_degree < 1
    x0 = 10.0 * pi * G.n * np.ones(G.n) / G.n  # start far outside
    states = iterate_map(G, TANH, pi, eps, x0, 2000)
    norms = np.abs(states).sum(axis=1)
    inside = norms <= pi * G.n + 1e-9
    assert inside[-1]
    first = int(np.argmax(inside))
    assert np.all(inside[first:])  # once inside, stays inside


def test_classification_labels():
    G = all_negative_triangle()
    with pytest.raises(MissingPi1d):
        sd.classify_first_bifurcation(sd.thresholds(G))
    balanced = sd.random_signed_graph(8, 0.6, 0.0, seed=6)
    sb = sd.thresholds(balanced, eps_step=0.9 / balanced.max_degree)
    assert sd.classify_first_bifurcation(sb) == "pitchfork"
    degenerate = SpectralSummary(
        eigs=np.array([0.2, 0.5, 1.5]),
        lambda1=0.2,
        lambda2=0.5,
        lambda_n=1.5,
        pi1=1.25,
        pi2=2.0,
        pi2_finite=True,
        pi1d=1.25 + 1e-12,
        step_size=0.1,
    )
    assert sd.classify_first_bifurcation(degenerate) == "degenerate"


def test_simulate_blowup_guard():
    G = all_negative_triangle()
    with pytest.raises(NonFiniteState):
        sd.simulate(G, TANH, 1e8, 1.5, np.array([1.0, -1.0, 0.5]), max_iters=5000)


def test_undecided_is_first_class():
    G = all_negative_triangle()
    out = sd.simulate(G, TANH, 1.6, 0.45, np.array([0.3, -0.2, 0.1]), max_iters=5)
    assert out.kind == "undecided"
    assert out.iterations == 5
