import math

import numpy as np
import pytest

import signeddyn as sd
from signeddyn.errors import NoConvergence, NotSymmetric, StepTooLarge
from signeddyn.spectra import eigh


def all_negative_triangle():
    return sd.build_graph(3, [(0, 1, -1), (0, 2, -1), (1, 2, -1)])


def test_eigh_identity():
    w, V = eigh(np.eye(3))
    assert np.allclose(w, [1, 1, 1])
    assert np.allclose(V.T @ V, np.eye(3), atol=1e-12)


def test_eigh_2x2_closed_form():
    w, V = eigh(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(w, [-1.0, 1.0], atol=1e-14)


def test_eigh_triangle_hs():
    G = all_negative_triangle()
    hs = sd.derive_operators(G).symmetrized_interaction
    w, _ = eigh(hs)
    assert np.allclose(w, [-1.0, 0.5, 0.5], atol=1e-12)


def test_eigh_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("n", [2, 3, 5, 10, 40, 64, 65, 90, 150])
def test_eigh_against_numpy(n):
    rng = np.random.default_rng(n)
    B = rng.standard_normal((n, n))
    M = 0.5 * (B + B.T)
    w, V = eigh(M)
    scale = max(1.0, float(np.abs(M).max()))
    assert np.max(np.abs(w - np.linalg.eigvalsh(M))) <= 1e-9 * scale
    assert np.max(np.abs(M @ V - V * w)) <= 1e-8 * scale
    assert np.max(np.abs(V.T @ V - np.eye(n))) <= 1e-9


@pytest.mark.parametrize("n", [6, 80])
def test_eigh_degenerate_spectra(n):
    rng = np.random.default_rng(7)
    # integer diagonal conjugated by a rotation: many repeated eigenvalues
    vals = np.repeat(rng.integers(-2, 3, (n + 2) // 3).astype(float), 3)[:n]
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    M = (Q * vals) @ Q.T
    M = 0.5 * (M + M.T)
    w, V = eigh(M)
    assert np.max(np.abs(w - np.sort(vals))) <= 1e-9
    assert np.max(np.abs(M @ V - V * w)) <= 1e-8


def test_spectrum_triangle_and_balanced_cases():
    eigs = sd.spectrum_of_normalized_laplacian(all_negative_triangle())
    assert np.allclose(eigs, [0.5, 0.5, 2.0], atol=1e-12)

    neg_edge = sd.build_graph(2, [(0, 1, -1.0)])
    assert np.allclose(sd.spectrum_of_normalized_laplacian(neg_edge), [0.0, 2.0], atol=1e-12)

    balanced = sd.random_signed_graph(12, 0.5, 0.0, seed=4)
    assert sd.spectrum_of_normalized_laplacian(balanced)[0] <= 1e-12


def test_spectrum_matches_general_dense_eig():
    # symmetrized route vs a general-purpose eigensolver on the nonsymmetric operator
    for seed in range(10):
        G = sd.random_signed_graph(11, 0.5, 0.4, seed=seed)
        ln = sd.derive_operators(G).normalized_laplacian
        ref = np.sort(np.linalg.eigvals(ln).real)
        ours = sd.spectrum_of_normalized_laplacian(G)
        assert np.max(np.abs(ours - ref)) <= 1e-8


def test_thresholds_formula():
    pi1, pi2, finite = sd.thresholds_from_eigs(0.065, 0.500)
    assert finite
    assert math.isclose(pi1, 1.0 / 0.935, rel_tol=1e-15)
    assert math.isclose(pi2, 2.0, rel_tol=1e-15)


def test_thresholds_balanced_graph_pi1_is_one():
    G = sd.random_signed_graph(10, 0.5, 0.0, seed=8)
    s = sd.thresholds(G)
    assert abs(s.pi1 - 1.0) <= 1e-12


def test_thresholds_pi2_infinite_for_complete_balanced():
    # all-positive complete graph: lambda2 of the normalized Laplacian exceeds 1
    n = 4
    G = sd.build_graph(n, [(i, j, 1.0) for i in range(n) for j in range(i + 1, n)])
    s = sd.thresholds(G)
    assert s.lambda2 > 1.0
    assert not s.pi2_finite
    assert s.pi2 == math.inf
    assert s.to_dict()["pi2"] is None


def test_thresholds_invariant_under_switching():
    rng = np.random.default_rng(2)
    G = sd.random_signed_graph(10, 0.5, 0.4, seed=12)
    s = rng.integers(0, 2, 10) * 2.0 - 1.0
    a = sd.thresholds(G)
    b = sd.thresholds(sd.switch(G, s))
    assert math.isclose(a.pi1, b.pi1, rel_tol=1e-10)
    assert math.isclose(a.pi2, b.pi2, rel_tol=1e-10)


def test_solve_pi1d_triangle_closed_form():
    # lambda_n(Delta - pi*A) = 2(1 + pi) for the triangle, so pi1d = 1/eps - 1
    G = all_negative_triangle()
    assert abs(sd.solve_pi1d(G, 0.3) - 7.0 / 3.0) <= 1e-8
    assert abs(sd.solve_pi1d(G, 0.45) - (1.0 / 0.45 - 1.0)) <= 1e-8


def test_solve_pi1d_matches_numpy_bisection_oracle():
    G = sd.random_signed_graph(9, 0.5, 0.5, seed=3)
    eps = 0.9 / G.max_degree
    target = 2.0 / eps
    D = np.diag(G.degrees)

    def f(pi):
        return np.linalg.eigvalsh(D - pi * G.weights)[-1] - target

    lo, hi = 0.0, 1.0
    while f(hi) < 0:
        hi *= 2
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    assert abs(sd.solve_pi1d(G, eps) - 0.5 * (lo + hi)) <= 1e-7


def test_solve_pi1d_step_too_large():
    G = all_negative_triangle()  # max degree 2
    with pytest.raises(StepTooLarge):
        sd.solve_pi1d(G, 1.0)
    with pytest.raises(StepTooLarge):
        sd.thresholds(G, eps_step=1.5)


def test_pi1d_exceeds_pi1_for_balanced(seeds=(0, 1, 2)):
    for seed in seeds:
        G = sd.random_signed_graph(8, 0.6, 0.0, seed=seed)
        eps = 0.9 / G.max_degree
        s = sd.thresholds(G, eps_step=eps)
        assert s.pi1d > s.pi1


def test_pi1d_exceeds_pi1_when_lambda1_small():
    # structurally unbalanced with lambda1 < 2 - lambda_n
    found = 0
    for seed in range(30):
        G = sd.random_signed_graph(10, 0.5, 0.15, seed=seed)
        s = sd.thresholds(G)
        if s.lambda1 > 1e-8 and s.lambda1 < 2.0 - s.lambda_n:
            eps = 0.9 / G.max_degree
            s2 = sd.thresholds(G, eps_step=eps)
            assert s2.pi1d > s2.pi1
            found += 1
    assert found >= 5


def test_largest_eig_of_l_pi_is_convex_on_grid():
    G = sd.random_signed_graph(8, 0.6, 0.5, seed=6)
    D = np.diag(G.degrees)
    grid = np.linspace(0.0, 6.0, 25)
    vals = [eigh(D - p * G.weights)[0][-1] for p in grid]
    second = np.diff(vals, 2)
    assert np.all(second >= -1e-9)


def test_lemma2_small_batch():
    checked = 0
    for seed in range(120):
        G = sd.random_signed_graph(10, 0.45, 0.5, seed=seed)
        if sd.is_structurally_balanced(G)[0]:
            continue
        assert sd.spectrum_of_normalized_laplacian(G)[1] < 1.0 - 1e-12
        checked += 1
    assert checked >= 100
