"""Dense symmetric eigensolving and bifurcation thresholds.

The normalized Laplacian of a signed graph is generally nonsymmetric but
diagonally symmetrizable: its spectrum equals 1 - spec(Hs) where
Hs = Delta^{-1/2} A Delta^{-1/2} is symmetric. All eigensolves in this module
therefore run on symmetric matrices, in-repo, for reproducibility across
platforms: cyclic Jacobi up to JACOBI_SIZE_LIMIT, Householder
tridiagonalization plus implicit-shift QL above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import BracketFailure, NoConvergence, NotSymmetric, StepTooLarge
from .graph import SignedGraph, derive_operators

JACOBI_SIZE_LIMIT = 64


# -- eigensolver ---------------------------------------------------------------


def eigh(M: np.ndarray, sym_tol: float = 1e-8) -> Tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns (w, V) with eigenvalues w in nondecreasing order and orthonormal
    eigenvector columns V. Raises NotSymmetric when the input is asymmetric
    beyond sym_tol (relative), NoConvergence when the iteration budget runs out.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NotSymmetric("eigh expects a square matrix")
    scale = float(np.max(np.abs(M))) if M.size else 0.0
    if float(np.max(np.abs(M - M.T), initial=0.0)) > sym_tol * (1.0 + scale):
        raise NotSymmetric("matrix is not symmetric within tolerance")
    A = 0.5 * (M + M.T)
    n = A.shape[0]
    if n == 1:
        return A.diagonal().copy(), np.eye(1)
    if n <= JACOBI_SIZE_LIMIT:
        return _jacobi(A)
    d, e, Q = _householder_tridiagonalize(A)
    return _ql_implicit_shift(d, e, Q)


def _rotate(A: np.ndarray, V: np.ndarray, p: int, q: int, c: float, s: float) -> None:
    cp = A[:, p].copy()
    cq = A[:, q].copy()
    A[:, p] = c * cp - s * cq
    A[:, q] = s * cp + c * cq
    rp = A[p, :].copy()
    rq = A[q, :].copy()
    A[p, :] = c * rp - s * rq
    A[q, :] = s * rp + c * rq
    vp = V[:, p].copy()
    vq = V[:, q].copy()
    V[:, p] = c * vp - s * vq
    V[:, q] = s * vp + c * vq


def _jacobi(A: np.ndarray, max_sweeps: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    A = A.copy()
    n = A.shape[0]
    V = np.eye(n)
    fro = float(np.linalg.norm(A))
    if fro == 0.0:
        return np.zeros(n), V
    for _ in range(max_sweeps):
        off = math.sqrt(max(0.0, 2.0 * float(np.sum(np.triu(A, 1) ** 2))))
        if off <= 1e-15 * fro * n:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-18 * fro:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                if abs(theta) > 1e12:
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.sqrt(1.0 + t * t)
                _rotate(A, V, p, q, c, t * c)
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = A.diagonal().copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


def _householder_tridiagonalize(
    A: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reduce symmetric A to tridiagonal T = Q^T A Q; returns (diag, subdiag, Q)."""
    A = A.copy()
    n = A.shape[0]
    Q = np.eye(n)
    for k in range(n - 2):
        x = A[k + 1 :, k].copy()
        nx = float(np.linalg.norm(x))
        if nx == 0.0:
            continue
        alpha = -math.copysign(nx, x[0] if x[0] != 0.0 else 1.0)
        v = x
        v[0] -= alpha
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            continue
        v /= nv
        B = A[k + 1 :, k + 1 :]
        w = B @ v
        w -= (v @ w) * v
        B -= 2.0 * (np.outer(v, w) + np.outer(w, v))
        A[k + 1, k] = alpha
        A[k + 2 :, k] = 0.0
        A[k, k + 1 :] = A[k + 1 :, k]
        Q[:, k + 1 :] -= 2.0 * np.outer(Q[:, k + 1 :] @ v, v)
    d = np.diag(A).copy()
    e = np.zeros(n)
    e[: n - 1] = np.diag(A, -1)
    return d, e, Q


def _ql_implicit_shift(
    d: np.ndarray, e: np.ndarray, Z: np.ndarray, max_iter: int = 50
) -> Tuple[np.ndarray, np.ndarray]:
    """Implicit-shift QL on a symmetric tridiagonal (d, e); rotates Z alongside."""
    n = d.size
    d = d.copy()
    e = e.copy()
    Z = Z.copy()
    eps = np.finfo(float).eps
    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            iterations += 1
            if iterations > max_iter:
                raise NoConvergence(f"QL exceeded {max_iter} iterations per eigenvalue")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                zi = Z[:, i].copy()
                zi1 = Z[:, i + 1].copy()
                Z[:, i + 1] = s * zi + c * zi1
                Z[:, i] = c * zi - s * zi1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    order = np.argsort(d, kind="stable")
    return d[order], Z[:, order]


# -- thresholds ----------------------------------------------------------------


@dataclass(frozen=True)
class SpectralSummary:
    """Spectrum of the normalized Laplacian and the derived effort thresholds.

    pi2 is +inf (pi2_finite False) when lambda2 >= 1, which can only happen
    for structurally balanced graphs. pi1d is present only when a step size
    was supplied.
    """

    eigs: np.ndarray
    lambda1: float
    lambda2: float
    lambda_n: float
    pi1: float
    pi2: float
    pi2_finite: bool
    pi1d: Optional[float] = None
    step_size: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "lambda": [float(v) for v in self.eigs],
            "pi1": self.pi1,
            "pi2": self.pi2 if self.pi2_finite else None,
            "pi1d": self.pi1d,
            "eps_step": self.step_size,
        }


def spectrum_of_normalized_laplacian(G: SignedGraph) -> np.ndarray:
    """Eigenvalues of I - Delta^{-1}A, nondecreasing, via the symmetric form.

    Guaranteed real: spec(normalized Laplacian) = 1 - spec(Hs) with Hs
    symmetric and similar to Delta^{-1}A.
    """
    ops = derive_operators(G)
    w, _ = eigh(ops.symmetrized_interaction)
    return np.sort(1.0 - w)


def thresholds_from_eigs(lambda1: float, lambda2: float) -> Tuple[float, float, bool]:
    """(pi1, pi2, pi2_finite) from the two smallest normalized-Laplacian eigenvalues."""
    l1 = max(float(lambda1), 0.0)
    if l1 >= 1.0:
        raise NoConvergence(f"lambda1={l1} >= 1 is impossible for a connected graph")
    pi1 = 1.0 / (1.0 - l1)
    if lambda2 < 1.0 - 1e-12:
        return pi1, 1.0 / (1.0 - float(lambda2)), True
    return pi1, math.inf, False


def thresholds(
    G: SignedGraph,
    eps_step: Optional[float] = None,
    pi1d_tol: float = 1e-10,
) -> SpectralSummary:
    """Compute pi1 = 1/(1-lambda1), pi2 = 1/(1-lambda2), and optionally pi1d.

    pi1d (the discrete-time threshold for step size eps_step) is found by
    bisection on pi -> lambda_n(Delta - pi*A); requires eps_step*max(deg) < 2.
    """
    eigs = spectrum_of_normalized_laplacian(G)
    lambda1 = float(eigs[0])
    lambda2 = float(eigs[1])
    lambda_n = float(eigs[-1])
    pi1, pi2, finite = thresholds_from_eigs(lambda1, lambda2)
    pi1d = None
    if eps_step is not None:
        pi1d = solve_pi1d(G, eps_step, tol=pi1d_tol)
    return SpectralSummary(
        eigs=eigs,
        lambda1=lambda1,
        lambda2=lambda2,
        lambda_n=lambda_n,
        pi1=pi1,
        pi2=pi2,
        pi2_finite=finite,
        pi1d=pi1d,
        step_size=eps_step,
    )


def solve_pi1d(
    G: SignedGraph,
    eps_step: float,
    tol: float = 1e-10,
    max_doublings: int = 60,
) -> float:
    """The unique pi > 0 with lambda_n(Delta - pi*A) = 2/eps_step.

    pi -> lambda_n(Delta - pi*A) is convex (pointwise max of affine forms) and
    eventually increasing, and its value at pi=0 is max(deg) < 2/eps_step, so
    the upward crossing is unique. The bracket is grown geometrically and then
    bisected to width tol.
    """
    if eps_step <= 0:
        raise StepTooLarge("step size must be positive")
    if eps_step * G.max_degree >= 2.0:
        raise StepTooLarge(
            f"eps*max(degree) = {eps_step * G.max_degree:.6g} >= 2; "
            "outside the period-2 admissible regime"
        )
    target = 2.0 / eps_step
    D = np.diag(G.degrees)
    A = G.weights

    def largest(pi: float) -> float:
        w, _ = eigh(D - pi * A)
        return float(w[-1])

    lo = 0.0
    hi = 1.0
    for _ in range(max_doublings):
        if largest(hi) >= target:
            break
        lo = hi
        hi *= 2.0
    else:
        raise BracketFailure(
            f"lambda_n(Delta - pi*A) never reached 2/eps = {target:.6g}"
        )
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if largest(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
