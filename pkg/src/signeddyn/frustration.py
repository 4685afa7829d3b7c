"""Frustration index: exact enumeration, local-search heuristic, effort bounds.

The frustration of a signed graph is the minimum, over ±1 signatures, of the
normalized weight of edges left inconsistent by the signature. With
H = Delta^{-1}A and Hbar = (H + H^T)/2 the energy of a signature s equals
(n - s^T Hbar s)/2, so minimizing energy is an Ising-style ground-state
search; flipping one spin changes the energy by a local sum, which both the
exact scan and the heuristic exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import DegenerateBound, FormulaMismatch, TooLargeForExact
from .graph import SignedGraph, derive_operators, is_structurally_balanced

EXHAUSTIVE_CAP = 24
_ENUM_CHUNK = 1 << 18


@dataclass(frozen=True)
class FrustrationResult:
    """Frustration value with the signature attaining it.

    exact=True carries an optimality certificate (full enumeration);
    exact=False is the best energy over heuristic restarts and is an upper
    bound on the true frustration.
    """

    value: float
    signature: np.ndarray
    exact: bool
    restarts_used: int = 0
    energy_trace: Optional[Tuple[float, ...]] = None


@dataclass(frozen=True)
class BoundReport:
    """Check of 1 <= pi1 <= min{n/(n - 2*eps), pi2}.

    The bound is proven only when the normalized Laplacian is symmetric
    (all degrees equal); symmetric_L=False marks the check as advisory.
    """

    pi1: float
    lower: float
    upper: float
    cap: float
    pi2: float
    frustration: float
    exact_frustration: bool
    symmetric_L: bool
    holds: bool


def _half_interaction(G: SignedGraph) -> np.ndarray:
    H = G.weights / G.degrees[:, None]
    return 0.5 * (H + H.T)


def _check_signature(G: SignedGraph, s: Sequence[float]) -> np.ndarray:
    s = np.asarray(s, dtype=float).ravel()
    if s.shape != (G.n,) or not np.all(np.abs(s) == 1.0):
        raise ValueError("signature must be a ±1 vector of length n")
    return s


def energy(G: SignedGraph, s: Sequence[float]) -> float:
    """Normalized weight of edges frustrated by the signature s.

    Evaluates both the definition (off-diagonal sum of |Lnorm| + S Lnorm S,
    halved) and the interaction-matrix identity (n - s^T Hbar s)/2, and
    raises FormulaMismatch if they disagree beyond 1e-12.
    """
    s = _check_signature(G, s)
    ln = derive_operators(G).normalized_laplacian.copy()
    np.fill_diagonal(ln, 0.0)
    e_def = 0.5 * float(np.sum(np.abs(ln) + np.outer(s, s) * ln))
    e_alt = 0.5 * (G.n - float(s @ (_half_interaction(G) @ s)))
    if abs(e_def - e_alt) > 1e-12 * max(1.0, G.n):
        raise FormulaMismatch(
            f"energy formulas disagree: {e_def!r} vs {e_alt!r}"
        )
    return e_def


def _signature_chunk(start: int, stop: int, n: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.uint64)
    bits = (idx[:, None] >> np.arange(n - 1, dtype=np.uint64)[None, :]) & np.uint64(1)
    S = np.empty((idx.size, n))
    S[:, 0] = 1.0
    S[:, 1:] = 1.0 - 2.0 * bits.astype(float)
    return S


def frustration_exact(G: SignedGraph, cap: int = EXHAUSTIVE_CAP) -> FrustrationResult:
    """Global minimum of the signature energy over all 2^(n-1) signatures.

    The first spin is fixed to +1 (global sign flips leave the energy
    unchanged). Ties are broken toward the lexicographically smallest
    signature for deterministic output. Raises TooLargeForExact above cap.
    """
    if G.n > cap:
        raise TooLargeForExact(f"n={G.n} exceeds the exhaustive cap {cap}")
    hbar = _half_interaction(G)
    total = 1 << (G.n - 1)
    best_q = -np.inf
    candidates: List[np.ndarray] = []
    for start in range(0, total, _ENUM_CHUNK):
        S = _signature_chunk(start, min(start + _ENUM_CHUNK, total), G.n)
        q = np.einsum("ij,ij->i", S @ hbar, S)
        mx = float(q.max())
        if mx > best_q + 1e-12:
            best_q = mx
            candidates = []
        if mx >= best_q - 1e-12:
            keep = np.nonzero(q >= best_q - 1e-12)[0]
            candidates.extend(S[k] for k in keep[:4096])
    scored = [(energy(G, s), tuple(s)) for s in candidates]
    best_e = min(e for e, _ in scored)
    best_sig = min(sig for e, sig in scored if e == best_e)
    sig = np.asarray(best_sig, dtype=int)
    return FrustrationResult(value=energy(G, sig), signature=sig, exact=True)


def _sign_iterate(hbar: np.ndarray, s: np.ndarray, max_iters: int) -> np.ndarray:
    prev = None
    for _ in range(max_iters):
        t = hbar @ s
        nxt = np.where(t > 0, 1.0, np.where(t < 0, -1.0, s))
        if np.array_equal(nxt, s):
            break
        if prev is not None and np.array_equal(nxt, prev):
            break  # synchronous 2-cycle; greedy descent takes over
        prev, s = s, nxt
    return s


def _greedy_descent(
    hbar: np.ndarray, s: np.ndarray, n: int
) -> Tuple[np.ndarray, List[float]]:
    s = s.copy()
    g = hbar @ s
    e = 0.5 * (n - float(s @ g))
    trace = [e]
    while True:
        deltas = 2.0 * s * g
        i = int(np.argmin(deltas))
        if deltas[i] >= -1e-12:
            return s, trace
        e += deltas[i]
        trace.append(e)
        g = g - 2.0 * s[i] * hbar[:, i]
        s[i] = -s[i]


def frustration_heuristic(
    G: SignedGraph,
    restarts: int = 50,
    seed: Optional[int] = None,
    max_sign_iters: int = 200,
) -> FrustrationResult:
    """Upper bound on the frustration by local search.

    Each start runs a synchronous sign-iteration s <- sign(Hbar s) to a fixed
    point (or 2-cycle), then greedy single-flip descent; the best energy over
    all starts wins. Deterministic warm starts (the all-ones signature and,
    when the graph is balanced, its balancing signature) precede the seeded
    random restarts, so balanced graphs always come out at zero.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    hbar = _half_interaction(G)
    rng = np.random.default_rng(seed)
    starts = [np.ones(G.n)]
    balanced, bal_sig = is_structurally_balanced(G)
    if balanced:
        starts.append(bal_sig.astype(float))
    for _ in range(restarts):
        starts.append(rng.integers(0, 2, G.n) * 2.0 - 1.0)

    best: Optional[Tuple[float, tuple, np.ndarray, List[float]]] = None
    for s0 in starts:
        s = _sign_iterate(hbar, s0.copy(), max_sign_iters)
        s, trace = _greedy_descent(hbar, s, G.n)
        s = s * s[0]  # canonical: first spin +1
        e = 0.5 * (G.n - float(s @ (hbar @ s)))
        key = (e, tuple(s))
        if best is None or key < (best[0], best[1]):
            best = (e, tuple(s), s, trace)
    sig = best[2].astype(int)
    return FrustrationResult(
        value=energy(G, sig),
        signature=sig,
        exact=False,
        restarts_used=len(starts),
        energy_trace=tuple(best[3]),
    )


def check_pi1_bounds(
    G: SignedGraph,
    eps_result: FrustrationResult,
    tol: float = 1e-8,
) -> BoundReport:
    """Verify 1 <= pi1 <= min{n/(n - 2*eps), pi2} for this graph.

    When the degrees are not all equal the normalized Laplacian is not
    symmetric and the bound is only empirical; the report then carries
    symmetric_L=False and should be read as advisory.
    """
    from .spectra import thresholds

    n = G.n
    eps = float(eps_result.value)
    denom = n - 2.0 * eps
    if denom <= 0:
        raise DegenerateBound(f"n - 2*eps = {denom:.6g} <= 0; cap undefined")
    cap = n / denom
    summary = thresholds(G)
    upper = min(cap, summary.pi2)
    holds = (1.0 - tol) <= summary.pi1 <= upper + tol
    return BoundReport(
        pi1=summary.pi1,
        lower=1.0,
        upper=upper,
        cap=cap,
        pi2=summary.pi2,
        frustration=eps,
        exact_frustration=eps_result.exact,
        symmetric_L=G.is_degree_regular(),
        holds=holds,
    )
