"""Continuous-time opinion dynamics dx/dt = Delta(-x + pi*H*psi(x)).

Covers the vector field and its Jacobian, fixed-step 4th-order integration,
damped-Newton equilibrium finding with ± symmetry closure, stability
classification through the symmetrized interaction matrix, the integral
Lyapunov diagnostic, and the frustration-based 1-norm bound check.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import FormulaMismatch, NonFiniteState
from .frustration import FrustrationResult
from .graph import SignedGraph, derive_operators
from .nonlinearity import NonlinearityProfile
from .spectra import eigh

STABILITY_MARGIN = 1e-8
DEDUP_RADIUS = 1e-5


def vector_field(
    G: SignedGraph, profile: NonlinearityProfile, pi: float, x: Sequence[float]
) -> np.ndarray:
    """Right-hand side Delta(-x + pi*H*psi(x)).

    The unnormalized form -Delta*x + pi*A*psi(x) is computed alongside and the
    two are required to agree to 1e-12; a mismatch indicates corrupted degree
    data and raises FormulaMismatch.
    """
    x = np.asarray(x, dtype=float)
    psi = profile.psi(x)
    apsi = G.weights @ psi
    f_norm = G.degrees * (-x + pi * (apsi / G.degrees))
    f_raw = -G.degrees * x + pi * apsi
    if np.max(np.abs(f_norm - f_raw)) > 1e-12 * (1.0 + np.max(np.abs(f_raw))):
        raise FormulaMismatch("normalized and raw vector fields disagree")
    return f_norm


def equilibrium_residual(
    G: SignedGraph, profile: NonlinearityProfile, pi: float, x: np.ndarray
) -> np.ndarray:
    """Phi(x, pi) = -x + pi*H*psi(x); zero exactly at equilibria."""
    x = np.asarray(x, dtype=float)
    return -x + pi * ((G.weights @ profile.psi(x)) / G.degrees)


def jacobian(
    G: SignedGraph, profile: NonlinearityProfile, pi: float, x: Sequence[float]
) -> np.ndarray:
    """Analytic Jacobian -Delta(I - pi*H*diag(psi'(x))).

    At the origin with pi=1 this reduces to -Delta times the normalized
    Laplacian. Even in x because psi' is even.
    """
    x = np.asarray(x, dtype=float)
    dpsi = profile.dpsi(x)
    H = G.weights / G.degrees[:, None]
    M = pi * H * dpsi[None, :]
    M[np.diag_indices_from(M)] -= 1.0
    return G.degrees[:, None] * M


@dataclass(frozen=True)
class Trajectory:
    """Integrated path: times, states (row per sample), and run metadata."""

    times: np.ndarray
    states: np.ndarray
    pi: float
    step: float
    method: str = "rk4"
    converged: bool = False

    @property
    def terminal(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self, path: str) -> None:
        n = self.states.shape[1]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"x{i+1}" for i in range(n)])
            for t, row in zip(self.times, self.states):
                writer.writerow([format(t, ".17g")] + [format(v, ".17g") for v in row])


def integrate(
    G: SignedGraph,
    profile: NonlinearityProfile,
    pi: float,
    x0: Sequence[float],
    horizon: float,
    step: float,
    adaptive: bool = False,
    local_tol: float = 1e-8,
    stop_tol: float = 0.0,
    max_depth: int = 14,
) -> Trajectory:
    """Classic fixed-step RK4 over [0, horizon].

    adaptive=True compares each base step against two half steps and
    subdivides while the Richardson error estimate exceeds local_tol.
    stop_tol > 0 stops early once the field's max-norm falls below it
    (converged flag set). Raises NonFiniteState on blow-up.
    """
    if step <= 0 or horizon <= 0:
        raise ValueError("step and horizon must be positive")

    def rhs(x: np.ndarray) -> np.ndarray:
        return vector_field(G, profile, pi, x)

    def rk4(x: np.ndarray, h: float) -> np.ndarray:
        k1 = rhs(x)
        k2 = rhs(x + 0.5 * h * k1)
        k3 = rhs(x + 0.5 * h * k2)
        k4 = rhs(x + h * k3)
        return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def advance(x: np.ndarray, h: float, depth: int) -> np.ndarray:
        if not adaptive:
            return rk4(x, h)
        full = rk4(x, h)
        half = rk4(rk4(x, 0.5 * h), 0.5 * h)
        if depth >= max_depth or np.max(np.abs(full - half)) / 15.0 <= local_tol:
            return half
        left = advance(x, 0.5 * h, depth + 1)
        return advance(left, 0.5 * h, depth + 1)

    n_steps = max(1, int(round(horizon / step)))
    x = np.asarray(x0, dtype=float).copy()
    times = [0.0]
    states = [x.copy()]
    converged = False
    for k in range(1, n_steps + 1):
        x = advance(x, step, 0)
        if not np.all(np.isfinite(x)):
            raise NonFiniteState(f"state blew up at t={k * step:.6g}; reduce the step")
        times.append(k * step)
        states.append(x.copy())
        if stop_tol > 0 and np.max(np.abs(rhs(x))) < stop_tol:
            converged = True
            break
    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(states),
        pi=pi,
        step=step,
        converged=converged,
    )


@dataclass(frozen=True)
class EquilibriumRecord:
    """A located equilibrium with its field residual and stability label."""

    state: np.ndarray
    residual: float
    stability: str
    leading: float
    negation_partner: int = -1

    @property
    def norm1(self) -> float:
        return float(np.abs(self.state).sum())

    @property
    def norm2(self) -> float:
        return float(np.sqrt((self.state**2).sum()))

    @property
    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.state)))


@dataclass(frozen=True)
class EquilibriumSet:
    """Deduplicated equilibria at a fixed effort level."""

    pi: float
    records: Tuple[EquilibriumRecord, ...]
    seeds_used: int
    converged_fraction: float

    def __len__(self) -> int:
        return len(self.records)

    @property
    def states(self) -> List[np.ndarray]:
        return [r.state for r in self.records]

    def nontrivial(self, zero_tol: float = 1e-6) -> List[EquilibriumRecord]:
        return [r for r in self.records if r.norm_inf > zero_tol]

    def to_rows(self) -> List[list]:
        """Rows for the CSV schema pi, branch_id, norm2, norm1, stability."""
        return [
            [self.pi, i, r.norm2, r.norm1, r.stability]
            for i, r in enumerate(self.records)
        ]


def sample_l1_ball(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    """Uniform sample from the l1 ball of the given radius."""
    w = rng.exponential(size=n)
    w /= w.sum()
    signs = rng.integers(0, 2, n) * 2.0 - 1.0
    return radius * rng.random() ** (1.0 / n) * signs * w


def _newton(
    G: SignedGraph,
    profile: NonlinearityProfile,
    pi: float,
    x0: np.ndarray,
    newton_tol: float,
    max_iter: int = 80,
    max_halvings: int = 30,
) -> Optional[np.ndarray]:
    """Damped Newton on Phi with a backtracking merit on its 2-norm.

    Convergence is declared on the Eq.-4 field residual max|Delta*Phi| so the
    reported residual matches the dynamics. Returns None for seeds that fail.
    """
    x = x0.copy()
    H = G.weights / G.degrees[:, None]
    for _ in range(max_iter):
        phi = equilibrium_residual(G, profile, pi, x)
        if np.max(np.abs(G.degrees * phi)) <= newton_tol:
            return x
        dpsi = profile.dpsi(x)
        J = pi * H * dpsi[None, :]
        J[np.diag_indices_from(J)] -= 1.0
        try:
            dx = np.linalg.solve(J, -phi)
        except np.linalg.LinAlgError:
            return None
        merit = float(np.linalg.norm(phi))
        lam = 1.0
        for _ in range(max_halvings):
            cand = x + lam * dx
            if float(np.linalg.norm(equilibrium_residual(G, profile, pi, cand))) < merit:
                x = cand
                break
            lam *= 0.5
        else:
            return None
        if np.max(np.abs(x)) > 1e9:
            return None
    phi = equilibrium_residual(G, profile, pi, x)
    if np.max(np.abs(G.degrees * phi)) <= newton_tol:
        return x
    return None


def classify_stability(
    G: SignedGraph,
    profile: NonlinearityProfile,
    pi: float,
    x_star: Sequence[float],
    margin: float = STABILITY_MARGIN,
) -> Tuple[str, float]:
    """Stability of an equilibrium via pi*lambda_n(S^{1/2} Hs S^{1/2}), S = psi'(x*).

    The symmetric congruence shares its spectrum with H*diag(psi'), so the
    test pi*lambda_n < 1 decides local asymptotic stability. Values within
    margin of 1 are reported marginal, never rounded to stable. Returns the
    label and the leading proxy pi*lambda_n - 1.
    """
    x_star = np.asarray(x_star, dtype=float)
    s = np.sqrt(profile.dpsi(x_star))
    hs = derive_operators(G).symmetrized_interaction
    w, _ = eigh(s[:, None] * hs * s[None, :])
    value = pi * float(w[-1])
    if value < 1.0 - margin:
        label = "stable"
    elif value > 1.0 + margin:
        label = "unstable"
    else:
        label = "marginal"
    return label, value - 1.0


def find_equilibria(
    G: SignedGraph,
    profile: NonlinearityProfile,
    pi: float,
    n_seeds: int = 50,
    seed: Optional[int] = None,
    warm_starts: Optional[Sequence[np.ndarray]] = None,
    newton_tol: float = 1e-10,
    dedup_radius: float = DEDUP_RADIUS,
) -> EquilibriumSet:
    """Locate equilibria from the origin, warm starts, and random seeds.

    Random seeds are drawn uniformly from the l1 ball of radius pi*n, which
    contains every equilibrium. Results are deduplicated in the max norm and
    closed under negation (x* found implies -x* recorded). The origin is
    always present. Non-converged seeds lower converged_fraction but are not
    errors.
    """
    if n_seeds < 1:
        raise ValueError("n_seeds must be >= 1")
    rng = np.random.default_rng(seed)
    seeds = [np.zeros(G.n)]
    for w in warm_starts or []:
        seeds.append(np.asarray(w, dtype=float))
    for _ in range(n_seeds):
        seeds.append(sample_l1_ball(rng, G.n, pi * G.n))

    found: List[np.ndarray] = []
    converged = 0
    for s0 in seeds:
        x = _newton(G, profile, pi, s0, newton_tol)
        if x is None:
            continue
        converged += 1
        if not any(np.max(np.abs(x - y)) <= dedup_radius for y in found):
            found.append(x)
    # negation closure: the field is odd, so -x* is an equilibrium too
    for x in list(found):
        if not any(np.max(np.abs(-x - y)) <= dedup_radius for y in found):
            found.append(-x)

    records = []
    for x in found:
        res = float(np.max(np.abs(G.degrees * equilibrium_residual(G, profile, pi, x))))
        label, lead = classify_stability(G, profile, pi, x)
        records.append(
            EquilibriumRecord(state=x, residual=res, stability=label, leading=lead)
        )
    # pair each record with its negation for the multiplicity hint
    paired = []
    for i, r in enumerate(records):
        partner = i
        for j, other in enumerate(records):
            if np.max(np.abs(r.state + other.state)) <= dedup_radius:
                partner = j
                break
        paired.append(
            EquilibriumRecord(
                state=r.state,
                residual=r.residual,
                stability=r.stability,
                leading=r.leading,
                negation_partner=partner,
            )
        )
    return EquilibriumSet(
        pi=pi,
        records=tuple(paired),
        seeds_used=len(seeds),
        converged_fraction=converged / len(seeds),
    )


def lyapunov_value(profile: NonlinearityProfile, x: Sequence[float]) -> float:
    """V(x) = sum_i integral_0^{x_i} psi_i, via the profile's antiderivative.

    Positive definite and even; nonincreasing along trajectories whenever the
    effort level is at or below the first threshold.
    """
    return float(np.sum(profile.antiderivative(np.asarray(x, dtype=float))))


@dataclass(frozen=True)
class NormBoundReport:
    """Per-equilibrium check of |x*|_1 <= pi*(n - 2*eps) + tol."""

    pi: float
    bound: float
    norms: Tuple[float, ...]
    flags: Tuple[bool, ...]
    exact_frustration: bool

    @property
    def all_pass(self) -> bool:
        return all(self.flags)


def check_norm_bound(
    G: SignedGraph,
    pi: float,
    equilibria: EquilibriumSet,
    eps_result: FrustrationResult,
    tol: float = 1e-6,
) -> NormBoundReport:
    """Check every equilibrium against the frustration 1-norm ceiling."""
    bound = pi * (G.n - 2.0 * eps_result.value)
    norms = tuple(r.norm1 for r in equilibria.records)
    flags = tuple(v <= bound + tol for v in norms)
    return NormBoundReport(
        pi=pi,
        bound=bound,
        norms=norms,
        flags=flags,
        exact_frustration=eps_result.exact,
    )
