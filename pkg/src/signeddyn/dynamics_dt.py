"""Discrete-time Euler map x_{k+1} = (I - eps*Delta) x_k + eps*pi*A*psi(x_k).

The map shares its fixed points with the continuous-time system but can also
settle into period-2 cycles; which of the two is born first at the origin is
decided by the ordering of the thresholds pi1 and pi1d.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import MissingPi1d, NonFiniteState
from .graph import SignedGraph
from .nonlinearity import NonlinearityProfile
from .spectra import SpectralSummary

PERIOD2_SEPARATION = 10.0


def step(
    G: SignedGraph,
    profile: NonlinearityProfile,
    pi: float,
    eps_step: float,
    x: Sequence[float],
) -> np.ndarray:
    """One Euler-map update; fixed points coincide with CT equilibria.

    Complex input is propagated (enables complex-step derivative checks).
    """
    x = np.asarray(x)
    if not np.iscomplexobj(x):
        x = x.astype(float)
    return (1.0 - eps_step * G.degrees) * x + eps_step * pi * (G.weights @ profile.psi(x))


@dataclass(frozen=True)
class DtOutcome:
    """Terminal behaviour of a discrete-time run.

    kind is "fixed_point" (state set), "period2" (pair set, ordered as the
    even- and odd-index iterates), or "undecided" when the iteration budget
    ran out first. theorem4_regime flags eps*max(deg) <= 1 (global results
    proven); lemma6_regime flags eps*max(deg) < 2 (period-2 counting valid).
    """

    kind: str
    pi: float
    eps_step: float
    iterations: int
    state: Optional[np.ndarray] = None
    pair: Optional[Tuple[np.ndarray, np.ndarray]] = None
    theorem4_regime: bool = True
    lemma6_regime: bool = True

    @property
    def amplitude(self) -> float:
        """Half the max-norm gap of the period-2 pair (0 for fixed points)."""
        if self.pair is None:
            return 0.0
        return 0.5 * float(np.max(np.abs(self.pair[0] - self.pair[1])))

    @property
    def norm_inf(self) -> float:
        if self.state is not None:
            return float(np.max(np.abs(self.state)))
        if self.pair is not None:
            return max(float(np.max(np.abs(p))) for p in self.pair)
        return float("nan")


def simulate(
    G: SignedGraph,
    profile: NonlinearityProfile,
    pi: float,
    eps_step: float,
    x0: Sequence[float],
    max_iters: int = 20000,
    tol: float = 1e-9,
) -> DtOutcome:
    """Iterate the map and detect a fixed point or a period-2 cycle.

    Detection uses the last four iterates: a fixed point needs one update of
    size <= tol; a cycle needs both stride-2 gaps <= tol while consecutive
    iterates stay a factor PERIOD2_SEPARATION above it. Anything else after
    max_iters is reported undecided (a first-class outcome near thresholds).
    """
    if max_iters < 4:
        raise ValueError("max_iters must be at least 4")
    eps_maxdeg = eps_step * G.max_degree
    window = [np.asarray(x0, dtype=float)]
    for k in range(1, max_iters + 1):
        nxt = step(G, profile, pi, eps_step, window[-1])
        if not np.all(np.isfinite(nxt)):
            raise NonFiniteState(f"iterate {k} is non-finite; reduce eps_step")
        window.append(nxt)
        if len(window) > 4:
            window.pop(0)
        d1 = float(np.max(np.abs(window[-1] - window[-2])))
        if d1 <= tol:
            return DtOutcome(
                kind="fixed_point",
                pi=pi,
                eps_step=eps_step,
                iterations=k,
                state=window[-1],
                theorem4_regime=eps_maxdeg <= 1.0,
                lemma6_regime=eps_maxdeg < 2.0,
            )
        if len(window) == 4:
            d2 = float(np.max(np.abs(window[3] - window[1])))
            d2b = float(np.max(np.abs(window[2] - window[0])))
            if max(d2, d2b) <= tol and d1 > PERIOD2_SEPARATION * tol:
                even, odd = (window[2], window[3]) if k % 2 == 0 else (window[3], window[2])
                return DtOutcome(
                    kind="period2",
                    pi=pi,
                    eps_step=eps_step,
                    iterations=k,
                    pair=(even, odd),
                    theorem4_regime=eps_maxdeg <= 1.0,
                    lemma6_regime=eps_maxdeg < 2.0,
                )
    return DtOutcome(
        kind="undecided",
        pi=pi,
        eps_step=eps_step,
        iterations=max_iters,
        theorem4_regime=eps_maxdeg <= 1.0,
        lemma6_regime=eps_maxdeg < 2.0,
    )


def iterate_map(
    G: SignedGraph,
    profile: NonlinearityProfile,
    pi: float,
    eps_step: float,
    x0: Sequence[float],
    n_iters: int,
) -> np.ndarray:
    """All iterates x_0 .. x_{n_iters} as rows (for trajectory export)."""
    states = np.empty((n_iters + 1, G.n))
    states[0] = np.asarray(x0, dtype=float)
    for k in range(1, n_iters + 1):
        states[k] = step(G, profile, pi, eps_step, states[k - 1])
        if not np.all(np.isfinite(states[k])):
            raise NonFiniteState(f"iterate {k} is non-finite; reduce eps_step")
    return states


def classify_first_bifurcation(summary: SpectralSummary, tol: float = 1e-9) -> str:
    """First bifurcation at the origin: "pitchfork" when pi1 < pi1d, else
    "period_doubling"; "degenerate" inside tol of the tie (not analyzed).

    Requires a summary computed with a step size (pi1d present).
    """
    if summary.pi1d is None:
        raise MissingPi1d("summary has no pi1d; compute thresholds with eps_step")
    gap = summary.pi1 - summary.pi1d
    if abs(gap) <= tol:
        return "degenerate"
    return "pitchfork" if gap < 0 else "period_doubling"


def violates_necessary_conditions(
    outcome: DtOutcome, summary: SpectralSummary, grid_tol: float = 0.0
) -> bool:
    """True when an outcome contradicts the threshold necessary conditions:
    a nonzero fixed point at pi <= pi1, or a period-2 cycle at pi <= pi1d."""
    if outcome.kind == "fixed_point" and outcome.norm_inf > 1e-6:
        if outcome.pi <= summary.pi1 + grid_tol:
            return True
    if outcome.kind == "period2":
        if summary.pi1d is None:
            raise MissingPi1d("summary has no pi1d; compute thresholds with eps_step")
        if outcome.pi <= summary.pi1d + grid_tol:
            return True
    return False
