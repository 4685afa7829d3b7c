"""Effort-parameter sweeps and bifurcation-diagram data.

A sweep walks an increasing pi grid, records one branch entry per equilibrium
(continuous time) or per terminal attractor (discrete time), and keeps branch
identities by nearest-neighbour matching with ±-orbit folding. Estimated
onsets bracket the grid cell where a transition happens; the analytic
thresholds ride along for comparison.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .dynamics_ct import EquilibriumSet, find_equilibria, sample_l1_ball
from .dynamics_dt import DtOutcome, simulate
from .errors import NoTransition
from .graph import SignedGraph
from .nonlinearity import NonlinearityProfile
from .spectra import SpectralSummary, thresholds

ZERO_TOL = 1e-6


@dataclass(frozen=True)
class BranchRecord:
    """One branch sample at a grid point."""

    branch_id: int
    kind: str  # equilibrium | fixed_point | period2
    state: np.ndarray
    norm1: float
    norm2: float
    stability: str = ""
    amplitude: float = 0.0

    @property
    def norm_inf(self) -> float:
        return float(np.max(np.abs(self.state)))


@dataclass(frozen=True)
class SweepCell:
    pi: float
    records: Tuple[BranchRecord, ...]
    undecided: int = 0


@dataclass(frozen=True)
class SweepResult:
    grid: np.ndarray
    cells: Tuple[SweepCell, ...]
    summary: SpectralSummary
    mode: str
    onsets: dict = field(default_factory=dict)

    def to_csv(self, path: str) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["pi", "branch", "norm1", "norm2", "stability", "kind"])
            for cell in self.cells:
                for r in cell.records:
                    writer.writerow(
                        [
                            format(cell.pi, ".17g"),
                            r.branch_id,
                            format(r.norm1, ".17g"),
                            format(r.norm2, ".17g"),
                            r.stability,
                            r.kind,
                        ]
                    )

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "grid": [float(p) for p in self.grid],
            "thresholds": self.summary.to_dict(),
            "onsets": dict(self.onsets),
            "branch_counts": [len(c.records) for c in self.cells],
        }


def _fold(state: np.ndarray, zero_tol: float = ZERO_TOL) -> np.ndarray:
    """Canonical representative of the ± orbit: first significant entry positive."""
    for v in state:
        if abs(v) > zero_tol:
            return state if v > 0 else -state
    return state


class _BranchRegistry:
    """Nearest-neighbour branch matcher over folded representatives."""

    def __init__(self) -> None:
        self.last: List[np.ndarray] = []

    def assign(self, states: Sequence[np.ndarray]) -> List[int]:
        folded = [_fold(s) for s in states]
        order = sorted(range(len(folded)), key=lambda i: float(np.abs(folded[i]).sum()))
        ids = [-1] * len(folded)
        claimed = set()
        for i in order:
            best, best_d = -1, np.inf
            for b, rep in enumerate(self.last):
                if b in claimed:
                    continue
                d = float(np.max(np.abs(folded[i] - rep)))
                if d < best_d:
                    best, best_d = b, d
            radius = 0.25 * (1.0 + float(np.max(np.abs(folded[i]))))
            if best >= 0 and best_d <= radius:
                ids[i] = best
                claimed.add(best)
                self.last[best] = folded[i]
            else:
                ids[i] = len(self.last)
                self.last.append(folded[i])
        return ids


def sweep_ct(
    G: SignedGraph,
    profile: NonlinearityProfile,
    grid: Sequence[float],
    seeds_per_point: int = 20,
    seed: Optional[int] = None,
    classify: bool = True,
    probe_states: Optional[Sequence[np.ndarray]] = None,
    newton_tol: float = 1e-10,
) -> SweepResult:
    """Equilibrium branches along an increasing pi grid.

    Each cell warm-starts Newton from the previous cell's equilibria plus any
    caller-supplied probe states (useful near symmetry-born branches), then
    adds fresh random seeds; continuation alone misses branches born at the
    second threshold.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing and nonempty")
    summary = thresholds(G)
    rng = np.random.default_rng(seed)
    registry = _BranchRegistry()
    cells: List[SweepCell] = []
    prev_states: List[np.ndarray] = []
    for pi in grid:
        warm = list(prev_states) + [np.asarray(p, float) for p in probe_states or []]
        eq: EquilibriumSet = find_equilibria(
            G,
            profile,
            float(pi),
            n_seeds=seeds_per_point,
            seed=int(rng.integers(2**63)),
            warm_starts=warm,
            newton_tol=newton_tol,
        )
        if not classify:
            pass  # records keep the labels computed by find_equilibria anyway
        ids = registry.assign(eq.states)
        records = tuple(
            BranchRecord(
                branch_id=ids[i],
                kind="equilibrium",
                state=r.state,
                norm1=r.norm1,
                norm2=r.norm2,
                stability=r.stability,
            )
            for i, r in enumerate(eq.records)
        )
        cells.append(SweepCell(pi=float(pi), records=records))
        prev_states = [r.state for r in eq.records]
    result = SweepResult(
        grid=grid, cells=tuple(cells), summary=summary, mode="ct", onsets={}
    )
    result.onsets.update(_all_onsets(result))
    return result


def _dedup_outcomes(
    outcomes: List[DtOutcome], radius: float = 1e-5
) -> Tuple[List[np.ndarray], List[Tuple[np.ndarray, np.ndarray]]]:
    fixed: List[np.ndarray] = []
    cycles: List[Tuple[np.ndarray, np.ndarray]] = []
    for out in outcomes:
        if out.kind == "fixed_point":
            if not any(np.max(np.abs(out.state - y)) <= radius for y in fixed):
                fixed.append(out.state)
        elif out.kind == "period2":
            a, b = out.pair
            dup = False
            for c, d in cycles:
                for p, q in ((c, d), (d, c), (-c, -d), (-d, -c)):
                    if (
                        np.max(np.abs(a - p)) <= radius
                        and np.max(np.abs(b - q)) <= radius
                    ):
                        dup = True
                        break
                if dup:
                    break
            if not dup:
                cycles.append((a, b))
    return fixed, cycles


def sweep_dt(
    G: SignedGraph,
    profile: NonlinearityProfile,
    grid: Sequence[float],
    eps_step: float,
    seeds_per_point: int = 6,
    seed: Optional[int] = None,
    max_iters: int = 20000,
    tol: float = 1e-9,
) -> SweepResult:
    """Discrete-map attractors along a pi grid: fixed-point branches plus
    period-2 branches with their oscillation amplitude.

    Each cell iterates from fresh random starts and from the previous cell's
    fixed points; undecided runs are counted per cell, not recorded as
    branches.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing and nonempty")
    summary = thresholds(G, eps_step=eps_step)
    rng = np.random.default_rng(seed)
    registry = _BranchRegistry()
    cells: List[SweepCell] = []
    prev_fixed: List[np.ndarray] = []
    for pi in grid:
        starts = [sample_l1_ball(rng, G.n, float(pi) * G.n) for _ in range(seeds_per_point)]
        starts.extend(prev_fixed)
        outcomes = []
        undecided = 0
        for x0 in starts:
            out = simulate(G, profile, float(pi), eps_step, x0, max_iters=max_iters, tol=tol)
            if out.kind == "undecided":
                undecided += 1
            else:
                outcomes.append(out)
        fixed, cycles = _dedup_outcomes(outcomes)
        reps = fixed + [c[0] for c in cycles]
        ids = registry.assign(reps)
        records = []
        for i, x in enumerate(fixed):
            records.append(
                BranchRecord(
                    branch_id=ids[i],
                    kind="fixed_point",
                    state=x,
                    norm1=float(np.abs(x).sum()),
                    norm2=float(np.sqrt((x**2).sum())),
                )
            )
        for j, (a, b) in enumerate(cycles):
            records.append(
                BranchRecord(
                    branch_id=ids[len(fixed) + j],
                    kind="period2",
                    state=a,
                    norm1=float(np.abs(a).sum()),
                    norm2=float(np.sqrt((a**2).sum())),
                    amplitude=0.5 * float(np.max(np.abs(a - b))),
                )
            )
        cells.append(SweepCell(pi=float(pi), records=tuple(records), undecided=undecided))
        prev_fixed = fixed
    result = SweepResult(
        grid=grid, cells=tuple(cells), summary=summary, mode="dt", onsets={}
    )
    result.onsets.update(_all_onsets(result))
    return result


def _cell_predicate(cell: SweepCell, which: str) -> bool:
    if which == "nontrivial":
        return any(
            r.kind in ("equilibrium", "fixed_point") and r.norm_inf > ZERO_TOL
            for r in cell.records
        )
    if which == "multi":
        return sum(1 for r in cell.records if r.kind in ("equilibrium", "fixed_point")) > 3
    if which == "cycle":
        return any(r.kind == "period2" for r in cell.records)
    raise ValueError(f"unknown transition kind {which!r}")


def estimate_onset(result: SweepResult, which: str) -> float:
    """Midpoint of the first grid cell where the requested transition happens.

    which is "nontrivial" (first nonzero branch), "multi" (more than three
    equilibria), or "cycle" (first period-2 branch). The error bound is the
    cell width. Raises NoTransition when no false-to-true flip is inside the
    grid.
    """
    flags = [_cell_predicate(c, which) for c in result.cells]
    for i in range(1, len(flags)):
        if flags[i] and not flags[i - 1]:
            return 0.5 * (float(result.grid[i - 1]) + float(result.grid[i]))
    raise NoTransition(f"sweep has no {which} transition inside the grid")


def _all_onsets(result: SweepResult) -> dict:
    onsets = {}
    for which in ("nontrivial", "multi", "cycle"):
        try:
            onsets[which] = estimate_onset(result, which)
        except NoTransition:
            onsets[which] = None
    return onsets
