"""Signed graphs: construction, validation, switching, scaling, random ensembles.

A signed graph is stored as a symmetric weighted adjacency matrix with zero
diagonal whose nonzero pattern is connected. Degrees are absolute row sums and
are strictly positive. Graphs and operator bundles are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

import csv
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BadSignatureLength,
    CannotConnect,
    ConfigError,
    DisconnectedGraph,
    DuplicateEdge,
    NoConvergence,
    SelfLoop,
    ZeroWeight,
)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SignedGraph:
    """Undirected connected signed graph without self-loops.

    Attributes
    ----------
    n : int
        Vertex count (>= 2).
    weights : (n, n) ndarray
        Symmetric signed adjacency matrix, zero diagonal. Read-only.
    degrees : (n,) ndarray
        Absolute row sums, all strictly positive. Read-only.
    meta : dict
        Free-form provenance (generator parameters, file origin, ...).
    """

    n: int
    weights: np.ndarray
    degrees: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.weights, 1)))

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        """Yield (i, j, weight) for every undirected edge with i < j."""
        ii, jj = np.nonzero(np.triu(self.weights, 1))
        for i, j in zip(ii.tolist(), jj.tolist()):
            yield i, j, float(self.weights[i, j])

    @property
    def max_degree(self) -> float:
        return float(self.degrees.max())

    def is_degree_regular(self, rel_tol: float = 1e-8) -> bool:
        """True when all degrees agree (Delta = delta*I) within rel_tol."""
        d = self.degrees
        return bool(np.max(np.abs(d - d.mean())) <= rel_tol * max(1.0, abs(d.mean())))


@dataclass(frozen=True)
class OperatorBundle:
    """Canonical matrices of a signed graph.

    laplacian               L  = Delta - A
    normalized_laplacian    I - Delta^{-1} A   (real spectrum in [0, 2])
    interaction             H  = Delta^{-1} A
    symmetrized_interaction Hs = Delta^{-1/2} A Delta^{-1/2}, similar to H
    """

    laplacian: np.ndarray
    normalized_laplacian: np.ndarray
    interaction: np.ndarray
    symmetrized_interaction: np.ndarray


def _is_connected(adjacency: np.ndarray) -> bool:
    n = adjacency.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in np.nonzero(adjacency[u])[0]:
            if not seen[v]:
                seen[v] = True
                queue.append(int(v))
    return bool(seen.all())


def from_adjacency(A: np.ndarray, meta: Optional[dict] = None) -> SignedGraph:
    """Build a SignedGraph from a dense symmetric matrix, validating invariants."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ConfigError("adjacency must be a square matrix")
    n = A.shape[0]
    if n < 2:
        raise ConfigError("a signed graph needs at least 2 vertices")
    if not np.array_equal(A, A.T):
        raise ConfigError("adjacency must be exactly symmetric")
    if np.any(np.diag(A) != 0.0):
        raise SelfLoop("adjacency diagonal must be zero")
    if not np.all(np.isfinite(A)):
        raise ConfigError("adjacency contains non-finite weights")
    if not _is_connected(A != 0.0):
        raise DisconnectedGraph("graph of nonzero weights is not connected")
    degrees = np.abs(A).sum(axis=1)
    return SignedGraph(n=n, weights=_freeze(A), degrees=_freeze(degrees), meta=dict(meta or {}))


def build_graph(n: int, edges: Iterable[Tuple[int, int, float]]) -> SignedGraph:
    """Construct a signed graph from an undirected edge list.

    Raises SelfLoop, DuplicateEdge, ZeroWeight, or DisconnectedGraph on
    invalid input. Edges are symmetrized into dense storage.
    """
    if n < 2:
        raise ConfigError("vertex count must be >= 2")
    A = np.zeros((n, n), dtype=float)
    seen = set()
    for i, j, w in edges:
        i, j, w = int(i), int(j), float(w)
        if not (0 <= i < n and 0 <= j < n):
            raise ConfigError(f"edge ({i},{j}) out of range for n={n}")
        if i == j:
            raise SelfLoop(f"self-loop at vertex {i}")
        if w == 0.0:
            raise ZeroWeight(f"edge ({i},{j}) has zero weight")
        key = (min(i, j), max(i, j))
        if key in seen:
            raise DuplicateEdge(f"edge ({i},{j}) supplied twice")
        seen.add(key)
        A[i, j] = w
        A[j, i] = w
    return from_adjacency(A)


def derive_operators(G: SignedGraph) -> OperatorBundle:
    """Compute L, the normalized Laplacian, H and its symmetrization."""
    A = G.weights
    d = G.degrees
    L = np.diag(d) - A
    H = A / d[:, None]
    Ln = np.eye(G.n) - H
    inv_sqrt = 1.0 / np.sqrt(d)
    Hs = A * np.outer(inv_sqrt, inv_sqrt)
    Hs = 0.5 * (Hs + Hs.T)  # kill last-bit asymmetry from the two divisions
    return OperatorBundle(
        laplacian=_freeze(L),
        normalized_laplacian=_freeze(Ln),
        interaction=_freeze(H),
        symmetrized_interaction=_freeze(Hs),
    )


def is_structurally_balanced(G: SignedGraph) -> Tuple[bool, Optional[np.ndarray]]:
    """Sign-consistent 2-coloring test via BFS; exact, independent of spectra.

    Returns (True, signature) where the signature s satisfies
    s_i * s_j * sign(a_ij) > 0 on every edge (s_0 = +1), or (False, None).
    """
    s = np.zeros(G.n, dtype=int)
    s[0] = 1
    queue = deque([0])
    A = G.weights
    while queue:
        u = queue.popleft()
        for v in np.nonzero(A[u])[0]:
            want = s[u] * (1 if A[u, v] > 0 else -1)
            if s[v] == 0:
                s[v] = want
                queue.append(int(v))
            elif s[v] != want:
                return False, None
    return True, s.astype(float)


def switch(G: SignedGraph, s: Sequence[float]) -> SignedGraph:
    """Gauge transformation a'_ij = s_i * a_ij * s_j for a ±1 signature s.

    Degrees are unchanged; the spectrum and the frustration index are
    invariant under switching.
    """
    s = np.asarray(s, dtype=float).ravel()
    if s.shape != (G.n,):
        raise BadSignatureLength(f"signature length {s.size} != n={G.n}")
    if not np.all(np.abs(s) == 1.0):
        raise BadSignatureLength("signature entries must be exactly ±1")
    A = G.weights * np.outer(s, s)
    return from_adjacency(A, meta=dict(G.meta, switched=True))


def regularize_degrees(
    G: SignedGraph,
    target_degree: float = 1.0,
    tol: float = 1e-10,
    max_iter: int = 5000,
) -> SignedGraph:
    """Symmetric diagonal scaling of |A| to constant row sums (Sinkhorn-style).

    Returns a graph with weights d_i * a_ij * d_j whose absolute row sums all
    equal target_degree within tol, so the normalized Laplacian of the result
    is symmetric. Signs and symmetry are preserved. Raises NoConvergence when
    the support of |A| does not admit such a scaling (e.g. stars).
    """
    if target_degree <= 0:
        raise ConfigError("target degree must be positive")
    if tol <= 0:
        raise ConfigError("tolerance must be positive")
    absA = np.abs(G.weights)
    d = np.ones(G.n)
    for _ in range(max_iter):
        rows = d * (absA @ d)
        if np.max(np.abs(rows - target_degree)) <= tol:
            A = G.weights * np.outer(d, d)
            return from_adjacency(A, meta=dict(G.meta, regularized=target_degree))
        d *= np.sqrt(target_degree / rows)
    raise NoConvergence(
        f"degree regularization did not reach tol={tol} in {max_iter} iterations"
    )


def random_signed_graph(
    n: int,
    edge_prob: float,
    negative_prob: float,
    weight_low: float = 0.0,
    weight_high: float = 1.0,
    seed: Optional[int] = None,
    max_retries: int = 100,
) -> SignedGraph:
    """Erdős–Rényi-style signed graph with uniform weight magnitudes.

    Magnitudes are uniform on (weight_low, weight_high]; each present edge is
    negated independently with probability negative_prob. Regenerates until
    connected (same seed stream), raising CannotConnect when the retry budget
    runs out. The weight range is recorded in the graph metadata.
    """
    if not (0 < edge_prob <= 1):
        raise ConfigError("edge probability must be in (0, 1]")
    if not (0 <= negative_prob <= 1):
        raise ConfigError("negative probability must be in [0, 1]")
    if not (0 <= weight_low < weight_high):
        raise ConfigError("need 0 <= weight_low < weight_high")
    if n < 2:
        raise ConfigError("vertex count must be >= 2")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    m = iu.size
    for attempt in range(max_retries):
        present = rng.random(m) < edge_prob
        mags = weight_high - rng.random(m) * (weight_high - weight_low)
        negative = rng.random(m) < negative_prob
        w = np.where(negative, -mags, mags) * present
        A = np.zeros((n, n))
        A[iu, ju] = w
        A[ju, iu] = w
        if np.count_nonzero(w) >= n - 1 and _is_connected(A != 0.0):
            meta = {
                "generator": "erdos_renyi_signed",
                "n": n,
                "edge_prob": edge_prob,
                "negative_prob": negative_prob,
                "weight_low": weight_low,
                "weight_high": weight_high,
                "seed": seed,
                "attempt": attempt,
            }
            return from_adjacency(A, meta=meta)
    raise CannotConnect(
        f"no connected graph after {max_retries} draws (n={n}, p={edge_prob})"
    )


# -- file formats --------------------------------------------------------------


def save_graph_json(G: SignedGraph, path: str) -> None:
    """Write {n, edges: [[i, j, w], ...], meta} as JSON."""
    payload = {
        "n": G.n,
        "edges": [[i, j, w] for i, j, w in G.edges()],
        "meta": {k: v for k, v in G.meta.items() if _json_safe(v)},
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def _json_safe(v) -> bool:
    return isinstance(v, (str, int, float, bool, type(None)))


def load_graph_json(path: str) -> SignedGraph:
    """Load the JSON graph format; raises ConfigError with field diagnostics."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(payload, dict) or "n" not in payload or "edges" not in payload:
        raise ConfigError(f"{path}: graph JSON needs fields 'n' and 'edges'")
    try:
        G = build_graph(int(payload["n"]), [tuple(e) for e in payload["edges"]])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: malformed edge entry: {exc}") from exc
    meta = payload.get("meta") or {}
    if not isinstance(meta, dict):
        raise ConfigError(f"{path}: 'meta' must be an object")
    return SignedGraph(G.n, G.weights, G.degrees, meta=dict(meta, source=path))


def load_graph_csv(path: str) -> SignedGraph:
    """Load a 0-based `i,j,w` edge list; n is inferred from the largest index."""
    edges = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 3:
                raise ConfigError(f"{path}:{lineno}: expected 'i,j,w'")
            try:
                edges.append((int(row[0]), int(row[1]), float(row[2])))
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
    if not edges:
        raise ConfigError(f"{path}: no edges found")
    n = 1 + max(max(i, j) for i, j, _ in edges)
    G = build_graph(n, edges)
    return SignedGraph(G.n, G.weights, G.degrees, meta={"source": path})
