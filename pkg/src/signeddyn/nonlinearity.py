"""Sigmoid nonlinearity families: odd, slope one at the origin, saturating at ±1,
concave on the positive axis. Profiles bundle the map with its first two
derivatives, its inverse on (-1, 1), and its antiderivative (used by the
Lyapunov diagnostics); all closures are analytically consistent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import UnknownKind


def _tanh_family(p: float) -> dict:
    return {
        "psi": np.tanh,
        "dpsi": lambda x: 1.0 - np.tanh(x) ** 2,
        "d2psi": lambda x: -2.0 * np.tanh(x) * (1.0 - np.tanh(x) ** 2),
        "inv": np.arctanh,
        # log cosh, overflow-safe
        "anti": lambda x: np.abs(x) + np.log1p(np.exp(-2.0 * np.abs(x))) - np.log(2.0),
    }


def _rational1_family(p: float) -> dict:
    return {
        "psi": lambda x: x / (1.0 + np.abs(x)),
        "dpsi": lambda x: 1.0 / (1.0 + np.abs(x)) ** 2,
        "d2psi": lambda x: -2.0 * np.sign(x) / (1.0 + np.abs(x)) ** 3,
        "inv": lambda y: y / (1.0 - np.abs(y)),
        "anti": lambda x: np.abs(x) - np.log1p(np.abs(x)),
    }


def _rational2_family(p: float) -> dict:
    return {
        "psi": lambda x: x / np.sqrt(1.0 + x * x),
        "dpsi": lambda x: (1.0 + x * x) ** -1.5,
        "d2psi": lambda x: -3.0 * x * (1.0 + x * x) ** -2.5,
        "inv": lambda y: y / np.sqrt(1.0 - y * y),
        "anti": lambda x: np.sqrt(1.0 + x * x) - 1.0,
    }


def _family(kind: str, p: float) -> dict:
    if kind == "tanh":
        return _tanh_family(p)
    if kind == "rational":
        if p == 1.0:
            return _rational1_family(p)
        if p == 2.0:
            return _rational2_family(p)
        raise UnknownKind(f"rational sigmoid supports p in {{1, 2}}, got {p}")
    raise UnknownKind(f"unknown nonlinearity kind {kind!r}")


@dataclass(frozen=True)
class NonlinearityProfile:
    """Per-agent sigmoid maps with derivatives, inverse, and antiderivative.

    A single (kind, p) pair applies to every agent and accepts vectors of any
    length; heterogeneous profiles pin the agent count.
    """

    kinds: Tuple[str, ...]
    ps: Tuple[float, ...]

    @property
    def homogeneous(self) -> bool:
        return len(self.kinds) == 1

    @property
    def n_agents(self) -> Optional[int]:
        return None if self.homogeneous else len(self.kinds)

    def _apply(self, fname: str, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=complex if np.iscomplexobj(x) else float)
        if self.homogeneous:
            return _family(self.kinds[0], self.ps[0])[fname](x)
        if x.shape != (len(self.kinds),):
            raise ValueError(
                f"heterogeneous profile expects vectors of length {len(self.kinds)}"
            )
        out = np.empty_like(x)
        for key in set(zip(self.kinds, self.ps)):
            mask = np.array([kp == key for kp in zip(self.kinds, self.ps)])
            out[mask] = _family(*key)[fname](x[mask])
        return out

    def psi(self, x):
        return self._apply("psi", x)

    def dpsi(self, x):
        return self._apply("dpsi", x)

    def d2psi(self, x):
        return self._apply("d2psi", x)

    def inv(self, y):
        return self._apply("inv", y)

    def antiderivative(self, x):
        return self._apply("anti", x)


def make_profile(
    kind: Union[str, Sequence[str]] = "tanh",
    params: Optional[dict] = None,
    n: Optional[int] = None,
) -> NonlinearityProfile:
    """Build a profile; kind is a family name or a per-agent sequence of names.

    params may carry {"p": 1 or 2} for the rational family. When kind is a
    sequence, n (if given) must match its length.
    """
    p = float((params or {}).get("p", 1.0))
    if isinstance(kind, str):
        _family(kind, p)  # validate now
        return NonlinearityProfile(kinds=(kind,), ps=(p,))
    kinds = tuple(kind)
    if n is not None and n != len(kinds):
        raise UnknownKind(f"kind list has length {len(kinds)} but n={n}")
    for k in kinds:
        _family(k, p)
    return NonlinearityProfile(kinds=kinds, ps=(p,) * len(kinds))


@dataclass(frozen=True)
class ProfileReport:
    """Sampled validation of the sigmoid assumptions on a symmetric grid."""

    odd_ok: bool
    slope_ok: bool
    saturation_ok: bool
    concavity_ok: bool
    inverse_ok: bool
    derivative_fd_ok: bool
    max_fd_rel_error: float

    @property
    def passed(self) -> bool:
        return (
            self.odd_ok
            and self.slope_ok
            and self.saturation_ok
            and self.concavity_ok
            and self.inverse_ok
            and self.derivative_fd_ok
        )


def validate_profile(
    profile,
    half_range: float = 6.0,
    num: int = 2001,
    fd_rel_tol: float = 1e-6,
) -> ProfileReport:
    """Check oddness, slope, saturation, concavity, inverse consistency, and the
    analytic derivative against central finite differences on a grid.

    profile may be any object exposing psi/dpsi/d2psi/inv; failures are
    reported, never raised. The finite-difference comparison is restricted to
    points away from saturation (|psi| < 0.999).
    """
    if num < 1000:
        raise ValueError("validation grid needs at least 1000 points")
    x = np.linspace(-half_range, half_range, num)
    psi = np.asarray(profile.psi(x), dtype=float)
    dpsi = np.asarray(profile.dpsi(x), dtype=float)

    odd_ok = bool(np.max(np.abs(psi + profile.psi(-x))) <= 1e-12)
    slope0 = float(profile.dpsi(np.zeros(1))[0])
    slope_ok = bool(np.all(dpsi > 0.0) and abs(slope0 - 1.0) <= 1e-9)
    far = float(profile.psi(np.array([1e8]))[0])  # limit check, not grid-bound
    saturation_ok = bool(np.all(np.abs(psi) < 1.0) and far >= 1.0 - 1e-6)
    pos = x > 0
    concavity_ok = bool(np.all(np.asarray(profile.d2psi(x), dtype=float)[pos] < 0.0))

    inside = np.abs(psi) < 1.0 - 1e-12
    roundtrip = np.asarray(profile.inv(psi[inside]), dtype=float)
    inverse_ok = bool(
        np.max(np.abs(roundtrip - x[inside]) / (1.0 + np.abs(x[inside]))) <= 1e-8
    )

    h = 1e-5
    fd = (np.asarray(profile.psi(x + h)) - np.asarray(profile.psi(x - h))) / (2.0 * h)
    # central differences need psi'' continuous across the stencil: skip points
    # straddling the origin (families with |x| terms kink there) and saturation
    mask = (np.abs(psi) < 0.999) & (np.abs(x) > 10.0 * h)
    rel = np.abs(fd - dpsi)[mask] / np.maximum(np.abs(dpsi[mask]), 1e-12)
    max_rel = float(rel.max()) if mask.any() else 0.0
    return ProfileReport(
        odd_ok=odd_ok,
        slope_ok=slope_ok,
        saturation_ok=saturation_ok,
        concavity_ok=concavity_ok,
        inverse_ok=inverse_ok,
        derivative_fd_ok=max_rel <= fd_rel_tol,
        max_fd_rel_error=max_rel,
    )
