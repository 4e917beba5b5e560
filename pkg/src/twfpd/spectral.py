"""Univariate Fejer-Riesz factorization via companion-matrix roots."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .trigpoly import TrigPoly

Orientation = Literal["min_phase", "max_phase"]
ORIENTATIONS = ("min_phase", "max_phase")

ROOT_CLUSTER_TOL = 1e-6
UNIT_CIRCLE_BAND = 1e-7


class SpectralFactorError(ValueError):
    """Raised when a trigonometric polynomial has no real spectral factor."""


@dataclass(frozen=True)
class CausalFactor:
    """``g(omega) = sum_{k=0}^{d} a_k exp(-i k omega)`` with real ``a_k``."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))
        if not self.coeffs:
            raise ValueError("a causal factor needs at least one coefficient")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_trigpoly(self, direction: Sequence[int] | None = None) -> TrigPoly:
        """The mask ``sum_k a_k exp(-i k (xi . omega))``; 1-D when ``direction`` is None."""
        xi = (1,) if direction is None else tuple(int(v) for v in direction)
        return TrigPoly(len(xi), {tuple(k * v for v in xi): a for k, a in enumerate(self.coeffs)})

    def __call__(self, u) -> complex | np.ndarray:
        z = np.exp(-1j * np.asarray(u, dtype=float))
        return np.polynomial.polynomial.polyval(z, np.asarray(self.coeffs))


def _laurent_coeffs(f: TrigPoly) -> tuple[int, np.ndarray]:
    if f.dim != 1:
        raise ValueError(f"spectral factorization needs a univariate polynomial, got dim {f.dim}")
    d = max((abs(k[0]) for k in f.terms), default=0)
    c = np.array([f[(k,)] for k in range(-d, d + 1)])
    return d, c


def _companion_roots(ascending: np.ndarray) -> np.ndarray:
    """Roots of ``sum_j ascending[j] z^j`` as eigenvalues of its companion matrix."""
    deg = len(ascending) - 1
    comp = np.zeros((deg, deg))
    comp[1:, :-1] = np.eye(deg - 1)
    comp[:, -1] = -ascending[:-1] / ascending[-1]
    return np.linalg.eigvals(comp)


def _pair_unit_roots(roots: np.ndarray) -> list[complex]:
    """Halve a multiset of unit-circle roots: adjacent (by angle) roots form pairs."""
    if len(roots) % 2:
        raise SpectralFactorError("no spectral factor: unit-circle root of odd multiplicity")
    # Start the angular sweep at the widest gap so that a cluster straddling
    # the branch cut at -1 is not split.
    order = np.argsort(np.angle(roots))
    ang = np.angle(roots)[order]
    gaps = np.diff(np.concatenate([ang, ang[:1] + 2 * np.pi]))
    start = (int(np.argmax(gaps)) + 1) % len(ang)
    order = np.roll(order, -start)
    kept = []
    for a, b in zip(order[0::2], order[1::2]):
        ra, rb = roots[a], roots[b]
        if abs(ra - rb) > ROOT_CLUSTER_TOL * max(1.0, abs(ra)):
            raise SpectralFactorError(
                "no spectral factor: unit-circle roots at "
                f"{ra:.6g} and {rb:.6g} do not pair up (odd multiplicity)")
        mid = 0.5 * (ra + rb)
        kept.append(mid / abs(mid))
    return kept


def hermitian_sqrt(f: TrigPoly, tol: float = 1e-9,
                   orientation: Orientation = "max_phase") -> CausalFactor:
    """Real causal ``g`` of degree d with ``|g(omega)|^2 = f(omega)``.

    ``f`` must be real, Hermitian (``c_{-k} = c_k``) and nonnegative on the
    torus.  The roots of ``z^d f(z)`` (``z = exp(-i omega)``) come in pairs
    ``{r, 1/r}``; ``orientation`` keeps ``|r| >= 1`` ("max_phase") or
    ``|r| <= 1`` ("min_phase").  Unit-circle roots contribute half their
    multiplicity.  The sign is fixed by ``g(0) >= 0``.
    """
    if orientation not in ORIENTATIONS:
        raise ValueError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")
    d, c = _laurent_coeffs(f)
    scale = max(np.max(np.abs(c)), 1.0) if len(c) else 1.0
    if np.max(np.abs(c - c[::-1]), initial=0.0) > tol * scale:
        raise ValueError("polynomial is not Hermitian: c_{-k} != c_k")
    grid = np.linspace(0.0, 2 * np.pi, 64 * (d + 1), endpoint=False)
    values = f.eval(grid[:, None]).real
    if values.min() < -tol * scale:
        raise SpectralFactorError(f"not nonnegative: minimum {values.min():.3g} on the sampling grid")
    if f.is_zero():
        return CausalFactor((0.0,))
    if d == 0:
        return CausalFactor((np.sqrt(c[0]),))

    roots = _companion_roots(c)
    on_circle = np.abs(np.abs(roots) - 1.0) < UNIT_CIRCLE_BAND
    kept = _pair_unit_roots(roots[on_circle]) if on_circle.any() else []
    off = roots[~on_circle]
    if orientation == "max_phase":
        kept.extend(off[np.abs(off) > 1.0])
    else:
        kept.extend(off[np.abs(off) < 1.0])
    if len(kept) != d:
        raise SpectralFactorError(
            f"no spectral factor: found {len(kept)} roots for a degree-{d} factor")

    monic = np.real(np.poly(np.array(kept))[::-1])  # ascending, leading 1
    g_unit = CausalFactor(tuple(monic))(grid)
    mag2 = np.abs(g_unit) ** 2
    gain = np.sqrt(np.dot(values, mag2) / np.dot(mag2, mag2))
    a = gain * monic
    s = a.sum()
    lead = a[np.flatnonzero(np.abs(a) > 0)[0]]
    if s < 0 or (abs(s) <= tol and lead < 0):
        a = -a
    return CausalFactor(tuple(a))


def half_angle_polynomial(m: int) -> TrigPoly:
    """``1 - ((1 - cos u)/2)^m`` as a univariate trigonometric polynomial."""
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    s = TrigPoly(1, {(0,): 0.5, (1,): -0.25, (-1,): -0.25})
    return 1.0 - s ** m


def half_angle_factor(m: int, orientation: Orientation = "max_phase") -> CausalFactor:
    """Degree-m factor ``b`` with ``|b(u)|^2 = 1 - sin^{2m}(u/2)`` and ``b(0) = 1``."""
    b = hermitian_sqrt(half_angle_polynomial(m), orientation=orientation)
    a = np.asarray(b.coeffs)
    return CausalFactor(tuple(a / a.sum()))


def autocorrelation(g: CausalFactor) -> TrigPoly:
    """``|g|^2`` as a trigonometric polynomial."""
    p = g.to_trigpoly()
    return p * p.reflect()
