"""Sparse multivariate trigonometric (Laurent) polynomials.

A ``TrigPoly`` of dimension n is a finite map ``k -> c_k`` from integer
n-tuples to real coefficients.  It stands both for the filter ``h(k) = c_k``
on Z^n and for its mask

    tau(omega) = sum_k c_k exp(-i k . omega).

Products of masks are convolutions of filters, ``reflect`` is complex
conjugation of the mask, and ``upsample_arg`` substitutes ``omega -> lam*omega``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

PRUNE_TOL = 1e-12
DEFAULT_MAX_ORDER = 10
DEFAULT_ROOT_TOL = 1e-8

MultiIndex = tuple[int, ...]


def _as_index(k: Iterable[int]) -> MultiIndex:
    return tuple(int(v) for v in k)


class TrigPoly:
    """Immutable sparse trigonometric polynomial with real coefficients."""

    __slots__ = ("_dim", "_terms")

    def __init__(self, dim: int, terms: Mapping[Sequence[int], float] | None = None,
                 prune: float = PRUNE_TOL):
        if dim < 1:
            raise ValueError(f"dimension must be >= 1, got {dim}")
        clean: dict[MultiIndex, float] = {}
        for k, c in (terms or {}).items():
            key = _as_index(k)
            if len(key) != dim:
                raise ValueError(f"index {key} does not have length {dim}")
            c = float(c)
            if abs(c) > prune:
                clean[key] = c
        self._dim = dim
        self._terms = clean

    # construction helpers

    @classmethod
    def zero(cls, dim: int) -> TrigPoly:
        return cls(dim)

    @classmethod
    def constant(cls, dim: int, c: float) -> TrigPoly:
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def monomial(cls, k: Sequence[int], c: float = 1.0) -> TrigPoly:
        """The mask ``c * exp(-i k . omega)``, i.e. the filter ``c * delta_k``."""
        k = _as_index(k)
        return cls(len(k), {k: c})

    @classmethod
    def from_dense(cls, array: np.ndarray, origin: Sequence[int]) -> TrigPoly:
        """Read a filter from a dense array whose entry ``origin`` sits at k = 0."""
        array = np.asarray(array, dtype=float)
        origin = np.asarray(origin, dtype=int)
        terms = {}
        for idx in zip(*np.nonzero(array)):
            terms[tuple(np.asarray(idx) - origin)] = array[idx]
        return cls(array.ndim, terms)

    # accessors

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def terms(self) -> dict[MultiIndex, float]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def __getitem__(self, k: Sequence[int]) -> float:
        return self._terms.get(_as_index(k), 0.0)

    def __len__(self) -> int:
        return len(self._terms)

    @property
    def nnz(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff_sum(self) -> float:
        return math.fsum(self._terms.values())

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self._terms.values()), default=0.0)

    def support_box(self) -> tuple[np.ndarray, np.ndarray]:
        """Componentwise (min, max) over the stored indices."""
        if not self._terms:
            z = np.zeros(self._dim, dtype=int)
            return z, z.copy()
        ks = np.array(list(self._terms), dtype=int)
        return ks.min(axis=0), ks.max(axis=0)

    def to_dense(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense array of the filter plus the array index of k = 0 offset.

        Returns ``(array, lo)`` where ``array[k - lo] == self[k]``.
        """
        lo, hi = self.support_box()
        out = np.zeros(tuple(hi - lo + 1))
        for k, c in self._terms.items():
            out[tuple(np.asarray(k) - lo)] = c
        return out, lo

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Index matrix (T x n) and coefficient vector (T,) in sorted order."""
        items = self.items()
        if not items:
            return np.zeros((0, self._dim), dtype=int), np.zeros(0)
        ks, cs = zip(*items)
        return np.array(ks, dtype=int), np.array(cs, dtype=float)

    # evaluation

    def eval(self, omega) -> complex | np.ndarray:
        """Evaluate the mask at one point (shape (n,)) or many (shape (..., n))."""
        w = np.asarray(omega, dtype=float)
        if w.shape[-1:] != (self._dim,):
            raise ValueError(f"frequency has trailing size {w.shape[-1:]}, expected {self._dim}")
        ks, cs = self.arrays()
        phase = np.exp(-1j * (w @ ks.T.astype(float)))
        val = phase @ cs
        return complex(val) if w.ndim == 1 else val

    __call__ = eval

    # arithmetic

    def _check(self, other: TrigPoly) -> None:
        if not isinstance(other, TrigPoly):
            raise TypeError(f"expected TrigPoly, got {type(other).__name__}")
        if other._dim != self._dim:
            raise ValueError(f"dimension mismatch: {self._dim} vs {other._dim}")

    def add(self, other: TrigPoly) -> TrigPoly:
        self._check(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0.0) + c
        return TrigPoly(self._dim, out)

    def scale(self, c: float) -> TrigPoly:
        return TrigPoly(self._dim, {k: c * v for k, v in self._terms.items()})

    def multiply(self, other: TrigPoly) -> TrigPoly:
        self._check(other)
        out: dict[MultiIndex, float] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0.0) + c1 * c2
        return TrigPoly(self._dim, out)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = TrigPoly.constant(self._dim, other)
        return self.add(other)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        if isinstance(other, (int, float)):
            other = TrigPoly.constant(self._dim, other)
        return self.add(-other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return self.scale(float(other))
        return self.multiply(other)

    def __rmul__(self, other):
        return self.scale(float(other))

    def __truediv__(self, c: float):
        return self.scale(1.0 / c)

    def __pow__(self, e: int) -> TrigPoly:
        if e < 0:
            raise ValueError("negative powers are not trigonometric polynomials")
        out = TrigPoly.constant(self._dim, 1.0)
        for _ in range(e):
            out = out.multiply(self)
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, TrigPoly) and self._dim == other._dim and self._terms == other._terms

    def __hash__(self):
        return hash((self._dim, frozenset(self._terms.items())))

    def allclose(self, other: TrigPoly, atol: float = 1e-10) -> bool:
        return (self - other).max_abs_coeff() <= atol

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {c:.6g}" for k, c in self.items())
        return f"TrigPoly(dim={self._dim}, {{{body}}})"

    # index maps

    def reflect(self) -> TrigPoly:
        """``k -> -k``; for real coefficients this conjugates the mask."""
        return TrigPoly(self._dim, {tuple(-a for a in k): c for k, c in self._terms.items()})

    def shift(self, v: Sequence[int]) -> TrigPoly:
        """Multiply the mask by ``exp(-i v . omega)`` (moves every tap by +v)."""
        v = _as_index(v)
        if len(v) != self._dim:
            raise ValueError(f"shift {v} does not have length {self._dim}")
        return TrigPoly(self._dim, {tuple(a + b for a, b in zip(k, v)): c
                                    for k, c in self._terms.items()})

    def upsample_arg(self, lam: int) -> TrigPoly:
        """The mask ``omega -> p(lam * omega)``: tap k moves to lam*k."""
        if lam < 1:
            raise ValueError(f"dilation must be >= 1, got {lam}")
        return TrigPoly(self._dim, {tuple(lam * a for a in k): c for k, c in self._terms.items()})

    def polyphase(self, nu: Sequence[int], lam: int) -> TrigPoly:
        """Polyphase component ``sum_k h(lam*k - nu) exp(-i k . omega)``."""
        if lam < 2:
            raise ValueError(f"dilation must be >= 2, got {lam}")
        nu = _as_index(nu)
        if len(nu) != self._dim:
            raise ValueError(f"coset representative {nu} does not have length {self._dim}")
        out = {}
        for k, c in self._terms.items():
            shifted = [a + b for a, b in zip(k, nu)]
            if all(s % lam == 0 for s in shifted):
                out[tuple(s // lam for s in shifted)] = c
        return TrigPoly(self._dim, out)


def upsample_arg(p: TrigPoly, lam: int) -> TrigPoly:
    return p.upsample_arg(lam)


def polyphase(p: TrigPoly, nu: Sequence[int], lam: int) -> TrigPoly:
    return p.polyphase(nu, lam)


def from_polyphase(components: Mapping[Sequence[int], TrigPoly], lam: int) -> TrigPoly:
    """Inverse of ``polyphase``: ``sum_nu comp_nu(lam*omega) exp(i nu . omega)``."""
    out = None
    for nu, comp in components.items():
        term = comp.upsample_arg(lam).shift([-a for a in nu])
        out = term if out is None else out + term
    if out is None:
        raise ValueError("no polyphase components given")
    return out


# frequency and coset sets


@dataclass(frozen=True)
class FrequencySet:
    """Aliasing frequencies ``2*pi*g/lam`` for ``g`` in ``{0..lam-1}^n``; row 0 is zero."""

    gamma_points: np.ndarray
    lam: int

    @classmethod
    def canonical(cls, n: int, lam: int) -> FrequencySet:
        if lam < 1:
            raise ValueError(f"dilation must be >= 1, got {lam}")
        gs = np.array(list(itertools.product(range(lam), repeat=n)), dtype=float)
        return cls(2 * np.pi * gs / lam, lam)

    def __len__(self) -> int:
        return len(self.gamma_points)

    def nonzero(self) -> np.ndarray:
        return self.gamma_points[1:]


def canonical_cosets(n: int, lam: int) -> list[MultiIndex]:
    """Representatives ``{0..lam-1}^n`` of Z^n / lam Z^n in lexicographic order."""
    return [tuple(g) for g in itertools.product(range(lam), repeat=n)]


def coset_of(k: Sequence[int], lam: int) -> MultiIndex:
    return tuple(int(a) % lam for a in k)


# root orders


def _derivative_multi_indices(n: int, r: int):
    for combo in itertools.combinations_with_replacement(range(n), r):
        alpha = [0] * n
        for axis in combo:
            alpha[axis] += 1
        yield alpha


def root_order_at(p: TrigPoly, omega0, max_order: int = DEFAULT_MAX_ORDER,
                  tol: float = DEFAULT_ROOT_TOL) -> int:
    """Order of the root of ``p`` at ``omega0``.

    The smallest r such that some order-r partial derivative
    ``sum_k c_k (-i k)^alpha exp(-i k . omega0)`` exceeds ``tol`` in modulus.
    Returns ``max_order + 1`` when every derivative up to ``max_order`` vanishes
    (including for the zero polynomial).
    """
    if max_order < 0:
        raise ValueError("max_order must be nonnegative")
    w = np.asarray(omega0, dtype=float)
    if w.shape != (p.dim,):
        raise ValueError(f"point has shape {w.shape}, expected ({p.dim},)")
    ks, cs = p.arrays()
    if len(cs) == 0:
        return max_order + 1
    weighted = cs * np.exp(-1j * (ks @ w))
    factors = -1j * ks.astype(float)
    for r in range(max_order + 1):
        for alpha in _derivative_multi_indices(p.dim, r):
            mono = np.prod(factors ** np.asarray(alpha), axis=1)
            if abs(np.sum(mono * weighted)) > tol:
                return r
    return max_order + 1


def vanishing_moments(p: TrigPoly, max_order: int = DEFAULT_MAX_ORDER,
                      tol: float = DEFAULT_ROOT_TOL) -> int:
    return root_order_at(p, np.zeros(p.dim), max_order, tol)


def accuracy(p: TrigPoly, lam: int, max_order: int = DEFAULT_MAX_ORDER,
             tol: float = DEFAULT_ROOT_TOL) -> int:
    """Minimum root order of ``p`` over the nonzero aliasing frequencies."""
    gammas = FrequencySet.canonical(p.dim, lam).nonzero()
    return min(root_order_at(p, g, max_order, tol) for g in gammas)


def flatness(p: TrigPoly, lam: int, max_order: int = DEFAULT_MAX_ORDER,
             tol: float = DEFAULT_ROOT_TOL) -> int:
    return vanishing_moments(p - lam ** (p.dim / 2), max_order, tol)


def root_order_c(p: TrigPoly, lam: int, max_order: int = DEFAULT_MAX_ORDER,
                 tol: float = DEFAULT_ROOT_TOL) -> int:
    """Root order at 0 of ``|p|^2 - lam^n``."""
    return vanishing_moments(p * p.reflect() - float(lam ** p.dim), max_order, tol)


def max_abs_diff(p: TrigPoly, q: TrigPoly) -> float:
    """Largest coefficient deviation between ``p`` and ``q``, without pruning."""
    p._check(q)
    keys = set(p._terms) | set(q._terms)
    return max((abs(p._terms.get(k, 0.0) - q._terms.get(k, 0.0)) for k in keys), default=0.0)
