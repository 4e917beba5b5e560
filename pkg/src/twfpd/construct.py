"""Tight wavelet filter banks with prescribed directions.

Given directions ``xi_l`` (with initial points ``zeta_l``), vanishing moment
counts ``m_l``, an integer dilation ``lam`` and coset representatives
``nu_1..nu_{lam^n}``, the bank consists of

* the lowpass mask
  ``tau = sum_{l<=N} lam^{-n/2} p_l(lam w) e^{i nu_l w} + sum_{l>N} lam^{-n/2} e^{i nu_l w}``,
* directional masks ``q_D,l = tau(w) g_l(lam w)`` with
  ``g_l = lam^{-n/2} 2^{-m_l} e^{-i m_l zeta_l w} (1 - e^{-i xi_l w})^{m_l}``,
* complementary masks ``q_C,mu = e^{i nu_mu w} - lam^{-n/2} tau(w) conj(p_mu(lam w))``
  (``p_mu = 1`` for ``mu > N``),

where ``p_l(w) = b_{m_l}(xi_l . w)`` and ``|b_m(u)|^2 = 1 - sin^{2m}(u/2)``.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .spectral import ORIENTATIONS, CausalFactor, half_angle_factor
from .trigpoly import (
    MultiIndex,
    TrigPoly,
    accuracy,
    canonical_cosets,
    coset_of,
    flatness,
    max_abs_diff,
    root_order_c,
    vanishing_moments,
)

DEFAULT_TOL = 1e-9


class ConfigError(ValueError):
    """Invalid bank configuration."""


@dataclass(frozen=True)
class DirectionSpec:
    """A prescribed direction ``xi`` starting at ``zeta`` with ``m`` vanishing moments."""

    xi: MultiIndex
    zeta: MultiIndex | None = None
    m: int = 1

    def __post_init__(self):
        xi = tuple(int(v) for v in self.xi)
        zeta = tuple(0 for _ in xi) if self.zeta is None else tuple(int(v) for v in self.zeta)
        if not xi:
            raise ConfigError("direction xi must have at least one component")
        if not any(xi):
            raise ConfigError("direction xi must be nonzero")
        if len(zeta) != len(xi):
            raise ConfigError(f"zeta {zeta} and xi {xi} have different lengths")
        if int(self.m) < 1:
            raise ConfigError(f"vanishing moments m must be >= 1, got {self.m}")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "zeta", zeta)
        object.__setattr__(self, "m", int(self.m))

    @property
    def eta(self) -> MultiIndex:
        """Terminal point ``zeta + xi``."""
        return tuple(a + b for a, b in zip(self.zeta, self.xi))


def check_coset_reps(reps: Sequence[Sequence[int]], n: int, lam: int) -> None:
    """Raise ``ConfigError`` unless ``reps`` is a complete residue system mod ``lam``."""
    if len(reps) != lam ** n:
        raise ConfigError(f"coset_reps must have lam^n = {lam ** n} entries, got {len(reps)}")
    seen: dict[MultiIndex, int] = {}
    for i, nu in enumerate(reps):
        if len(nu) != n:
            raise ConfigError(f"coset_reps[{i}] = {tuple(nu)} does not have length {n}")
        c = coset_of(nu, lam)
        if c in seen:
            raise ConfigError(
                f"coset_reps[{i}] = {tuple(nu)} is congruent to coset_reps[{seen[c]}] mod {lam}")
        seen[c] = i
    # distinct and lam^n many, hence complete and containing the zero coset


def default_coset_reps(n: int, lam: int, directions: Sequence[DirectionSpec]) -> list[MultiIndex]:
    """Greedy coset representatives: prefer ``xi_l``, then ``eta_l``, then ``zeta_l``.

    Directions whose candidates all land in claimed cosets get the canonical
    representative (in ``{0..lam-1}^n``) of the first unclaimed coset; the
    remaining slots are filled the same way.
    """
    if len(directions) > lam ** n:
        raise ConfigError(f"too many directions: N = {len(directions)} > lam^n = {lam ** n}")
    claimed: set[MultiIndex] = set()
    reps: list[MultiIndex | None] = []
    for d in directions:
        pick = None
        for cand in (d.xi, d.eta, d.zeta):
            if coset_of(cand, lam) not in claimed:
                pick = cand
                break
        if pick is not None:
            claimed.add(coset_of(pick, lam))
        reps.append(pick)
    free = [c for c in canonical_cosets(n, lam) if c not in claimed]
    free_iter = iter(free)
    out = [r if r is not None else next(free_iter) for r in reps]
    out.extend(free_iter)
    return out


@dataclass(frozen=True)
class BankConfig:
    n: int
    lam: int
    directions: tuple[DirectionSpec, ...]
    coset_reps: tuple[MultiIndex, ...] | None = None
    orientation: str = "max_phase"

    def __post_init__(self):
        n, lam = int(self.n), int(self.lam)
        if n < 1:
            raise ConfigError(f"n must be >= 1, got {n}")
        if lam < 2:
            raise ConfigError(f"lambda must be an integer >= 2, got {lam}")
        dirs = tuple(self.directions)
        if not dirs:
            raise ConfigError("at least one direction is required")
        for i, d in enumerate(dirs):
            if len(d.xi) != n:
                raise ConfigError(f"directions[{i}].xi = {d.xi} does not have length n = {n}")
        if len(dirs) > lam ** n:
            raise ConfigError(f"too many directions: N = {len(dirs)} > lam^n = {lam ** n}")
        if self.orientation not in ORIENTATIONS:
            raise ConfigError(f"orientation must be one of {ORIENTATIONS}, got {self.orientation!r}")
        if self.coset_reps is None:
            reps = tuple(default_coset_reps(n, lam, dirs))
        else:
            reps = tuple(tuple(int(v) for v in nu) for nu in self.coset_reps)
        check_coset_reps(reps, n, lam)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "coset_reps", reps)

    @property
    def N(self) -> int:
        return len(self.directions)


@dataclass(frozen=True)
class FilterBank:
    """Lowpass ``tau`` with directional ``q_D`` and complementary ``q_C`` masks.

    ``g`` holds the masks of the highpass filters ``h_l`` (so that
    ``q_D[l] = tau * g[l](lam w)``) and ``p`` the directional lowpass factors;
    ``p`` is empty for banks built by ``build_from_sos``.
    """

    tau: TrigPoly
    g: tuple[TrigPoly, ...]
    p: tuple[TrigPoly, ...]
    q_D: tuple[TrigPoly, ...]
    q_C: tuple[TrigPoly, ...]
    lam: int
    coset_reps: tuple[MultiIndex, ...]
    config: BankConfig | None = None

    @property
    def n(self) -> int:
        return self.tau.dim

    @property
    def N(self) -> int:
        return len(self.q_D)

    def wavelet_masks(self) -> list[tuple[str, TrigPoly]]:
        out = [(f"q_D{l + 1}", q) for l, q in enumerate(self.q_D)]
        out += [(f"q_C{mu + 1}", q) for mu, q in enumerate(self.q_C)]
        return out

    def masks(self) -> list[tuple[str, TrigPoly]]:
        return [("tau", self.tau)] + self.wavelet_masks()

    def drop_complementary(self, mu: int) -> FilterBank:
        """Copy with ``q_C[mu]`` (0-based) removed; the result is not tight."""
        q_C = tuple(q for i, q in enumerate(self.q_C) if i != mu)
        return replace(self, q_C=q_C)


# construction


@functools.lru_cache(maxsize=None)
def _half_angle(m: int, orientation: str) -> CausalFactor:
    return half_angle_factor(m, orientation)


def build_p(direction: DirectionSpec, orientation: str = "max_phase") -> TrigPoly:
    """``p(w) = b_m(xi . w)`` with ``b_m(0) = 1``."""
    return _half_angle(direction.m, orientation).to_trigpoly(direction.xi)


def build_g(direction: DirectionSpec, lam: int, n: int) -> TrigPoly:
    n_xi = len(direction.xi)
    if n_xi != n:
        raise ConfigError(f"direction has length {n_xi}, expected {n}")
    one = TrigPoly.constant(n, 1.0)
    diff = (one - TrigPoly.monomial(direction.xi)) ** direction.m
    shift = tuple(direction.m * z for z in direction.zeta)
    return diff.shift(shift).scale(lam ** (-n / 2) * 2.0 ** (-direction.m))


def build_lowpass(p_list: Sequence[TrigPoly], config: BankConfig) -> TrigPoly:
    n, lam = config.n, config.lam
    if len(p_list) != config.N:
        raise ConfigError(f"expected {config.N} directional factors, got {len(p_list)}")
    c = lam ** (-n / 2)
    tau = TrigPoly.zero(n)
    for l, nu in enumerate(config.coset_reps):
        back = tuple(-v for v in nu)
        if l < config.N:
            tau = tau + p_list[l].upsample_arg(lam).shift(back).scale(c)
        else:
            tau = tau + TrigPoly.monomial(back, c)
    return tau


def build_bank(config: BankConfig) -> FilterBank:
    n, lam = config.n, config.lam
    c = lam ** (-n / 2)
    p = tuple(build_p(d, config.orientation) for d in config.directions)
    g = tuple(build_g(d, lam, n) for d in config.directions)
    tau = build_lowpass(p, config)
    q_D = tuple(tau * gl.upsample_arg(lam) for gl in g)
    one = TrigPoly.constant(n, 1.0)
    q_C = []
    for mu, nu in enumerate(config.coset_reps):
        pm = p[mu] if mu < config.N else one
        q_C.append(TrigPoly.monomial([-v for v in nu]) - (tau * pm.upsample_arg(lam).reflect()).scale(c))
    return FilterBank(tau, g, p, q_D, tuple(q_C), lam, config.coset_reps, config)


def build_from_sos(tau: TrigPoly, g_list: Sequence[TrigPoly], lam: int,
                   coset_reps: Sequence[Sequence[int]] | None = None) -> FilterBank:
    """Generic bank from a lowpass mask and an SOS of ``1 - lam^-n sum_gamma |tau(w/lam + gamma)|^2``.

    ``q_1,l = tau(w) g_l(lam w)`` and
    ``q_2,nu = e^{i nu w} - tau(w) conj(tau_nu(lam w))`` with ``tau_nu`` the
    polyphase components of ``tau``.
    """
    n = tau.dim
    reps = tuple(tuple(int(v) for v in nu) for nu in (coset_reps or canonical_cosets(n, lam)))
    check_coset_reps(reps, n, lam)
    q1 = tuple(tau * gl.upsample_arg(lam) for gl in g_list)
    q2 = tuple(TrigPoly.monomial([-v for v in nu])
               - tau * tau.polyphase(nu, lam).upsample_arg(lam).reflect() for nu in reps)
    return FilterBank(tau, tuple(g_list), (), q1, q2, lam, reps, None)


# verification


@dataclass
class MomentsReport:
    vm_directional: list[int]
    vm_complementary: list[int]
    accuracy: int
    flatness: int
    c_order: int
    directional_exact: bool
    complementary_bound: bool

    @property
    def min_a_c_half(self) -> float:
        return min(self.accuracy, self.c_order / 2)


@dataclass
class VerificationReport:
    uep_max_residual: float
    tol: float
    grid_max_residual: float | None = None
    sos_max_residual: float | None = None
    moments: MomentsReport | None = None

    @property
    def tight(self) -> bool:
        return self.uep_max_residual < self.tol

    def to_dict(self) -> dict:
        out = {
            "tight": self.tight,
            "tol": self.tol,
            "uep_max_residual": self.uep_max_residual,
            "grid_max_residual": self.grid_max_residual,
            "sos_max_residual": self.sos_max_residual,
        }
        if self.moments is not None:
            m = self.moments
            out.update({
                "vm_directional": m.vm_directional,
                "vm_complementary": m.vm_complementary,
                "accuracy": m.accuracy,
                "flatness": m.flatness,
                "c_order": m.c_order,
                "min_a_c_half": m.min_a_c_half,
                "directional_vm_exact": m.directional_exact,
                "complementary_vm_bound": m.complementary_bound,
            })
        return out


def polyphase_matrix(bank: FilterBank) -> tuple[np.ndarray, np.ndarray]:
    """Dense polyphase components of every mask.

    Returns ``(P, lo)`` with ``P[i, j, k - lo]`` the coefficient at ``k`` of the
    polyphase component of mask ``i`` (order of ``bank.masks()``) for
    ``coset_reps[j]``.
    """
    comps = [[mask.polyphase(nu, bank.lam) for nu in bank.coset_reps] for _, mask in bank.masks()]
    idx = [k for row in comps for c in row for k in c.terms]
    ks = np.array(idx, dtype=int).reshape(-1, bank.n)
    lo = ks.min(axis=0) if len(ks) else np.zeros(bank.n, dtype=int)
    hi = ks.max(axis=0) if len(ks) else np.zeros(bank.n, dtype=int)
    P = np.zeros((len(comps), len(bank.coset_reps)) + tuple(hi - lo + 1))
    for i, row in enumerate(comps):
        for j, comp in enumerate(row):
            for k, v in comp.terms.items():
                P[(i, j) + tuple(np.asarray(k) - lo)] = v
    return P, lo


def _polyphase_taps(bank: FilterBank):
    """Per mask: coset slot, polyphase index (relative to the mask's own
    minimum) and coefficient of every tap.

    Translating all polyphase components of one mask together leaves its
    Gram contribution unchanged, so each mask is aligned separately.
    """
    lam, n = bank.lam, bank.n
    reps = np.array(bank.coset_reps, dtype=int).reshape(-1, n)
    weights = lam ** np.arange(n)
    slot = np.empty(lam ** n, dtype=int)
    slot[(reps % lam) @ weights] = np.arange(len(reps))
    taps = []
    for _, mask in bank.masks():
        ks, cs = mask.arrays()
        if not len(cs):
            continue
        j = slot[(-ks % lam) @ weights]
        idx = (ks + reps[j]) // lam
        taps.append((j, idx - idx.min(axis=0), cs))
    return taps


def _gram_rows(bank: FilterBank):
    """Yield ``(nu, row)`` with ``row[nu', s + E - 1] = G[nu, nu', s]``.

    ``G[nu, nu', s] = sum_M sum_a P_M[nu, a + s] P_M[nu', a]`` are the
    coefficients of ``sum_M M_nu(w) conj(M_nu'(w))``, accumulated exactly from
    tap pairs of each mask.
    """
    n, C = bank.n, len(bank.coset_reps)
    taps = _polyphase_taps(bank)
    E = np.max([t[1].max(axis=0) for t in taps], axis=0) + 1 if taps else np.ones(n, dtype=int)
    span = 2 * E - 1
    strides = np.cumprod(np.concatenate([[1], span[::-1][:-1]]))[::-1]
    size = int(np.prod(span))
    by_row = [[] for _ in range(C)]
    for j, idx, cs in taps:
        for nu in np.unique(j):
            by_row[nu].append((j == nu, j, idx, cs))
    for nu in range(C):
        keys, vals = [], []
        for sel, j, idx, cs in by_row[nu]:
            lag = idx[sel][:, None, :] - idx[None, :, :] + (E - 1)
            keys.append((j[None, :] * size + lag @ strides).ravel())
            vals.append(np.outer(cs[sel], cs).ravel())
        row = np.bincount(np.concatenate(keys), np.concatenate(vals), minlength=C * size) \
            if keys else np.zeros(C * size)
        yield nu, row.reshape((C,) + tuple(int(v) for v in span))


def polyphase_gram(bank: FilterBank) -> np.ndarray:
    """Dense ``G[nu, nu', s]``, shape ``(C, C, 2E_1 - 1, ..., 2E_n - 1)``, lag 0 at the centre.

    The bank is tight exactly when ``G`` is the identity at lag 0 and zero elsewhere.
    """
    return np.stack([row for _, row in _gram_rows(bank)])


def gram_deviation(bank: FilterBank) -> float:
    """Max abs coefficient of ``G - I``; computed row by row in bounded memory."""
    worst = 0.0
    for nu, row in _gram_rows(bank):
        centre = (nu,) + tuple(d // 2 for d in row.shape[1:])
        row[centre] -= 1.0
        worst = max(worst, float(np.max(np.abs(row))))
    return worst


def uep_grid_residual(bank: FilterBank, grid_size: int = 32) -> float:
    """Sampled UEP residual on a grid (rounded up to a multiple of lam per axis)."""
    n, lam = bank.n, bank.lam
    size = lam * math.ceil(grid_size / lam)
    values = []
    for _, mask in bank.masks():
        ks, cs = mask.arrays()
        dense = np.zeros((size,) * n)
        np.add.at(dense, tuple((ks % size).T), cs)
        values.append(np.fft.fftn(dense))
    F = np.stack(values)
    step = size // lam
    worst = 0.0
    for g in itertools.product(range(lam), repeat=n):
        shifted = np.roll(F, tuple(-step * v for v in g), axis=tuple(range(1, n + 1)))
        total = np.sum(F * np.conj(shifted), axis=0)
        target = float(lam ** n) if not any(g) else 0.0
        worst = max(worst, float(np.max(np.abs(total - target))))
    return worst


def verify_uep(bank: FilterBank, tol: float = DEFAULT_TOL, grid_size: int | None = 32) -> VerificationReport:
    """Tightness check via the polyphase Gram identity (authoritative) and a sampled grid."""
    grid = uep_grid_residual(bank, grid_size) if grid_size else None
    return VerificationReport(gram_deviation(bank), tol, grid_max_residual=grid)


def verify_sos_identity(bank: FilterBank) -> float:
    """Max coefficient of ``1 - sum|g_l|^2 - lam^-n sum|p_l|^2 - (lam^n - N) lam^-n``."""
    if bank.config is None:
        raise ValueError("the SOS identity applies to banks made by build_bank")
    n, lam, N = bank.n, bank.lam, bank.N
    total = TrigPoly.constant(n, 1.0 - (lam ** n - N) / lam ** n)
    for gl in bank.g:
        total = total - gl * gl.reflect()
    for pl in bank.p:
        total = total - (pl * pl.reflect()).scale(lam ** (-n))
    return max_abs_diff(total, TrigPoly.zero(n)) if not total.is_zero() else 0.0


def moments_report(bank: FilterBank) -> MomentsReport:
    a = accuracy(bank.tau, bank.lam)
    b = flatness(bank.tau, bank.lam)
    c = root_order_c(bank.tau, bank.lam)
    vm_D = [vanishing_moments(q) for q in bank.q_D]
    vm_C = [vanishing_moments(q) for q in bank.q_C]
    if bank.config is not None:
        exact = all(v == d.m for v, d in zip(vm_D, bank.config.directions))
    else:
        exact = all(v == vanishing_moments(gl) for v, gl in zip(vm_D, bank.g))
    bound = min(a, b) >= 1 and all(v >= min(a, b) for v in vm_C)
    return MomentsReport(vm_D, vm_C, a, b, c, exact, bound)


def verify_bank(bank: FilterBank, tol: float = DEFAULT_TOL, grid_size: int | None = 32) -> VerificationReport:
    report = verify_uep(bank, tol, grid_size)
    if bank.config is not None:
        report.sos_max_residual = verify_sos_identity(bank)
    report.moments = moments_report(bank)
    return report


def box_spline_config(n: int) -> BankConfig:
    """All ``2^n - 1`` directions in ``{0,1}^n \\ {0}`` with ``lam = 2``, ``m = 1``, ``nu_l = xi_l``."""
    xis = [xi for xi in itertools.product((0, 1), repeat=n) if any(xi)]
    dirs = tuple(DirectionSpec(xi) for xi in xis)
    return BankConfig(n, 2, dirs, tuple(xis) + ((0,) * n,))
