"""Operator means and certified operator refinements/reverses of Young's inequality.

Each ``*_bounds`` function returns a :class:`BoundReport` holding the lower
bound, the sandwiched operator and the upper bound, together with the two
Loewner margins that certify ``lower <= middle <= upper``.

All functions of the contraction ``C = A^{-1/2} B A^{-1/2}`` go through one
eigendecomposition of ``C``; every bound is then congruence-lifted by
``A^{1/2}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from . import scalar_young as sy
from .errors import (
    DimMismatch,
    InvalidCondition,
    InvalidWindow,
    NonPositiveInput,
    WindowViolation,
)
from .symcalc import (
    LoewnerMargin,
    SpdMatrix,
    SymMatrix,
    as_sym,
    congruence,
    loewner_cmp,
    spd_inv_sqrt,
    spd_sqrt,
)

__all__ = [
    "DEFAULT_TOL",
    "WINDOW_GUARD",
    "WINDOW_SLACK",
    "SANDWICH_RTOL",
    "SpectrumWindow",
    "SandwichCondition",
    "BoundReport",
    "PairCalculus",
    "pair_calculus",
    "arith_mean",
    "geom_mean",
    "f_mean",
    "spectrum_window",
    "window_from_sandwich",
    "fmin_fmax",
    "extremize_fminmax",
    "amgm_report",
    "thm31_bounds",
    "thm32_bounds",
    "thm33_bounds",
    "cor31_bounds",
    "thmA_bounds",
    "thmB_bounds",
]

DEFAULT_TOL = 1e-9
# spectrum_window grows the computed spectrum by this relative amount, plus
# WINDOW_GUARD_ULPS * dim * eps * lambda_max to cover the absolute error of C.
WINDOW_GUARD = 1e-12
WINDOW_GUARD_ULPS = 16.0
# Containment checks accept a spectrum that pokes out of a window by this much.
WINDOW_SLACK = 1e-10
# Sandwich checks allow eigenvalue error relative to the operator's norm.
SANDWICH_RTOL = 1e-10
# Rounding allowance per dimension, in ulps of the cancelling terms.
NOISE_ULPS = 32.0

_EXP_MAX = math.log(np.finfo(float).max)
_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class SpectrumWindow:
    """Interval ``[lo, hi]`` with ``0 < lo <= hi`` bounding a spectrum."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo <= hi):
            raise InvalidWindow(f"window must satisfy 0 < lo <= hi, got [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def contains(self, lam_lo: float, lam_hi: float, slack: float = WINDOW_SLACK) -> bool:
        return lam_lo >= self.lo * (1.0 - slack) and lam_hi <= self.hi * (1.0 + slack)

    def __iter__(self):
        return iter((self.lo, self.hi))


@dataclass(frozen=True)
class SandwichCondition:
    """Constants ``0 < m' <= m < M <= M'`` separating the spectra of ``A`` and ``B``.

    Orientation ``"i"``: ``m' <= A <= m < M <= B <= M'``.
    Orientation ``"ii"``: the same with ``A`` and ``B`` exchanged.
    """

    m_prime: float
    m: float
    M: float
    M_prime: float
    orientation: str = "i"

    def __post_init__(self):
        if self.orientation not in ("i", "ii"):
            raise InvalidCondition(f"orientation must be 'i' or 'ii', got {self.orientation!r}")
        vals = (self.m_prime, self.m, self.M, self.M_prime)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidCondition("sandwich constants must be finite")
        if not (0 < self.m_prime <= self.m < self.M <= self.M_prime):
            raise InvalidCondition(
                "sandwich constants must satisfy 0 < m' <= m < M <= M', got "
                f"{self.m_prime}, {self.m}, {self.M}, {self.M_prime}"
            )

    @property
    def h(self) -> float:
        return self.M / self.m

    @property
    def h_prime(self) -> float:
        return self.M_prime / self.m_prime

    def inner_outer(self, a: SymMatrix, b: SymMatrix) -> Tuple[SymMatrix, SymMatrix]:
        return (a, b) if self.orientation == "i" else (b, a)

    def satisfied_by(self, a: SymMatrix, b: SymMatrix, rtol: float = SANDWICH_RTOL) -> bool:
        low, high = self.inner_outer(as_sym(a), as_sym(b))
        el, eh = low.eig, high.eig
        sl = rtol * max(abs(el.lo), abs(el.hi))
        sh = rtol * max(abs(eh.lo), abs(eh.hi))
        return (
            el.lo >= self.m_prime - sl
            and el.hi <= self.m + sl
            and eh.lo >= self.M - sh
            and eh.hi <= self.M_prime + sh
        )

    def check(self, a: SymMatrix, b: SymMatrix) -> None:
        if not self.satisfied_by(a, b):
            raise InvalidCondition(f"pair does not satisfy sandwich condition ({self.orientation})")

    @classmethod
    def from_pair(cls, a: SymMatrix, b: SymMatrix) -> "SandwichCondition":
        """Tightest constants read off the spectra, when the spectra are separated."""
        ea, eb = as_sym(a).eig, as_sym(b).eig
        if ea.hi < eb.lo:
            return cls(ea.lo, ea.hi, eb.lo, eb.hi, "i")
        if eb.hi < ea.lo:
            return cls(eb.lo, eb.hi, ea.lo, ea.hi, "ii")
        raise InvalidCondition("spectra of A and B overlap; no sandwich condition holds")


@dataclass(frozen=True)
class BoundReport:
    """``lower <= middle <= upper`` with the two certifying Loewner margins.

    A bound whose scalar coefficient overflows is vacuous: its matrix is
    filled with ``+inf`` and its margin is ``+inf``.
    """

    family: str
    lower: SymMatrix
    middle: SymMatrix
    upper: SymMatrix
    lower_margin: LoewnerMargin
    upper_margin: LoewnerMargin
    coefficients: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.lower_margin.passed and self.upper_margin.passed

    @property
    def worst_relative_margin(self) -> float:
        return min(self.lower_margin.relative, self.upper_margin.relative)


def _check_pair(a, b) -> Tuple[SpdMatrix, SpdMatrix]:
    a = a if isinstance(a, SpdMatrix) else SpdMatrix(a)
    b = b if isinstance(b, SpdMatrix) else SpdMatrix(b)
    if a.dim != b.dim:
        raise DimMismatch(f"dimension mismatch: {a.dim} vs {b.dim}")
    return a, b


def _check_nu(nu: float) -> float:
    nu = float(nu)
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"nu must lie in [0, 1], got {nu}")
    return nu


class PairCalculus:
    """Shared functional calculus for one pair ``(A, B)``.

    Holds ``A^{1/2}`` and the contraction ``C``; ``lift(g)`` returns
    ``A^{1/2} g(C) A^{1/2}`` using the single decomposition of ``C``.
    """

    def __init__(self, a, b):
        self.a, self.b = _check_pair(a, b)
        self.a_half = spd_sqrt(self.a)
        if self.a == self.b:
            self.c = SymMatrix(np.eye(self.a.dim))
        else:
            self.c = congruence(spd_inv_sqrt(self.a), self.b)
        self.c_eig = self.c.eig

    @property
    def dim(self) -> int:
        return self.a.dim

    @property
    def spectrum(self) -> np.ndarray:
        return self.c_eig.eigenvalues

    def fn_of_c(self, g: Callable[[np.ndarray], np.ndarray]) -> SymMatrix:
        vals = np.asarray(g(self.c_eig.eigenvalues), dtype=np.float64)
        return SymMatrix(self.c_eig.reconstruct(np.broadcast_to(vals, self.c_eig.eigenvalues.shape)))

    def lift(self, g: Callable[[np.ndarray], np.ndarray]) -> SymMatrix:
        return congruence(self.a_half, self.fn_of_c(g))

    def window(self) -> SpectrumWindow:
        lo, hi = self.c_eig.lo, self.c_eig.hi
        if self.a == self.b:
            return SpectrumWindow(1.0, 1.0)
        pad = WINDOW_GUARD_ULPS * self.dim * _EPS * hi
        return SpectrumWindow(
            max(lo * (1.0 - WINDOW_GUARD) - pad, 0.5 * lo), hi * (1.0 + WINDOW_GUARD) + pad
        )

    def require_window(self, w: SpectrumWindow) -> None:
        if not w.contains(self.c_eig.lo, self.c_eig.hi):
            raise WindowViolation(
                f"spectrum [{self.c_eig.lo:.17g}, {self.c_eig.hi:.17g}] escapes window "
                f"[{w.lo:.17g}, {w.hi:.17g}]"
            )

    def geom(self, nu: float) -> SymMatrix:
        if nu == 0.0:
            return self.a
        if nu == 1.0:
            return self.b
        return self.lift(lambda t: np.power(t, nu))

    def arith(self, nu: float) -> SymMatrix:
        w_a, w_b = sy.weights(nu)
        return SymMatrix(float(w_a) * self.a.a + float(w_b) * self.b.a)


_last_pair: Tuple = ()


def pair_calculus(a, b) -> PairCalculus:
    """:class:`PairCalculus` of ``(a, b)``, reusing the previous one when the
    same two (immutable) matrix objects are passed again."""
    global _last_pair
    last = _last_pair
    if last and last[0] is a and last[1] is b:
        return last[2]
    pc = PairCalculus(a, b)
    _last_pair = (a, b, pc)
    return pc


def _scaled(coef: float, m: SymMatrix) -> SymMatrix:
    if math.isfinite(coef):
        return SymMatrix(coef * m.a)
    return SymMatrix(np.full((m.dim, m.dim), math.inf))


def _exp_coef(log_coef: float) -> float:
    return math.exp(log_coef) if log_coef < _EXP_MAX else math.inf


def make_report(
    family: str,
    lower: SymMatrix,
    middle: SymMatrix,
    upper: SymMatrix,
    tol_rel: float = DEFAULT_TOL,
    coefficients: Optional[Dict[str, float]] = None,
    terms: Optional[SymMatrix] = None,
) -> BoundReport:
    """Certify ``lower <= middle <= upper``; non-finite bounds get vacuous margins.

    ``terms``, when given, is the lifted magnitude of the quantities that
    cancel inside ``middle``; both margins then allow an absolute rounding
    error of ``NOISE_ULPS * dim * eps * ||terms||_F``.
    """
    noise = 0.0 if terms is None else NOISE_ULPS * middle.dim * _EPS * terms.fro
    if np.all(np.isfinite(lower.a)):
        lm = loewner_cmp(lower, middle, tol_rel, noise)
    else:
        lm = LoewnerMargin(-math.inf, middle.fro, tol_rel)
    if np.all(np.isfinite(upper.a)):
        um = loewner_cmp(middle, upper, tol_rel, noise)
    elif np.all(upper.a == math.inf):
        um = LoewnerMargin.vacuous(middle.fro, tol_rel)
    else:
        um = LoewnerMargin(-math.inf, middle.fro, tol_rel)
    return BoundReport(family, lower, middle, upper, lm, um, dict(coefficients or {}))


# -- means ----------------------------------------------------------------


def arith_mean(a, b, nu: float) -> SpdMatrix:
    """Weighted arithmetic mean ``(1 - nu) A + nu B``."""
    a, b = _check_pair(a, b)
    w_a, w_b = sy.weights(_check_nu(nu))
    return SpdMatrix(float(w_a) * a.a + float(w_b) * b.a)


def geom_mean(a, b, nu: float) -> SpdMatrix:
    """Weighted geometric mean ``A^{1/2} (A^{-1/2} B A^{-1/2})^nu A^{1/2}``.

    Any real ``nu`` is accepted (``nu`` outside ``[0, 1]`` gives the power
    means used by the secant bounds).
    """
    return SpdMatrix(pair_calculus(a, b).geom(float(nu)))


def f_mean(
    a,
    b,
    f: Callable[[np.ndarray], np.ndarray],
    domain: Optional[Tuple[float, float]] = None,
) -> SymMatrix:
    """``A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}``."""
    from .symcalc import apply_scalar_fn

    pc = pair_calculus(a, b)
    return congruence(pc.a_half, apply_scalar_fn(pc.c, f, domain))


# -- windows ----------------------------------------------------------------


def spectrum_window(a, b) -> SpectrumWindow:
    """Window certifiably containing the spectrum of ``A^{-1/2} B A^{-1/2}``
    (computed extremes widened by the relative ``WINDOW_GUARD`` and by an
    absolute ``WINDOW_GUARD_ULPS * dim * eps * lambda_max``, the size of the
    eigenvalue error of a computed ``C``; ``A == B`` gives exactly ``[1, 1]``)."""
    return pair_calculus(a, b).window()


def window_from_sandwich(c: SandwichCondition) -> SpectrumWindow:
    """Contraction window implied by a sandwich condition.

    Orientation ``i`` gives ``[h, h']``; orientation ``ii`` gives
    ``[1/h', 1/h]`` with ``h = M/m`` and ``h' = M'/m'``.
    """
    if c.orientation == "i":
        return SpectrumWindow(c.h, c.h_prime)
    return SpectrumWindow(1.0 / c.h_prime, 1.0 / c.h)


# -- f_min / f_max ----------------------------------------------------------


def fmin_fmax(x):
    """``(x + 1 -/+ |x - 1|) ln^2 x``, i.e. ``2 min{1,x} ln^2 x`` and ``2 max{1,x} ln^2 x``."""
    xa = np.asarray(x, dtype=np.float64)
    if np.any(~(xa > 0)):
        raise NonPositiveInput("fmin_fmax needs x > 0")
    l2 = np.log(xa) ** 2
    lo = 2.0 * np.minimum(1.0, xa) * l2
    hi = 2.0 * np.maximum(1.0, xa) * l2
    if lo.ndim == 0:
        return float(lo), float(hi)
    return lo, hi


_FMIN_CRIT = math.exp(-2.0)


def extremize_fminmax(w: SpectrumWindow) -> Tuple[float, float]:
    """Exact ``min f_min`` and ``max f_max`` over a window.

    ``f_max`` decreases on (0, 1] and increases on [1, inf), so its maximum is
    at an endpoint. ``f_min`` has stationary points at ``e^{-2}`` (a local
    maximum) and 1 (its zero), so its minimum is among the endpoints and 1.
    """
    if not isinstance(w, SpectrumWindow):
        w = SpectrumWindow(*w)
    cands = [w.lo, w.hi]
    for x in (1.0, _FMIN_CRIT):
        if w.lo <= x <= w.hi:
            cands.append(x)
    fmins = [fmin_fmax(x)[0] for x in cands]
    fmax_lo = fmin_fmax(w.lo)[1]
    fmax_hi = fmin_fmax(w.hi)[1]
    return float(min(fmins)), float(max(fmax_lo, fmax_hi))


# -- bound families -----------------------------------------------------------


def amgm_report(a, b, nu: float, tol_rel: float = DEFAULT_TOL) -> BoundReport:
    """Operator AM-GM: ``A #_nu B <= A nabla_nu B`` (upper side vacuous)."""
    nu = _check_nu(nu)
    pc = pair_calculus(a, b)
    g = pc.geom(nu)
    m = pc.arith(nu)
    upper = SymMatrix(np.full((pc.dim, pc.dim), math.inf))
    return make_report("amgm", g, m, upper, tol_rel)


def _gap_middle(pc: PairCalculus, nu: float) -> SymMatrix:
    # A nabla B - A # B = A^{1/2} [(1-nu) + nu C - C^nu] A^{1/2}; the bracket
    # is the accurate scalar gap, so nothing cancels at matrix level.
    return pc.lift(lambda t: sy.young_gap(1.0, t, nu))


def thm31_bounds(a, b, nu: float, tol_rel: float = DEFAULT_TOL) -> BoundReport:
    """``nu(1-nu)/4 A #_{f_min} B <= A nabla_nu B - A #_nu B <= nu(1-nu)/4 A #_{f_max} B``.

    At ``nu = 1/2`` the coefficients are ``1/16``.
    """
    nu = _check_nu(nu)
    pc = pair_calculus(a, b)
    w_a, w_b = sy.weights(nu)
    k = 0.25 * float(w_a * w_b)
    middle = _gap_middle(pc, nu)
    lower = _scaled(k, pc.lift(lambda t: fmin_fmax(t)[0]))
    upper = _scaled(k, pc.lift(lambda t: fmin_fmax(t)[1]))
    return make_report("thm31", lower, middle, upper, tol_rel, {"coef": k})


def thm32_bounds(a, b, nu: float, w: Optional[SpectrumWindow] = None,
                 tol_rel: float = DEFAULT_TOL) -> BoundReport:
    """Window-constant version: ``min f_min`` and ``max f_max`` multiply ``A``."""
    nu = _check_nu(nu)
    pc = pair_calculus(a, b)
    w = pc.window() if w is None else w
    pc.require_window(w)
    mn, mx = extremize_fminmax(w)
    w_a, w_b = sy.weights(nu)
    k = 0.25 * float(w_a * w_b)
    middle = _gap_middle(pc, nu)
    return make_report(
        "thm32", _scaled(k * mn, pc.a), middle, _scaled(k * mx, pc.a), tol_rel,
        {"min_fmin": mn, "max_fmax": mx},
    )


def _thm33_log_coefs(nu: float, k: float, K: float) -> Tuple[float, float]:
    w_a, w_b = sy.weights(nu)
    vv = 0.5 * float(w_a * w_b)
    low = vv * (1.0 - min(1.0, K) / max(1.0, k)) ** 2
    with np.errstate(over="ignore"):
        high = vv * (max(1.0, K) / min(1.0, k) - 1.0) ** 2
    return low, high


def thm33_bounds(a, b, nu: float, w: Optional[SpectrumWindow] = None,
                 tol_rel: float = DEFAULT_TOL) -> BoundReport:
    """Multiplicative sandwich of ``A nabla_nu B`` by exponential multiples of ``A #_nu B``.

    With ``k, K`` the window ends the exponents are
    ``nu(1-nu)/2 (1 - min{1,K}/max{1,k})^2`` and
    ``nu(1-nu)/2 (max{1,K}/min{1,k} - 1)^2``.
    """
    nu = _check_nu(nu)
    pc = pair_calculus(a, b)
    w = pc.window() if w is None else w
    pc.require_window(w)
    lo_log, hi_log = _thm33_log_coefs(nu, w.lo, w.hi)
    g = pc.geom(nu)
    cl, cu = _exp_coef(lo_log), _exp_coef(hi_log)
    return make_report(
        "thm33", _scaled(cl, g), pc.arith(nu), _scaled(cu, g), tol_rel,
        {"lower_coef": cl, "upper_coef": cu},
    )


def _sandwich_report(tag, a, b, nu, c, coef_fn, tol_rel):
    nu = _check_nu(nu)
    pc = pair_calculus(a, b)
    c.check(pc.a, pc.b)
    cl, cu = coef_fn(nu)
    g = pc.geom(nu)
    return make_report(
        tag, _scaled(cl, g), pc.arith(nu), _scaled(cu, g), tol_rel,
        {"lower_coef": cl, "upper_coef": cu, "h": c.h, "h_prime": c.h_prime},
    )


def cor31_bounds(a, b, nu: float, c: SandwichCondition,
                 tol_rel: float = DEFAULT_TOL) -> BoundReport:
    """Sandwich-constant multiplicative bounds.

    Lower coefficient ``exp[nu(1-nu)/2 ((h-1)/h)^2]``, upper coefficient
    ``exp[nu(1-nu)/2 (h'-1)^2]``; these are the window bounds evaluated on
    :func:`window_from_sandwich`, identical for both orientations.
    """
    def coefs(nu):
        w_a, w_b = sy.weights(nu)
        vv = 0.5 * float(w_a * w_b)
        return (_exp_coef(vv * ((c.h - 1.0) / c.h) ** 2),
                _exp_coef(vv * (c.h_prime - 1.0) ** 2))

    return _sandwich_report("cor31", a, b, nu, c, coefs, tol_rel)


def thmA_bounds(a, b, nu: float, c: SandwichCondition,
                tol_rel: float = DEFAULT_TOL) -> BoundReport:
    """Specht-ratio sandwich ``S(h^r) A #_nu B <= A nabla_nu B <= S(h') A #_nu B``.

    The reverse constant uses the outer ratio ``h' = M'/m'``: the contraction
    spectrum can reach ``h'``, and ``S`` grows away from 1.
    """
    def coefs(nu):
        ws = sy.WeightSplit.of(nu)
        return (float(sy.specht_from_log(ws.r * math.log(c.h))),
                float(sy.specht_from_log(math.log(c.h_prime))))

    return _sandwich_report("thmA", a, b, nu, c, coefs, tol_rel)


def thmB_bounds(a, b, nu: float, c: SandwichCondition,
                tol_rel: float = DEFAULT_TOL) -> BoundReport:
    """Kantorovich sandwich ``K(h)^r A #_nu B <= A nabla_nu B <= K(h')^R A #_nu B``."""
    def coefs(nu):
        ws = sy.WeightSplit.of(nu)
        return (float(sy.kantorovich(c.h)) ** ws.r,
                float(sy.kantorovich(c.h_prime)) ** ws.R)

    return _sandwich_report("thmB", a, b, nu, c, coefs, tol_rel)
