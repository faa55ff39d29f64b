"""Scalar Young inequality: gaps, ratios, constants and bound families.

All functions broadcast over numpy arrays. Inputs are reduced to a canonical
form ``lo <= hi`` with ``u = ln(hi/lo) >= 0`` and weights ``(w_lo, w_hi)``,
which keeps the gap accurate over many decades and makes
``young_gap(a, b, nu) == young_gap(b, a, 1 - nu)`` exact whenever ``1 - nu``
is itself exact.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import _kernels
from .errors import NonPositiveInput
from .funcspec import FunctionSpec

__all__ = [
    "WeightSplit",
    "weights",
    "specht_ratio",
    "specht_from_log",
    "kantorovich",
    "young_gap",
    "young_ratio",
    "ScalarBoundFamily",
    "ScalarBoundResult",
    "evaluate_family",
    "new_ratio_rewritten",
    "midpoint_new_diff",
    "midpoint_new_ratio",
    "lemma21_bounds",
    "midpoint_bounds",
    "surface_values",
]


def _out(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def weights(nu) -> Tuple[np.ndarray, np.ndarray]:
    """Return ``(1 - nu, nu)``.

    ``nu`` itself is kept, so a tiny weight loses no relative accuracy; for
    ``nu >= 1/2`` the subtraction ``1 - nu`` is exact as well.
    """
    nu = np.asarray(nu, dtype=np.float64)
    if np.any((nu < 0) | (nu > 1)) or np.any(np.isnan(nu)):
        raise ValueError("weight nu must lie in [0, 1]")
    return 1.0 - nu, nu


@dataclass(frozen=True)
class WeightSplit:
    nu: float
    r: float
    R: float

    @classmethod
    def of(cls, nu: float) -> "WeightSplit":
        w_a, w_b = weights(float(nu))
        return cls(float(nu), float(min(w_a, w_b)), float(max(w_a, w_b)))


def _positive(*xs):
    out = []
    for x in xs:
        x = np.asarray(x, dtype=np.float64)
        if np.any(~(x > 0)):
            raise NonPositiveInput("arguments must be strictly positive")
        out.append(x)
    return out


def specht_from_log(ell):
    """Specht's ratio as a function of ``ell = ln h`` (even in ``ell``)."""
    ell = np.abs(np.asarray(ell, dtype=np.float64))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        # L = ln(h^{1/(h-1)}); S = e^{L-1} / L
        L = np.where(ell == 0, 1.0, ell / np.expm1(ell))
        y = L - 1.0
        near = y - np.log1p(y)
        # For large ell, L is tiny and L - 1 has lost its digits: take ln L
        # as ln(ell) - ln(expm1(ell)) instead.
        big = np.maximum(ell, 1.0)
        log_expm1 = big + np.log1p(-np.exp(-big))
        far = y - (np.log(big) - log_expm1)
        log_s = np.where(ell == 0, 0.0, np.where(ell > 1.0, far, near))
        return np.exp(log_s)


def specht_ratio(h):
    """Specht's ratio ``h^{1/(h-1)} / (e ln h^{1/(h-1)})``, with ``S(1) = 1``."""
    (h,) = _positive(h)
    return _out(specht_from_log(np.log(h)))


def kantorovich(h):
    """Kantorovich's constant ``(h + 1)^2 / (4h)``."""
    (h,) = _positive(h)
    return _out((h + 1.0) ** 2 / (4.0 * h))


def _log_cosh(x):
    return np.logaddexp(x, -x) - math.log(2.0)


def _canon(a, b, nu):
    a, b = _positive(a, b)
    w_a, w_b = weights(nu)
    a, b, w_a, w_b = np.broadcast_arrays(a, b, w_a, w_b)
    swap = b < a
    lo = np.where(swap, b, a)
    hi = np.where(swap, a, b)
    w_lo = np.where(swap, w_b, w_a)
    w_hi = np.where(swap, w_a, w_b)
    with np.errstate(over="ignore"):
        ratio = hi / lo
    # hi - lo is exact when hi <= 2 lo, which keeps u accurate as hi -> lo
    near = np.log1p((hi - lo) / lo)
    far = np.where(np.isfinite(ratio), np.log(ratio), np.log(hi) - np.log(lo))
    u = np.where(hi <= 2.0 * lo, near, far)
    return lo, hi, w_lo, w_hi, u


def _gap(lo, w_lo, w_hi, u):
    return lo * _kernels.young_gap_scaled(u, w_hi, w_lo)


def _ratio(w_lo, w_hi, u):
    g = _kernels.young_gap_scaled(u, w_hi, w_lo)
    return 1.0 + g * np.exp(-w_hi * u)


def young_gap(a, b, nu):
    """``(1 - nu) a + nu b - a^{1-nu} b^nu`` (nonnegative)."""
    lo, hi, w_lo, w_hi, u = _canon(a, b, nu)
    return _out(_gap(lo, w_lo, w_hi, u))


def young_ratio(a, b, nu):
    """``((1 - nu) a + nu b) / (a^{1-nu} b^nu)`` (at least one)."""
    lo, hi, w_lo, w_hi, u = _canon(a, b, nu)
    return _out(_ratio(w_lo, w_hi, u))


class ScalarBoundFamily(enum.Enum):
    """Refinement/reverse families for the scalar Young inequality.

    ``form`` tells whether the family sandwiches the gap (``"gap"``) or the
    ratio (``"ratio"``).
    """

    SpechtRatio = ("specht", "ratio")
    KantorovichRatio = ("kantorovich", "ratio")
    KittanehManasrahDiff = ("km", "gap")
    LogDiffReverse = ("logdiff", "gap")
    ExpKantorovichRatio = ("expkant", "ratio")
    NewDiff = ("newdiff", "gap")
    NewRatio = ("newratio", "ratio")

    def __init__(self, tag: str, form: str):
        self.tag = tag
        self.form = form

    @property
    def sides(self) -> str:
        return "both"

    @classmethod
    def from_tag(cls, tag: str) -> "ScalarBoundFamily":
        for fam in cls:
            if fam.tag == tag or fam.name == tag:
                return fam
        raise KeyError(tag)


@dataclass(frozen=True)
class ScalarBoundResult:
    lower: Optional[object]
    middle: object
    upper: Optional[object]

    def holds(self, rel: float = 1e-12):
        """Elementwise ``lower <= middle <= upper`` with slack ``rel * max(1, |middle|)``."""
        mid = np.asarray(self.middle, dtype=np.float64)
        slack = rel * np.maximum(1.0, np.abs(mid))
        ok = np.ones(mid.shape, dtype=bool)
        if self.lower is not None:
            ok &= np.asarray(self.lower) <= mid + slack
        if self.upper is not None:
            ok &= mid <= np.asarray(self.upper) + slack
        return _out(ok) if ok.ndim else bool(ok)


def evaluate_family(fam: ScalarBoundFamily, a, b, nu) -> ScalarBoundResult:
    """Lower bound, sandwiched quantity and upper bound of one family.

    For ratio families the middle is :func:`young_ratio`, otherwise
    :func:`young_gap`.
    """
    lo, hi, w_lo, w_hi, u = _canon(a, b, nu)
    r = np.minimum(w_lo, w_hi)
    R = np.maximum(w_lo, w_hi)
    vv = w_lo * w_hi
    with np.errstate(over="ignore"):
        if fam.form == "gap":
            middle = _gap(lo, w_lo, w_hi, u)
        else:
            middle = _ratio(w_lo, w_hi, u)

        if fam is ScalarBoundFamily.SpechtRatio:
            lower = specht_from_log(r * u)
            upper = specht_from_log(u)
        elif fam is ScalarBoundFamily.KantorovichRatio:
            lk = 2.0 * _log_cosh(0.5 * u)
            lower = np.exp(r * lk)
            upper = np.exp(R * lk)
        elif fam is ScalarBoundFamily.KittanehManasrahDiff:
            sq = (hi - lo) / (np.sqrt(hi) + np.sqrt(lo))
            sq = sq * sq
            lower = r * sq
            upper = R * sq
        elif fam is ScalarBoundFamily.LogDiffReverse:
            lower = np.zeros_like(middle)
            upper = vv * (hi - lo) * u
        elif fam is ScalarBoundFamily.ExpKantorovichRatio:
            lower = np.ones_like(middle)
            sh = np.sinh(0.5 * u)
            upper = np.exp(4.0 * vv * sh * sh)
        elif fam is ScalarBoundFamily.NewDiff:
            c = 0.5 * vv * u * u
            lower = c * lo
            upper = c * hi
        elif fam is ScalarBoundFamily.NewRatio:
            d = hi - lo
            lower = np.exp(0.5 * vv * (d / hi) ** 2)
            upper = np.exp(0.5 * vv * (d / lo) ** 2)
        else:  # pragma: no cover
            raise ValueError(fam)
    return ScalarBoundResult(_out(lower), _out(middle), _out(upper))


def new_ratio_rewritten(a, b, nu) -> ScalarBoundResult:
    """Ratio bounds written through ``min/max`` of the pair instead of ``(b - a)^2``."""
    lo, hi, w_lo, w_hi, u = _canon(a, b, nu)
    vv = w_lo * w_hi
    with np.errstate(over="ignore"):
        lower = np.exp(0.5 * vv * (1.0 - lo / hi) ** 2)
        upper = np.exp(0.5 * vv * (hi / lo - 1.0) ** 2)
    return ScalarBoundResult(_out(lower), _out(_ratio(w_lo, w_hi, u)), _out(upper))


def midpoint_new_diff(a, b) -> ScalarBoundResult:
    """Equal-weight difference bounds with the 1/8 constants."""
    a, b = _positive(a, b)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    l2 = np.log(hi / lo) ** 2
    middle = 0.5 * (hi - lo) ** 2 / (np.sqrt(hi) + np.sqrt(lo)) ** 2
    return ScalarBoundResult(_out(l2 * lo / 8.0), _out(middle), _out(l2 * hi / 8.0))


def midpoint_new_ratio(a, b) -> ScalarBoundResult:
    """Equal-weight ratio bounds ``exp[(b-a)^2 / (8 max^2)]`` and ``exp[(b-a)^2 / (8 min^2)]``."""
    a, b = _positive(a, b)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    d2 = (b - a) ** 2
    with np.errstate(over="ignore"):
        middle = 0.5 * (a + b) / (np.sqrt(a) * np.sqrt(b))
        lower = np.exp(d2 / (8.0 * hi * hi))
        upper = np.exp(d2 / (8.0 * lo * lo))
    return ScalarBoundResult(_out(lower), _out(middle), _out(upper))


def lemma21_bounds(f: FunctionSpec, a, b, nu) -> ScalarBoundResult:
    """Curvature sandwich of the Jensen gap of ``f`` at ``a``, ``b`` with weight ``nu``.

    ``lower = nu (1 - nu) d (b - a)^2 / 2`` and ``upper`` likewise with ``D``.
    """
    f.check_points(a, b)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    w_a, w_b = weights(nu)
    c = 0.5 * w_a * w_b * (b - a) ** 2
    middle = w_a * f(a) + w_b * f(b) - f(w_a * a + w_b * b)
    return ScalarBoundResult(_out(c * f.d), _out(middle), _out(c * f.D))


def midpoint_bounds(f: FunctionSpec, a, b) -> ScalarBoundResult:
    return lemma21_bounds(f, a, b, 0.5)


def surface_values(nu, x):
    """The two competing upper-bound surfaces for the gap (``P1``, ``P2``) and
    for the ratio (``Q1``, ``Q2``), all normalized to ``a = 1, b = x``."""
    (x,) = _positive(x)
    nu = np.asarray(nu, dtype=np.float64)
    if np.any((nu < 0) | (nu > 1)):
        raise ValueError("nu must lie in [0, 1]")
    vv = nu * (1.0 - nu)
    lx = np.log(x)
    p1 = vv * (x - 1.0) * lx
    p2 = 0.5 * vv * lx * lx * np.maximum(x, 1.0)
    with np.errstate(over="ignore"):
        q1 = np.exp(vv * (x - 1.0) ** 2 / x)
        q2 = np.exp(0.5 * vv * (x - 1.0) ** 2 / np.minimum(x, 1.0) ** 2)
    return _out(p1), _out(p2), _out(q1), _out(q2)
