"""Secant and Jensen-type operator bounds for functions with bounded curvature.

For ``f`` with ``d <= f'' <= D`` on ``[gamma, Gamma]`` and an SPD pair whose
contraction ``C = A^{-1/2} B A^{-1/2}`` has spectrum in that interval:

* :func:`thm41_bounds` sandwiches the gap between the secant combination
  ``((Gamma A - B) f(gamma) + (B - gamma A) f(Gamma)) / (Gamma - gamma)`` and
  ``A #_f B`` by ``d/2 W`` and ``D/2 W`` with
  ``W = A^{1/2} (Gamma I - C)(C - gamma I) A^{1/2}``.
* :func:`thm42_bounds` sandwiches the operator Jensen gap
  ``(1-nu) f(1) A + nu A #_f B - A^{1/2} f((1-nu) I + nu C) A^{1/2}`` by
  multiples of ``A^{1/2} (C - I)^2 A^{1/2}``.

Every term of each report is a function of ``C``, so the middle is evaluated
eigenvalue by eigenvalue and lifted once; ``Gamma A - B`` and the like are
never formed as differences of large matrices.
"""
from __future__ import annotations

import math
from typing import Tuple

import numpy as np

from . import scalar_young as sy
from .errors import DomainViolation, InvalidWindow, WindowViolation
from .funcspec import FunctionSpec
from .operator_young import (
    DEFAULT_TOL,
    BoundReport,
    PairCalculus,
    pair_calculus,
    SpectrumWindow,
    _scaled,
    make_report,
)

__all__ = [
    "FunctionSpec",
    "ONE_MARGIN",
    "exp_spec",
    "neg_log_spec",
    "power_spec",
    "square_spec",
    "curvature_bounds_power",
    "secant_gap",
    "thm41_bounds",
    "power_bounds",
    "thm42_bounds",
    "log_bounds",
]

# thm42/log windows must contain 1 with at least this much room on each side.
ONE_MARGIN = 1e-12
_SLOPE_STEP = 1e-6


def _window(w) -> SpectrumWindow:
    return w if isinstance(w, SpectrumWindow) else SpectrumWindow(*w)


def exp_spec(lo: float, hi: float) -> FunctionSpec:
    """``exp`` on ``[lo, hi]`` with ``d = e^lo`` and ``D = e^hi``."""
    with np.errstate(over="ignore"):
        d, D = math.exp(lo), math.exp(hi) if hi < 709.0 else math.inf
    if not math.isfinite(D):
        raise DomainViolation(f"exp'' overflows on [{lo}, {hi}]")
    return FunctionSpec(np.exp, np.exp, lo, hi, d, D, name="exp")


def neg_log_spec(lo: float, hi: float) -> FunctionSpec:
    """``-ln`` on ``[lo, hi]``: ``f'' = 1/t^2`` so ``d = 1/hi^2`` and ``D = 1/lo^2``."""
    if not lo > 0:
        raise DomainViolation("-ln needs a positive interval")
    return FunctionSpec(
        lambda t: -np.log(t),
        lambda t: 1.0 / (t * t),
        lo, hi, 1.0 / (hi * hi), 1.0 / (lo * lo), name="-ln",
    )


def curvature_bounds_power(p: float, w) -> Tuple[float, float]:
    """Extremes of ``p (p - 1) t^{p-2}`` over a positive window.

    ``t^{p-2}`` is monotone on ``(0, inf)``, so the extremes sit at the
    endpoints; the sign of ``p (p - 1)`` decides which one is the minimum.

    Examples
    --------
    >>> curvature_bounds_power(3.0, SpectrumWindow(1.0, 2.0))
    (6.0, 12.0)
    """
    w = _window(w)
    p = float(p)
    c = p * (p - 1.0)
    if c == 0.0:
        return 0.0, 0.0
    if p == 2.0:
        return 2.0, 2.0
    v_lo = c * w.lo ** (p - 2.0)
    v_hi = c * w.hi ** (p - 2.0)
    return (min(v_lo, v_hi), max(v_lo, v_hi))


def power_spec(p: float, lo: float, hi: float, negate: bool = False) -> FunctionSpec:
    """``t^p`` (or ``-t^p`` when ``negate``) on a positive interval."""
    if not lo > 0:
        raise DomainViolation("power functions need a positive interval")
    if not lo < hi:
        raise InvalidWindow(f"interval must satisfy lo < hi, got [{lo}, {hi}]")
    p = float(p)
    d, D = curvature_bounds_power(p, SpectrumWindow(lo, hi))
    s = -1.0 if negate else 1.0
    if negate:
        d, D = -D, -d
    return FunctionSpec(
        lambda t: s * np.power(t, p),
        lambda t: s * p * (p - 1.0) * np.power(t, p - 2.0),
        lo, hi, d, D, name=("-" if negate else "") + f"t^{p:g}",
    )


def square_spec(lo: float, hi: float) -> FunctionSpec:
    """``t^2``, the equality case ``d = D = 2``."""
    return FunctionSpec(np.square, lambda t: np.full_like(t, 2.0), lo, hi, 2.0, 2.0, name="t^2")


def secant_gap(spec: FunctionSpec, t):
    """Chord of ``f`` over ``[spec.lo, spec.hi]`` minus ``f``, at ``t``."""
    t = np.asarray(t, dtype=np.float64)
    g, G = spec.lo, spec.hi
    span = G - g
    return (G - t) / span * spec.f(g) + (t - g) / span * spec.f(G) - spec.f(t)


def thm41_bounds(a, b, spec: FunctionSpec, tol_rel: float = DEFAULT_TOL,
                 family: str = "thm41") -> BoundReport:
    """Secant-line bounds ``d/2 W <= secant - A #_f B <= D/2 W``.

    Parameters
    ----------
    a, b : SpdMatrix
    spec : FunctionSpec
        Its interval ``[gamma, Gamma]`` must contain the spectrum of the
        contraction.

    Raises
    ------
    WindowViolation
        If the contraction spectrum escapes ``[gamma, Gamma]``.
    """
    pc = pair_calculus(a, b)
    _require_interval(pc, spec.lo, spec.hi)
    g, G = spec.lo, spec.hi
    w = pc.lift(lambda t: (G - t) * (t - g))
    middle = pc.lift(lambda t: secant_gap(spec, t))
    fg, fG = abs(float(spec.f(g))), abs(float(spec.f(G)))
    terms = pc.lift(lambda t: (np.abs(G - t) * fg + np.abs(t - g) * fG) / (G - g)
                    + np.abs(spec.f(t)))
    return make_report(
        family, _scaled(0.5 * spec.d, w), middle, _scaled(0.5 * spec.D, w), tol_rel,
        {"d": spec.d, "D": spec.D, "gamma": g, "Gamma": G}, terms,
    )


def _require_interval(pc: PairCalculus, lo: float, hi: float) -> None:
    lam_lo, lam_hi = pc.c_eig.lo, pc.c_eig.hi
    s = 1e-10
    if lam_lo < lo - s * abs(lo) or lam_hi > hi + s * abs(hi):
        raise WindowViolation(
            f"spectrum [{lam_lo:.17g}, {lam_hi:.17g}] escapes interval [{lo:.17g}, {hi:.17g}]"
        )


def power_bounds(a, b, p: float, w, tol_rel: float = DEFAULT_TOL) -> BoundReport:
    """Secant bounds for ``t^p`` on the window ``w``.

    For ``p`` outside ``(0, 1)`` this is :func:`thm41_bounds` with ``f = t^p``.
    For ``p`` in ``(0, 1)`` the power is concave and the report uses
    ``f = -t^p``: the middle is ``A #_p B`` minus the secant combination and
    the bounds are ``p(1-p)/2 Gamma^{p-2} W`` and ``p(1-p)/2 gamma^{p-2} W``.
    """
    w = _window(w)
    p = float(p)
    concave = 0.0 < p < 1.0
    spec = power_spec(p, w.lo, w.hi, negate=concave)
    return thm41_bounds(a, b, spec, tol_rel, family=f"power{p:g}")


def thm42_bounds(a, b, nu: float, spec: FunctionSpec, tol_rel: float = DEFAULT_TOL,
                 family: str = "thm42") -> BoundReport:
    """Weighted Jensen-gap bounds around the identity.

    ``nu(1-nu)/2 d V <= (1-nu) f(1) A + nu A #_f B - A^{1/2} f((1-nu) I + nu C) A^{1/2}
    <= nu(1-nu)/2 D V`` with ``V = A^{1/2} (C - I)^2 A^{1/2}``. The interval of
    ``spec`` must contain 1 in its interior.
    """
    nu = float(nu)
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"nu must lie in [0, 1], got {nu}")
    if not (spec.lo < 1.0 - ONE_MARGIN and spec.hi > 1.0 + ONE_MARGIN):
        raise WindowViolation(
            f"interval [{spec.lo:.17g}, {spec.hi:.17g}] must contain 1 in its interior"
        )
    pc = pair_calculus(a, b)
    _require_interval(pc, spec.lo, spec.hi)
    w_a, w_b = (float(x) for x in sy.weights(nu))
    f1 = float(spec.f(1.0))

    def jensen(t):
        return w_a * f1 + w_b * spec.f(t) - spec.f(w_a + w_b * t)

    v = pc.lift(lambda t: (t - 1.0) ** 2)
    k = 0.5 * w_a * w_b
    middle = pc.lift(jensen)
    def magnitudes(t):
        x = w_a + w_b * t
        # rounding x costs about |x f'(x)| ulps in f(x)
        slope = np.abs(spec.f(x * (1.0 + _SLOPE_STEP)) - spec.f(x)) / _SLOPE_STEP
        return w_a * abs(f1) + w_b * np.abs(spec.f(t)) + np.abs(spec.f(x)) + slope

    terms = pc.lift(magnitudes)
    return make_report(
        family, _scaled(k * spec.d, v), middle, _scaled(k * spec.D, v), tol_rel,
        {"d": spec.d, "D": spec.D, "gamma": spec.lo, "Gamma": spec.hi}, terms,
    )


def log_bounds(a, b, nu: float, w, tol_rel: float = DEFAULT_TOL) -> BoundReport:
    """Logarithmic case of :func:`thm42_bounds`.

    ``nu(1-nu)/(2 Gamma^2) V <= A^{1/2} ln((1-nu) I + nu C) A^{1/2} - nu A^{1/2} ln(C) A^{1/2}
    <= nu(1-nu)/(2 gamma^2) V``.
    """
    w = _window(w)
    nu = float(nu)
    if not 0.0 <= nu <= 1.0:
        raise ValueError(f"nu must lie in [0, 1], got {nu}")
    if not (w.lo < 1.0 - ONE_MARGIN and w.hi > 1.0 + ONE_MARGIN):
        raise WindowViolation(f"window [{w.lo:.17g}, {w.hi:.17g}] must contain 1 in its interior")
    pc = pair_calculus(a, b)
    _require_interval(pc, w.lo, w.hi)
    w_a, w_b = (float(x) for x in sy.weights(nu))
    v = pc.lift(lambda t: (t - 1.0) ** 2)

    def gap(t):
        y = w_b * (t - 1.0)
        # log1p is exact near 0 but loses digits as y approaches -1
        with np.errstate(invalid="ignore", divide="ignore"):
            near = np.log1p(y)
        return np.where(np.abs(y) < 0.5, near, np.log(w_a + w_b * t)) - w_b * np.log(t)

    middle = pc.lift(gap)
    terms = pc.lift(lambda t: np.abs(np.log(w_a + w_b * t)) + w_b * np.abs(np.log(t)))
    k = 0.5 * w_a * w_b
    return make_report(
        "log", _scaled(k / (w.hi * w.hi), v), middle, _scaled(k / (w.lo * w.lo), v), tol_rel,
        {"gamma": w.lo, "Gamma": w.hi}, terms,
    )
