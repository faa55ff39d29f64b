"""Random instances, scalar oracles and property suites.

Every random draw comes from a PCG64 stream seeded by
``SeedSequence([seed, *keys])``, where the keys identify the suite, the
dimension and the trial. Any single trial can therefore be regenerated on
its own, and suites do not share streams.
"""
from __future__ import annotations

import hashlib
import io
import math
import zlib
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import functional_bounds as fb
from . import operator_young as oy
from . import scalar_young as sy
from .errors import (
    DomainViolation,
    InvalidCondition,
    NoWitnessFound,
    WindowViolation,
)
from .funcspec import FunctionSpec
from .operator_young import (
    BoundReport,
    PairCalculus,
    SandwichCondition,
    SpectrumWindow,
    pair_calculus,
)
from .symcalc import MAX_DIM, SpdMatrix

__all__ = [
    "GeneratorConfig",
    "TrialRow",
    "Failure",
    "SuiteResult",
    "Family",
    "FAMILIES",
    "EXP_RANGE",
    "trial_rng",
    "haar_orthogonal",
    "random_spd",
    "random_sandwich_condition",
    "random_sandwich_pair",
    "run_suite",
    "run_operator_suites",
    "scalar_family_suites",
    "km_identity_check",
    "surface_grid",
    "nonordering_search",
    "scalar_oracle_check",
    "commuting_oracle_check",
    "format_text",
    "format_csv",
]

# exp'' = exp, so exp families draw from a narrower spectrum to keep e^Gamma finite.
EXP_RANGE = (0.1, 10.0)


# -- configuration and results ---------------------------------------------


@dataclass(frozen=True)
class GeneratorConfig:
    """Seed, dimension, eigenvalue range and trial count for one suite."""

    seed: int = 0
    dim: int = 4
    spectrum_range: Tuple[float, float] = (1e-3, 1e3)
    trials: int = 250

    def __post_init__(self):
        lo, hi = self.spectrum_range
        if not (0 < lo <= hi and math.isfinite(hi)):
            raise ValueError(f"spectrum_range must satisfy 0 < lo <= hi, got {self.spectrum_range}")
        if not 1 <= self.dim <= MAX_DIM:
            raise ValueError(f"dim must lie in [1, {MAX_DIM}], got {self.dim}")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class TrialRow:
    trial: int
    lower_margin: float
    upper_margin: float
    scale: float
    passed: bool


@dataclass(frozen=True)
class Failure:
    trial: int
    digest: str
    lower_margin: float
    upper_margin: float


@dataclass
class SuiteResult:
    """Outcome of one suite; ``worst_margin`` is the smallest relative margin seen."""

    family_tag: str
    dim: int
    trials_run: int = 0
    skipped: int = 0
    failures: List[Failure] = field(default_factory=list)
    worst_margin: float = math.inf
    rows: List[TrialRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, trial: int, report: BoundReport, digest: str,
               tol_rel: Optional[float] = None) -> None:
        lm, um = report.lower_margin, report.upper_margin
        if tol_rel is not None:
            lm, um = replace(lm, tol_rel=tol_rel), replace(um, tol_rel=tol_rel)
        self.trials_run += 1
        self.worst_margin = min(self.worst_margin, lm.relative, um.relative)
        scale = max(lm.scale, um.scale)
        ok = lm.passed and um.passed
        self.rows.append(TrialRow(trial, lm.min_eig_of_difference, um.min_eig_of_difference, scale, ok))
        if not ok:
            self.failures.append(
                Failure(trial, digest, lm.min_eig_of_difference, um.min_eig_of_difference)
            )


def trial_rng(seed: int, *keys) -> np.random.Generator:
    """Independent PCG64 stream for ``(seed, *keys)``; string keys are CRC32-hashed."""
    ints = [int(seed)]
    for k in keys:
        ints.append(zlib.crc32(k.encode()) if isinstance(k, str) else int(k))
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(ints)))


def _digest(*arrays) -> str:
    h = hashlib.sha256()
    for x in arrays:
        h.update(np.ascontiguousarray(np.asarray(x, dtype=np.float64)).tobytes())
    return h.hexdigest()[:16]


# -- generators -------------------------------------------------------------


def haar_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix as a product of plane rotations.

    Givens-QR of a Gaussian matrix accumulates the rotations into ``Q``;
    flipping columns by the signs of ``diag(R)`` makes ``Q`` exactly Haar.
    """
    g = rng.standard_normal((n, n))
    q = np.eye(n)
    for j in range(n):
        for i in range(n - 1, j, -1):
            a, b = g[i - 1, j], g[i, j]
            r = math.hypot(a, b)
            if r == 0.0:
                continue
            c, s = a / r, b / r
            r1, r2 = g[i - 1, j:].copy(), g[i, j:].copy()
            g[i - 1, j:] = c * r1 + s * r2
            g[i, j:] = -s * r1 + c * r2
            c1, c2 = q[:, i - 1].copy(), q[:, i].copy()
            q[:, i - 1] = c * c1 + s * c2
            q[:, i] = -s * c1 + c * c2
    signs = np.where(np.diag(g) < 0, -1.0, 1.0)
    return q * signs


def _log_uniform(rng, lo, hi, size):
    if lo == hi:
        return np.full(size, float(lo))
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def _spd_with_spectrum(rng, lam: np.ndarray) -> SpdMatrix:
    n = lam.shape[0]
    if np.all(lam == lam[0]):
        return SpdMatrix(lam[0] * np.eye(n))
    q = haar_orthogonal(rng, n)
    return SpdMatrix((q * lam) @ q.T)


def random_spd(cfg: GeneratorConfig, trial: int = 0,
               rng: Optional[np.random.Generator] = None) -> SpdMatrix:
    """SPD matrix with log-uniform eigenvalues in ``cfg.spectrum_range`` and a
    Haar-random eigenbasis; deterministic in ``(cfg.seed, cfg.dim, trial)``
    unless an explicit ``rng`` is passed."""
    if rng is None:
        rng = trial_rng(cfg.seed, "spd", cfg.dim, trial)
    lam = _log_uniform(rng, *cfg.spectrum_range, cfg.dim)
    return _spd_with_spectrum(rng, lam)


def random_sandwich_condition(rng: np.random.Generator, lo: float, hi: float,
                              orientation: Optional[str] = None) -> SandwichCondition:
    """Constants ``m' <= m < M <= M'`` drawn log-uniformly from ``[lo, hi]``.

    A tenth of the draws collapse ``m' = m`` and another tenth ``M = M'``, so
    the scalar-multiple edge is exercised.
    """
    if not lo < hi:
        raise InvalidCondition("need lo < hi to separate two spectra")
    while True:
        v = np.sort(_log_uniform(rng, lo, hi, 4))
        if v[1] < v[2]:
            break
    mp, m, M, Mp = (float(x) for x in v)
    u = rng.uniform()
    if u < 0.1:
        mp = m
    elif u < 0.2:
        Mp = M
    if orientation is None:
        orientation = "i" if rng.uniform() < 0.5 else "ii"
    return SandwichCondition(mp, m, M, Mp, orientation)


def random_sandwich_pair(cfg: GeneratorConfig, c: SandwichCondition, trial: int = 0,
                         rng: Optional[np.random.Generator] = None
                         ) -> Tuple[SpdMatrix, SpdMatrix]:
    """Pair satisfying ``c``: spectra drawn inside ``[m', m]`` and ``[M, M']``
    with independent eigenbases, roles swapped for orientation ``ii``."""
    if rng is None:
        rng = trial_rng(cfg.seed, "sandwich", cfg.dim, trial)
    low = _spd_with_spectrum(rng, _log_uniform(rng, c.m_prime, c.m, cfg.dim))
    high = _spd_with_spectrum(rng, _log_uniform(rng, c.M, c.M_prime, cfg.dim))
    a, b = (low, high) if c.orientation == "i" else (high, low)
    c.check(a, b)
    return a, b


# -- family registry ----------------------------------------------------------


class _Skip(Exception):
    pass


@dataclass(frozen=True)
class Family:
    """A bound family together with a generator of hypothesis-satisfying draws."""

    tag: str
    build: Callable[[np.random.Generator, GeneratorConfig, float], BoundReport]
    description: str = ""


def _pair(rng, cfg, rng_range=None):
    lo, hi = rng_range or cfg.spectrum_range
    a = _spd_with_spectrum(rng, _log_uniform(rng, lo, hi, cfg.dim))
    b = _spd_with_spectrum(rng, _log_uniform(rng, lo, hi, cfg.dim))
    return a, b


def _exp_range(cfg):
    lo = max(cfg.spectrum_range[0], EXP_RANGE[0])
    hi = min(cfg.spectrum_range[1], EXP_RANGE[1])
    if lo > hi:
        raise _Skip("spectrum range misses the exp range")
    return lo, hi


def _padded(rng, pc: PairCalculus) -> Tuple[float, float]:
    # A window hugging the spectrum turns the secant gap into a difference of
    # nearly equal terms; pad by a random factor in [1.01, 2] on each side.
    return pc.c_eig.lo / rng.uniform(1.01, 2.0), pc.c_eig.hi * rng.uniform(1.01, 2.0)


def _straddling(rng, pc: PairCalculus) -> Tuple[float, float]:
    lo, hi = _padded(rng, pc)
    return min(lo, 1.0 / rng.uniform(1.01, 2.0)), max(hi, rng.uniform(1.01, 2.0))


_SPECS: Dict[str, Callable[[float, float], FunctionSpec]] = {
    "exp": fb.exp_spec,
    "neglog": fb.neg_log_spec,
    "pow-1": lambda lo, hi: fb.power_spec(-1.0, lo, hi),
    "pow0.5": lambda lo, hi: fb.power_spec(0.5, lo, hi),
    "pow2": lambda lo, hi: fb.power_spec(2.0, lo, hi),
    "pow3": lambda lo, hi: fb.power_spec(3.0, lo, hi),
}


def _simple(fn):
    def build(rng, cfg, nu):
        a, b = _pair(rng, cfg)
        return fn(a, b, nu)
    return build


def _sandwich(fn):
    def build(rng, cfg, nu):
        c = random_sandwich_condition(rng, *cfg.spectrum_range)
        a, b = random_sandwich_pair(cfg, c, rng=rng)
        return fn(a, b, nu, c)
    return build


def _thm41(name):
    def build(rng, cfg, nu):
        a, b = _pair(rng, cfg, _exp_range(cfg) if name == "exp" else None)
        pc = pair_calculus(a, b)
        spec = _SPECS[name](*_padded(rng, pc))
        return fb.thm41_bounds(a, b, spec, family=f"thm41-{name}")
    return build


def _power(p):
    def build(rng, cfg, nu):
        a, b = _pair(rng, cfg)
        return fb.power_bounds(a, b, p, _padded(rng, pair_calculus(a, b)))
    return build


def _thm42(name):
    def build(rng, cfg, nu):
        a, b = _pair(rng, cfg, _exp_range(cfg) if name == "exp" else None)
        spec = _SPECS[name](*_straddling(rng, pair_calculus(a, b)))
        return fb.thm42_bounds(a, b, nu, spec, family=f"thm42-{name}")
    return build


def _log(rng, cfg, nu):
    a, b = _pair(rng, cfg)
    return fb.log_bounds(a, b, nu, _straddling(rng, pair_calculus(a, b)))


def _thm32(rng, cfg, nu):
    a, b = _pair(rng, cfg)
    return oy.thm32_bounds(a, b, nu, oy.spectrum_window(a, b))


def _thm33(rng, cfg, nu):
    a, b = _pair(rng, cfg)
    return oy.thm33_bounds(a, b, nu, oy.spectrum_window(a, b))


def _registry() -> Dict[str, Family]:
    fams = [
        Family("amgm", _simple(oy.amgm_report), "operator AM-GM"),
        Family("thmA", _sandwich(oy.thmA_bounds), "Specht-ratio sandwich"),
        Family("thmB", _sandwich(oy.thmB_bounds), "Kantorovich sandwich"),
        Family("thm31", _simple(oy.thm31_bounds), "f_min/f_max difference bounds"),
        Family("thm32", _thm32, "window-constant difference bounds"),
        Family("thm33", _thm33, "window multiplicative bounds"),
        Family("cor31", _sandwich(oy.cor31_bounds), "sandwich multiplicative bounds"),
    ]
    for name in _SPECS:
        fams.append(Family(f"thm41-{name}", _thm41(name), "secant bounds"))
    for p in (-1.0, 0.5, 2.0, 3.0):
        fams.append(Family(f"power{p:g}", _power(p), "power secant bounds"))
    for name in _SPECS:
        fams.append(Family(f"thm42-{name}", _thm42(name), "weighted Jensen bounds"))
    fams.append(Family("log", _log, "logarithmic Jensen bounds"))
    return {f.tag: f for f in fams}


FAMILIES: Dict[str, Family] = _registry()

_SKIPPABLE = (_Skip, WindowViolation, InvalidCondition, DomainViolation)


def run_suite(family, cfg: GeneratorConfig, tol_rel: float = oy.DEFAULT_TOL) -> SuiteResult:
    """Run ``cfg.trials`` draws of one family and collect the margins.

    Draws that violate the family's hypotheses are counted in ``skipped``.
    """
    fam = FAMILIES[family] if isinstance(family, str) else family
    res = SuiteResult(fam.tag, cfg.dim)
    for trial in range(cfg.trials):
        rng = trial_rng(cfg.seed, fam.tag, cfg.dim, trial)
        nu = float(rng.uniform())
        try:
            rep = fam.build(rng, cfg, nu)
        except _SKIPPABLE:
            res.skipped += 1
            continue
        res.record(trial, rep, _digest(rep.middle.a, [nu]), tol_rel)
    return res


def run_operator_suites(seed: int, dims: Sequence[int], trials: int,
                        families: Optional[Iterable[str]] = None,
                        spectrum_range: Tuple[float, float] = (1e-3, 1e3),
                        tol_rel: float = oy.DEFAULT_TOL) -> List[SuiteResult]:
    """Every selected family (default: all of :data:`FAMILIES`) for every dimension."""
    tags = list(families) if families is not None else list(FAMILIES)
    out = []
    for dim in dims:
        cfg = GeneratorConfig(seed, dim, spectrum_range, trials)
        for tag in tags:
            out.append(run_suite(tag, cfg, tol_rel))
    return out


# -- scalar suites ------------------------------------------------------------


def _scalar_draws(rng, n, lo, hi):
    a = _log_uniform(rng, lo, hi, n)
    b = _log_uniform(rng, lo, hi, n)
    nu = rng.uniform(0.0, 1.0, n)
    return a, b, nu


def scalar_family_suites(seed: int, n: int = 100_000, lo: float = 1e-6,
                         hi: float = 1e6, rel: float = 1e-12) -> List[SuiteResult]:
    """Vectorized check of every scalar family on ``n`` log-uniform draws.

    ``worst_margin`` is the smallest of ``(middle - lower)`` and
    ``(upper - middle)`` divided by ``max(1, |middle|)``.
    """
    rng = trial_rng(seed, "scalar")
    a, b, nu = _scalar_draws(rng, n, lo, hi)
    out = []
    for fam in sy.ScalarBoundFamily:
        r = sy.evaluate_family(fam, a, b, nu)
        mid = np.asarray(r.middle)
        den = np.maximum(1.0, np.abs(mid))
        with np.errstate(invalid="ignore"):
            m_lo = (mid - np.asarray(r.lower)) / den
            m_up = (np.asarray(r.upper) - mid) / den
        ok = np.asarray(r.holds(rel))
        res = SuiteResult(fam.tag, 0, trials_run=n)
        res.worst_margin = float(np.nanmin(np.minimum(m_lo, m_up)))
        for i in np.flatnonzero(~ok):
            res.failures.append(Failure(int(i), _digest([a[i], b[i], nu[i]]), float(m_lo[i]), float(m_up[i])))
        out.append(res)
    return out


def km_identity_check(seed: int, n: int = 10_000, lo: float = 1e-6, hi: float = 1e6,
                      rel: float = 1e-12) -> SuiteResult:
    """At ``nu = 1/2`` both difference bounds equal the gap."""
    rng = trial_rng(seed, "km")
    a = _log_uniform(rng, lo, hi, n)
    b = _log_uniform(rng, lo, hi, n)
    r = sy.evaluate_family(sy.ScalarBoundFamily.KittanehManasrahDiff, a, b, 0.5)
    mid = np.asarray(r.middle)
    err = np.maximum(np.abs(np.asarray(r.lower) - mid), np.abs(np.asarray(r.upper) - mid))
    res = SuiteResult("km-identity", 0, trials_run=n)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel_err = np.where(mid > 0, err / mid, np.where(err == 0, 0.0, np.inf))
    res.worst_margin = float(-rel_err.max())
    for i in np.flatnonzero(err > rel * mid):
        res.failures.append(Failure(int(i), _digest([a[i], b[i]]), float(rel_err[i]), float(rel_err[i])))
    return res


# -- non-ordering search --------------------------------------------------------


def _cell_centres(lo, hi, n):
    step = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * step


def surface_grid(mode: str = "P", grid: Tuple[int, int] = (200, 200),
                 domain: Optional[Tuple[Tuple[float, float], Tuple[float, float]]] = None):
    """Cell-centred ``(nu, x)`` grid with the two competing bounds.

    Returns ``(nu, x, first, second)`` as 2-D arrays indexed ``[i_nu, i_x]``;
    ``first``/``second`` are ``P1``/``P2`` in mode ``"P"`` and ``Q1``/``Q2``
    in mode ``"Q"``.
    """
    mode = mode.upper()
    if mode not in ("P", "Q"):
        raise ValueError(f"mode must be 'P' or 'Q', got {mode!r}")
    if domain is None:
        domain = ((0.0, 1.0), (0.0, 2.0 if mode == "P" else 10.0))
    (nlo, nhi), (xlo, xhi) = domain
    if not (0.0 <= nlo < nhi <= 1.0 and 0.0 <= xlo < xhi and math.isfinite(xhi)):
        raise ValueError(f"domain must lie in [0,1] x [0,inf) with lo < hi, got {domain}")
    n_nu, n_x = (int(g) for g in grid)
    if n_nu < 1 or n_x < 1:
        raise ValueError("grid sizes must be positive")
    nu, x = np.meshgrid(_cell_centres(nlo, nhi, n_nu), _cell_centres(xlo, xhi, n_x), indexing="ij")
    p1, p2, q1, q2 = sy.surface_values(nu, x)
    if mode == "P":
        return nu, x, p1, p2
    return nu, x, q1, q2


def nonordering_search(grid: Tuple[int, int] = (200, 200), domain=None, mode: str = "P"):
    """One grid point where ``second - first > 0`` and one where it is ``< 0``.

    Returns
    -------
    positive, negative : (nu, x, difference)

    Raises
    ------
    NoWitnessFound
        If one of the signs does not occur on the grid (grid too coarse; not
        a disproof).
    """
    nu, x, first, second = surface_grid(mode, grid, domain)
    diff = second - first
    pos = np.flatnonzero(diff > 0)
    neg = np.flatnonzero(diff < 0)
    if pos.size == 0 or neg.size == 0:
        raise NoWitnessFound(
            f"mode {mode}: no sign change on a {grid[0]}x{grid[1]} grid"
        )
    ip = pos[np.argmax(diff.ravel()[pos])]
    ineg = neg[np.argmin(diff.ravel()[neg])]

    def pick(i):
        return float(nu.ravel()[i]), float(x.ravel()[i]), float(diff.ravel()[i])

    return pick(ip), pick(ineg)


# -- scalar reference formulas -----------------------------------------------
#
# Each returns (lower, middle, upper, scale) evaluated directly on the pair
# (a, b) so the operator path is compared against independent arithmetic.
# ``scale`` bounds the magnitude of the terms that cancel inside the middle.


def _ref_amgm(a, b, nu):
    g = a ** (1.0 - nu) * b ** nu
    m = (1.0 - nu) * a + nu * b
    return g, m, np.full_like(m, np.inf), m


def _ref_thm31(a, b, nu):
    r = sy.evaluate_family(sy.ScalarBoundFamily.NewDiff, a, b, nu)
    return r.lower, r.middle, r.upper, (1.0 - nu) * a + nu * b


def _ref_thm32(a, b, nu, w):
    mn, mx = oy.extremize_fminmax(w)
    k = 0.25 * nu * (1.0 - nu)
    return k * mn * a, sy.young_gap(a, b, nu), k * mx * a, (1.0 - nu) * a + nu * b


def _ref_ratio_coefs(a, b, nu, lc, uc):
    g = a ** (1.0 - nu) * b ** nu
    m = (1.0 - nu) * a + nu * b
    with np.errstate(over="ignore", invalid="ignore"):
        return lc * g, m, uc * g, m


def _ref_thm33(a, b, nu, w):
    vv = 0.5 * nu * (1.0 - nu)
    lc = math.exp(vv * (1.0 - min(1.0, w.hi) / max(1.0, w.lo)) ** 2)
    with np.errstate(over="ignore"):
        uc = np.exp(vv * (max(1.0, w.hi) / min(1.0, w.lo) - 1.0) ** 2)
    return _ref_ratio_coefs(a, b, nu, lc, float(uc))


def _ref_cor31(a, b, nu, c):
    vv = 0.5 * nu * (1.0 - nu)
    with np.errstate(over="ignore"):
        uc = float(np.exp(vv * (c.h_prime - 1.0) ** 2))
    return _ref_ratio_coefs(a, b, nu, math.exp(vv * ((c.h - 1.0) / c.h) ** 2), uc)


def _ref_thmA(a, b, nu, c):
    r = min(nu, 1.0 - nu)
    return _ref_ratio_coefs(a, b, nu, sy.specht_ratio(c.h ** r), sy.specht_ratio(c.h_prime))


def _ref_thmB(a, b, nu, c):
    r = min(nu, 1.0 - nu)
    return _ref_ratio_coefs(a, b, nu, sy.kantorovich(c.h) ** r, sy.kantorovich(c.h_prime) ** (1.0 - r))


def _ref_thm41(a, b, spec: FunctionSpec):
    g, G = spec.lo, spec.hi
    fg, fG, fx = spec.f(g), spec.f(G), spec.f(b / a)
    sec = ((G * a - b) * fg + (b - g * a) * fG) / (G - g)
    x = b / a
    w = a * (G - x) * (x - g)
    scale = (np.abs(G * a - b) * abs(fg) + np.abs(b - g * a) * abs(fG)) / (G - g) + a * np.abs(fx)
    return 0.5 * spec.d * w, sec - a * fx, 0.5 * spec.D * w, scale


def _ref_thm42(a, b, nu, spec: FunctionSpec):
    x = b / a
    r = sy.lemma21_bounds(spec, np.ones_like(x), x, nu)
    f1 = abs(float(spec.f(1.0)))
    scale = a * ((1.0 - nu) * f1 + nu * np.abs(spec.f(x)) + np.abs(spec.f((1.0 - nu) + nu * x)))
    return a * r.lower, a * r.middle, a * r.upper, scale


def _ref_log(a, b, nu, w):
    x = b / a
    v = a * (x - 1.0) ** 2
    k = 0.5 * nu * (1.0 - nu)
    mid = a * (np.log((1.0 - nu) + nu * x) - nu * np.log(x))
    scale = a * (np.abs(np.log((1.0 - nu) + nu * x)) + nu * np.abs(np.log(x)))
    return k / w.hi ** 2 * v, mid, k / w.lo ** 2 * v, scale


def _oracle_cases(rng, a_vec, b_vec, nu, spec_rng_pair=None):
    """Yield ``(tag, report, reference)`` for every family applicable to the
    diagonal pair ``(diag(a_vec), diag(b_vec))``."""
    A, B = SpdMatrix(np.diag(a_vec)), SpdMatrix(np.diag(b_vec))
    pc = pair_calculus(A, B)
    w = pc.window()
    yield "amgm", oy.amgm_report(A, B, nu), _ref_amgm(a_vec, b_vec, nu)
    yield "thm31", oy.thm31_bounds(A, B, nu), _ref_thm31(a_vec, b_vec, nu)
    yield "thm32", oy.thm32_bounds(A, B, nu, w), _ref_thm32(a_vec, b_vec, nu, w)
    yield "thm33", oy.thm33_bounds(A, B, nu, w), _ref_thm33(a_vec, b_vec, nu, w)
    try:
        c = SandwichCondition.from_pair(A, B)
    except InvalidCondition:
        c = None
    if c is not None:
        yield "cor31", oy.cor31_bounds(A, B, nu, c), _ref_cor31(a_vec, b_vec, nu, c)
        yield "thmA", oy.thmA_bounds(A, B, nu, c), _ref_thmA(a_vec, b_vec, nu, c)
        yield "thmB", oy.thmB_bounds(A, B, nu, c), _ref_thmB(a_vec, b_vec, nu, c)
    pad = _padded(rng, pc)
    strad = _straddling(rng, pc)
    for name, mk in _SPECS.items():
        if name == "exp":
            continue
        spec = mk(*pad)
        yield f"thm41-{name}", fb.thm41_bounds(A, B, spec), _ref_thm41(a_vec, b_vec, spec)
        spec2 = mk(*strad)
        yield f"thm42-{name}", fb.thm42_bounds(A, B, nu, spec2), _ref_thm42(a_vec, b_vec, nu, spec2)
    for p in (-1.0, 0.5, 2.0, 3.0):
        spec = fb.power_spec(p, *pad, negate=0.0 < p < 1.0)
        yield f"power{p:g}", fb.power_bounds(A, B, p, pad), _ref_thm41(a_vec, b_vec, spec)
    sw = SpectrumWindow(*strad)
    yield "log", fb.log_bounds(A, B, nu, sw), _ref_log(a_vec, b_vec, nu, sw)
    if spec_rng_pair is not None:
        ea, eb = spec_rng_pair
        E_A, E_B = SpdMatrix(np.diag(ea)), SpdMatrix(np.diag(eb))
        epc = pair_calculus(E_A, E_B)
        spec = fb.exp_spec(*_padded(rng, epc))
        yield "thm41-exp", fb.thm41_bounds(E_A, E_B, spec), _ref_thm41(ea, eb, spec)
        spec2 = fb.exp_spec(*_straddling(rng, epc))
        yield "thm42-exp", fb.thm42_bounds(E_A, E_B, nu, spec2), _ref_thm42(ea, eb, nu, spec2)


def _compare(report: BoundReport, ref, floor) -> float:
    """Worst ``|operator - reference| / scale`` over the diagonal, with the
    off-diagonal entries (which must vanish) included. ``floor`` (the weighted
    arithmetic mean) bounds the scale from below."""
    ref_scale = np.maximum(np.abs(np.asarray(ref[3], dtype=np.float64)), floor)
    worst = 0.0
    with np.errstate(invalid="ignore"):
        for mat, r in zip((report.lower, report.middle, report.upper), ref[:3]):
            d = np.diag(mat.a)
            r = np.asarray(r, dtype=np.float64)
            if np.isinf(d).any() or np.isinf(r).any():
                # vacuous bound: both sides must be +inf together
                if not np.array_equal(np.isposinf(d), np.isposinf(np.broadcast_to(r, d.shape))):
                    return math.inf
                keep = np.isfinite(d)
                d, r, sc = d[keep], np.broadcast_to(r, keep.shape)[keep], ref_scale[keep]
            else:
                sc = ref_scale
            if d.size == 0:
                continue
            scale = np.maximum(sc, np.maximum(np.abs(d), np.abs(r)))
            scale[scale == 0] = 1.0
            worst = max(worst, float(np.max(np.abs(d - r) / scale)))
            if mat.dim > 1 and np.isfinite(mat.a).all():
                off = mat.a - np.diag(np.diag(mat.a))
                worst = max(worst, float(np.abs(off).max() / scale.max()))
    return worst


def _oracle_run(tag: str, seed: int, trials: int, dim: int, rel: float,
                lo: float, hi: float) -> SuiteResult:
    res = SuiteResult(tag, dim)
    for trial in range(trials):
        rng = trial_rng(seed, tag, dim, trial)
        kind = trial % 10
        nu = float(rng.uniform())
        a_vec = _log_uniform(rng, lo, hi, dim)
        b_vec = _log_uniform(rng, lo, hi, dim)
        if kind == 0:
            b_vec = a_vec.copy()
        elif kind == 1:
            nu = 0.0
        elif kind == 2:
            nu = 1.0
        elif kind in (3, 4) and dim > 1:
            # separated spectra so the sandwich families apply
            split = math.sqrt(lo * hi)
            a_vec = _log_uniform(rng, lo, split, dim)
            b_vec = _log_uniform(rng, split * 1.5, hi, dim)
            if kind == 4:
                a_vec, b_vec = b_vec, a_vec
        ea = _log_uniform(rng, *EXP_RANGE, dim)
        eb = ea.copy() if kind == 0 else _log_uniform(rng, *EXP_RANGE, dim)
        digest = _digest(a_vec, b_vec, [nu])
        for fam, rep, ref in _oracle_cases(rng, a_vec, b_vec, nu, (ea, eb)):
            if fam.endswith("-exp"):
                floor = (1.0 - nu) * ea + nu * eb
            else:
                floor = (1.0 - nu) * a_vec + nu * b_vec
            err = _compare(rep, ref, floor)
            res.trials_run += 1
            res.worst_margin = min(res.worst_margin, -err)
            if not err <= rel:
                res.failures.append(Failure(trial, f"{fam}:{digest}", -err, -err))
    return res


def scalar_oracle_check(trials: int = 10_000, seed: int = 0, rel: float = 1e-12,
                        lo: float = 1e-3, hi: float = 1e3) -> SuiteResult:
    """Every operator family on ``1 x 1`` inputs against the scalar formulas.

    Agreement is measured relative to the magnitude of the terms that enter
    each quantity (at least the weighted arithmetic mean). Every tenth trial
    has ``a = b``, and others use ``nu`` in ``{0, 1}``.
    """
    return _oracle_run("oracle-1x1", seed, trials, 1, rel, lo, hi)


def commuting_oracle_check(trials: int = 1000, dim: int = 4, seed: int = 0,
                           rel: float = 1e-11, lo: float = 1e-3, hi: float = 1e3) -> SuiteResult:
    """Simultaneously diagonal pairs: every report must be diagonal and match
    the scalar formulas entry by entry (with the shared window/condition)."""
    return _oracle_run("oracle-commuting", seed, trials, dim, rel, lo, hi)


# -- reporting -------------------------------------------------------------------


def _g6(x: float) -> str:
    return f"{x:.6g}"


def _g17(x: float) -> str:
    return f"{x:.17g}"


def format_text(results: Sequence[SuiteResult]) -> str:
    """Human-readable report: one line per suite, then one line per failure."""
    buf = io.StringIO()
    n_fail = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        buf.write(
            f"{status} {r.family_tag} dim={r.dim} trials={r.trials_run} skipped={r.skipped} "
            f"failures={len(r.failures)} worst_rel_margin={_g6(r.worst_margin)}\n"
        )
        for f in r.failures:
            buf.write(
                f"  failure trial={f.trial} digest={f.digest} "
                f"lower_margin={_g6(f.lower_margin)} upper_margin={_g6(f.upper_margin)}\n"
            )
        n_fail += not r.passed
    failing = sorted({r.family_tag for r in results if not r.passed})
    if failing:
        buf.write(f"overall: FAIL ({len(failing)} failing: {', '.join(failing)})\n")
    else:
        buf.write(f"overall: PASS ({len(results)} suites)\n")
    return buf.getvalue()


CSV_HEADER = "family,dim,trial,lower_margin,upper_margin,scale,pass"


def format_csv(results: Sequence[SuiteResult]) -> str:
    """One row per recorded operator trial, doubles printed round-trippably."""
    lines = [CSV_HEADER]
    for r in results:
        for row in r.rows:
            lines.append(",".join([
                r.family_tag, str(r.dim), str(row.trial), _g17(row.lower_margin),
                _g17(row.upper_margin), _g17(row.scale), "1" if row.passed else "0",
            ]))
    return "\n".join(lines) + "\n"
