"""Dense symmetric linear algebra for operator-mean computations.

Every matrix function here goes through a spectral decomposition computed by
cyclic Jacobi rotations. Matrices are immutable value objects and cache their
own decomposition, so all functions of one operand share a single eigenbasis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from . import _kernels
from .errors import (
    DimLimitExceeded,
    DimMismatch,
    DomainViolation,
    NonConvergence,
    NotPositiveDefinite,
)

__all__ = [
    "MAX_DIM",
    "JACOBI_TOL",
    "JACOBI_MAX_SWEEPS",
    "SPD_RTOL",
    "SymMatrix",
    "SpdMatrix",
    "SpectralDecomposition",
    "LoewnerMargin",
    "as_sym",
    "eigen_sym",
    "apply_scalar_fn",
    "spd_sqrt",
    "spd_inv_sqrt",
    "mat_power",
    "mat_log",
    "mat_exp",
    "mat_abs",
    "contraction",
    "congruence",
    "loewner_cmp",
    "identity",
    "diag",
    "read_matrix",
    "write_matrix",
    "format_matrix",
    "parse_matrix",
]

MAX_DIM = 64
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100
SPD_RTOL = 1e-12

POSITIVE = (np.finfo(float).tiny, math.inf)
NONNEGATIVE = (0.0, math.inf)

ArrayLike = Union[np.ndarray, Sequence[Sequence[float]], "SymMatrix"]


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and an orthogonal matrix of eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lo(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def hi(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self, values: Optional[np.ndarray] = None) -> np.ndarray:
        """Return ``Q diag(values) Q^T`` (the original matrix when ``values`` is None)."""
        lam = self.eigenvalues if values is None else values
        q = self.eigenvectors
        out = (q * lam) @ q.T
        return 0.5 * (out + out.T)


class SymMatrix:
    """Real symmetric matrix, symmetrized exactly on construction.

    Parameters
    ----------
    entries : array_like, shape (n, n)
        Stored as ``(X + X^T) / 2``; the stored array is read-only.
    """

    __slots__ = ("_a", "__dict__")

    def __init__(self, entries: ArrayLike):
        if isinstance(entries, SymMatrix):
            a = entries.a
            if "eig" in entries.__dict__:
                self.__dict__["eig"] = entries.__dict__["eig"]
        else:
            a = np.array(entries, dtype=np.float64)
            if a.ndim == 0:
                a = a.reshape(1, 1)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise DimMismatch(f"expected a square matrix, got shape {a.shape}")
            if a.shape[0] < 1:
                raise DimMismatch("matrix dimension must be at least 1")
            if not np.array_equal(a, a.T):
                # halve first so entries near the float limit do not overflow
                a = 0.5 * a + 0.5 * a.T
        a.setflags(write=False)
        self._a = a

    @property
    def a(self) -> np.ndarray:
        return self._a

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @cached_property
    def eig(self) -> SpectralDecomposition:
        return eigen_sym(self)

    @cached_property
    def fro(self) -> float:
        top = float(np.abs(self._a).max())
        if top == 0.0 or not math.isfinite(top):
            return top
        # scaled so squares of entries near the float limit stay finite
        return top * float(np.linalg.norm(self._a / top))

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self._a.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return self._a.shape == other._a.shape and bool(np.array_equal(self._a, other._a))

    __hash__ = None

    def __add__(self, other):
        return SymMatrix(self._a + as_sym(other).a)

    def __sub__(self, other):
        return SymMatrix(self._a - as_sym(other).a)

    def __neg__(self):
        return SymMatrix(-self._a)

    def __mul__(self, scalar):
        return SymMatrix(float(scalar) * self._a)

    __rmul__ = __mul__


class SpdMatrix(SymMatrix):
    """Symmetric positive definite matrix.

    Construction rejects matrices whose smallest eigenvalue does not exceed
    ``SPD_RTOL`` times the largest.
    """

    __slots__ = ()

    def __init__(self, entries: ArrayLike):
        super().__init__(entries)
        if not np.all(np.isfinite(self.a)):
            raise NotPositiveDefinite("matrix has non-finite entries")
        lam = self.eig.eigenvalues
        if not (lam[0] > SPD_RTOL * lam[-1] and lam[-1] > 0):
            raise NotPositiveDefinite(
                f"eigenvalue range [{lam[0]:.3e}, {lam[-1]:.3e}] is not positive definite"
            )


@dataclass(frozen=True)
class LoewnerMargin:
    """Certificate for ``X <= Y``: the minimum eigenvalue of ``Y - X``.

    The comparison passes iff
    ``min_eig_of_difference >= -(tol_rel * scale + noise)``. ``scale`` is the
    larger Frobenius norm of the two operands; ``noise`` is an absolute
    rounding allowance for operands that are themselves differences of much
    larger terms (zero unless the caller supplies one).
    """

    min_eig_of_difference: float
    scale: float
    tol_rel: float
    noise: float = 0.0

    @property
    def passed(self) -> bool:
        return bool(self.min_eig_of_difference >= -(self.tol_rel * self.scale + self.noise))

    @property
    def relative(self) -> float:
        """Margin over scale; a negative margin within ``noise`` counts as 0."""
        m = self.min_eig_of_difference
        if math.isinf(m):
            return m
        if m < 0:
            m = min(0.0, m + self.noise)
        if self.scale == 0.0:
            return 0.0 if m == 0.0 else math.copysign(math.inf, m)
        return m / self.scale

    @classmethod
    def vacuous(cls, scale: float, tol_rel: float) -> "LoewnerMargin":
        return cls(math.inf, scale, tol_rel)


def as_sym(x: ArrayLike) -> SymMatrix:
    return x if isinstance(x, SymMatrix) else SymMatrix(x)


def identity(n: int) -> SymMatrix:
    return SymMatrix(np.eye(n))


def diag(values: Sequence[float]) -> SymMatrix:
    return SymMatrix(np.diag(np.asarray(values, dtype=np.float64)))


def _check_dims(*mats: SymMatrix) -> None:
    dims = {m.dim for m in mats}
    if len(dims) != 1:
        raise DimMismatch(f"dimension mismatch: {sorted(dims)}")


def eigen_sym(x: ArrayLike) -> SpectralDecomposition:
    """Spectral decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Converges when the off-diagonal Frobenius norm is at most
    ``JACOBI_TOL * ||X||_F``. Eigenvalues are returned ascending; ties keep
    their original diagonal order. Dimensions up to ``MAX_DIM`` are supported.

    Raises
    ------
    NonConvergence
        If the off-diagonal part has not vanished after ``JACOBI_MAX_SWEEPS``.
    DimLimitExceeded
        If the dimension exceeds ``MAX_DIM``.
    """
    xs = as_sym(x)
    if xs.dim > MAX_DIM:
        raise DimLimitExceeded(f"dimension {xs.dim} exceeds the limit {MAX_DIM}")
    if not np.all(np.isfinite(xs.a)):
        raise DomainViolation("cannot decompose a matrix with non-finite entries")
    # a power-of-two scaling is exact and keeps the sweeps clear of overflow
    exp2 = math.frexp(float(np.abs(xs.a).max()))[1]
    a = np.ldexp(xs.a, -exp2)
    tol = JACOBI_TOL * float(np.linalg.norm(a))
    d, v, sweeps = _kernels.jacobi_eigh(a, tol, JACOBI_MAX_SWEEPS)
    d = np.ldexp(d, exp2)
    if sweeps < 0:
        raise NonConvergence(
            f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (dim {xs.dim})"
        )
    order = np.argsort(d, kind="stable")
    lam = d[order]
    q = np.ascontiguousarray(v[:, order])
    lam.setflags(write=False)
    q.setflags(write=False)
    return SpectralDecomposition(lam, q, sweeps)


def apply_scalar_fn(
    x: ArrayLike,
    f: Callable[[np.ndarray], np.ndarray],
    domain: Optional[Tuple[float, float]] = None,
) -> SymMatrix:
    """Functional calculus ``Q f(Lambda) Q^T``.

    Parameters
    ----------
    x : SymMatrix or array_like
    f : callable
        Vectorized scalar function applied to the eigenvalues.
    domain : (lo, hi), optional
        Closed interval on which ``f`` is defined. An eigenvalue outside it
        raises :class:`DomainViolation`.
    """
    xs = as_sym(x)
    dec = xs.eig
    lam = dec.eigenvalues
    if domain is not None:
        lo, hi = domain
        if lam[0] < lo or lam[-1] > hi:
            raise DomainViolation(
                f"spectrum [{lam[0]:.6g}, {lam[-1]:.6g}] outside domain [{lo:.6g}, {hi:.6g}]"
            )
    vals = np.asarray(f(lam), dtype=np.float64)
    if vals.shape != lam.shape:
        vals = np.broadcast_to(vals, lam.shape)
    return SymMatrix(dec.reconstruct(vals))


def spd_sqrt(x: ArrayLike) -> SymMatrix:
    return apply_scalar_fn(x, np.sqrt, NONNEGATIVE)


def spd_inv_sqrt(x: ArrayLike) -> SymMatrix:
    return apply_scalar_fn(x, lambda t: 1.0 / np.sqrt(t), POSITIVE)


def mat_power(x: ArrayLike, p: float) -> SymMatrix:
    """``X**p`` for SPD ``X`` (any real ``p``; ``p`` = 0 gives I, 1 gives X)."""
    p = float(p)
    if p == 0.0:
        return identity(as_sym(x).dim)
    if p == 1.0:
        return as_sym(x)
    return apply_scalar_fn(x, lambda t: np.power(t, p), POSITIVE)


def mat_log(x: ArrayLike) -> SymMatrix:
    return apply_scalar_fn(x, np.log, POSITIVE)


def mat_exp(x: ArrayLike) -> SymMatrix:
    return apply_scalar_fn(x, np.exp)


def mat_abs(x: ArrayLike) -> SymMatrix:
    """Spectral absolute value ``|X| = (X^2)^{1/2}``."""
    return apply_scalar_fn(x, np.abs)


def congruence(a_half: ArrayLike, m: ArrayLike) -> SymMatrix:
    """``A_half @ M @ A_half`` for symmetric ``A_half``; preserves PSD of ``M``."""
    ah, ms = as_sym(a_half), as_sym(m)
    _check_dims(ah, ms)
    return SymMatrix(ah.a @ ms.a @ ah.a)


def contraction(a: SpdMatrix, b: ArrayLike) -> SymMatrix:
    """``A^{-1/2} B A^{-1/2}``, the operator whose spectrum conditions every bound."""
    bs = as_sym(b)
    _check_dims(a, bs)
    return congruence(spd_inv_sqrt(a), bs)


def loewner_cmp(x: ArrayLike, y: ArrayLike, tol_rel: float = 1e-9,
                noise: float = 0.0) -> LoewnerMargin:
    """Compare ``X <= Y`` in the Loewner order.

    Returns the minimum eigenvalue of ``Y - X`` together with the scale
    ``max(||X||_F, ||Y||_F)`` and the absolute allowance ``noise``.
    """
    if tol_rel < 0 or noise < 0:
        raise ValueError("tol_rel and noise must be nonnegative")
    xs, ys = as_sym(x), as_sym(y)
    _check_dims(xs, ys)
    scale = max(xs.fro, ys.fro)
    diff = SymMatrix(ys.a - xs.a)
    return LoewnerMargin(diff.eig.lo, scale, float(tol_rel), float(noise))


# -- text format ------------------------------------------------------------


def format_matrix(x: ArrayLike) -> str:
    """Serialize as ``dim`` followed by ``dim`` rows of 17-significant-digit numbers."""
    a = as_sym(x).a
    lines = [str(a.shape[0])]
    for row in a:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> SymMatrix:
    """Parse the matrix text format; the result is symmetrized by averaging."""
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ValueError("empty matrix file")
    if len(rows[0]) != 1:
        raise ValueError("first line must hold the dimension")
    try:
        n = int(rows[0][0])
    except ValueError as exc:
        raise ValueError(f"bad dimension line {rows[0][0]!r}") from exc
    body = rows[1:]
    if n < 1 or len(body) != n or any(len(r) != n for r in body):
        raise ValueError(f"expected {n} rows of {n} numbers")
    try:
        a = np.array([[float(v) for v in r] for r in body])
    except ValueError as exc:
        raise ValueError(f"non-numeric matrix entry: {exc}") from exc
    return SymMatrix(a)


def read_matrix(path: Union[str, Path]) -> SymMatrix:
    return parse_matrix(Path(path).read_text())


def write_matrix(path: Union[str, Path], x: ArrayLike) -> None:
    Path(path).write_text(format_matrix(x))
