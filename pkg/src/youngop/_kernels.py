"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

The two flavours perform the same floating-point operations in the same
order, so they agree to rounding (usually bit for bit). ``jacobi_eigh`` and
``young_gap_scaled`` dispatch on ``JIT_ENABLED``.
"""
import math

import numpy as np

from ._jit import JIT_ENABLED, njit

__all__ = [
    "jacobi_eigh",
    "jacobi_eigh_numba",
    "jacobi_eigh_numpy",
    "young_gap_scaled",
    "young_gap_scaled_numba",
    "young_gap_scaled_numpy",
    "SERIES_CUTOFF",
]

# Below this log-ratio the gap uses its positive power series; above it the
# expm1 form has no harmful cancellation.
SERIES_CUTOFF = 2.0
_SERIES_MAX_TERMS = 80


def _rotation(app, aqq, apq):
    theta = (aqq - app) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    tau = s / (1.0 + c)
    return t, s, tau


_rotation_jit = njit(cache=True)(_rotation)


@njit(cache=True)
def _off_norm_jit(a):
    n = a.shape[0]
    acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += a[i, j] * a[i, j]
    return math.sqrt(acc)


@njit(cache=True)
def _jacobi_jit(x, tol, max_sweeps):
    n = x.shape[0]
    a = x.copy()
    v = np.eye(n)
    for sweep in range(max_sweeps + 1):
        if _off_norm_jit(a) <= tol:
            d = np.empty(n)
            for i in range(n):
                d[i] = a[i, i]
            return d, v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                t, s, tau = _rotation_jit(a[p, p], a[q, q], apq)
                for k in range(n):
                    if k == p or k == q:
                        continue
                    akp = a[k, p]
                    akq = a[k, q]
                    new_p = akp - s * (akq + tau * akp)
                    new_q = akq + s * (akp - tau * akq)
                    a[k, p] = new_p
                    a[p, k] = new_p
                    a[k, q] = new_q
                    a[q, k] = new_q
                a[p, p] = a[p, p] - t * apq
                a[q, q] = a[q, q] + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp - s * (vkq + tau * vkp)
                    v[k, q] = vkq + s * (vkp - tau * vkq)
    d = np.empty(n)
    for i in range(n):
        d[i] = a[i, i]
    return d, v, -1


def jacobi_eigh_numba(x, tol, max_sweeps=100):
    """Cyclic Jacobi on a symmetric array; returns ``(d, V, sweeps)``.

    ``d`` is unsorted. ``sweeps`` is ``-1`` when the off-diagonal Frobenius
    norm did not fall to ``tol`` within ``max_sweeps`` sweeps.
    """
    x = np.array(x, dtype=np.float64, order="C")
    return _jacobi_jit(x, float(tol), int(max_sweeps))


def jacobi_eigh_numpy(x, tol, max_sweeps=100):
    """Same algorithm as :func:`jacobi_eigh_numba`, one vectorized rotation at a time."""
    a = np.array(x, dtype=np.float64, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    offmask = ~np.eye(n, dtype=bool)
    for sweep in range(max_sweeps + 1):
        if math.sqrt(float(np.sum(a[offmask] ** 2))) <= tol:
            return a.diagonal().copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                t, s, tau = _rotation(app, aqq, apq)
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                new_p = cp - s * (cq + tau * cp)
                new_q = cq + s * (cp - tau * cq)
                a[:, p] = new_p
                a[p, :] = new_p
                a[:, q] = new_q
                a[q, :] = new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp - s * (vq + tau * vp)
                v[:, q] = vq + s * (vp - tau * vq)
    return a.diagonal().copy(), v, -1


# ---------------------------------------------------------------------------
# Scaled Young gap.
#
# With lo <= hi, u = ln(hi/lo) >= 0, weight w_hi on hi and w_lo = 1 - w_hi on
# lo, the gap is lo * g where
#     g = w_hi*expm1(u) - expm1(w_hi*u)
#       = -e^u*expm1(-w_lo*u) - w_lo*expm1(u)
#       = w_hi*w_lo * sum_{k>=2} (1 + w_hi + ... + w_hi^(k-2)) u^k / k!
# Every series term is nonnegative, so small u loses no accuracy. For larger
# u the first closed form is used when w_hi <= 1/2 and the second otherwise;
# each then cancels by at most a small constant factor.
# ---------------------------------------------------------------------------


@njit(cache=True)
def _gap_jit(u, w_hi, w_lo, out):
    for i in range(u.shape[0]):
        ui = u[i]
        wh = w_hi[i]
        wl = w_lo[i]
        if ui == 0.0 or wh == 0.0 or wl == 0.0:
            out[i] = 0.0
        elif ui <= SERIES_CUTOFF:
            geo = 1.0
            wpow = 1.0
            term = ui * ui / 2.0
            acc = term * geo
            for k in range(3, _SERIES_MAX_TERMS):
                wpow *= wh
                geo += wpow
                term *= ui / k
                inc = term * geo
                acc += inc
                if inc <= 1e-17 * acc:
                    break
            out[i] = wh * wl * acc
        elif wh <= 0.5:
            out[i] = wh * math.expm1(ui) - math.expm1(wh * ui)
        else:
            out[i] = -math.exp(ui) * math.expm1(-wl * ui) - wl * math.expm1(ui)
    return out


def young_gap_scaled_numba(u, w_hi, w_lo):
    u, w_hi, w_lo = np.broadcast_arrays(
        np.asarray(u, dtype=np.float64),
        np.asarray(w_hi, dtype=np.float64),
        np.asarray(w_lo, dtype=np.float64),
    )
    shape = u.shape
    flat = [np.ascontiguousarray(z).ravel() for z in (u, w_hi, w_lo)]
    out = np.empty(flat[0].shape[0])
    _gap_jit(flat[0], flat[1], flat[2], out)
    return out.reshape(shape)


def young_gap_scaled_numpy(u, w_hi, w_lo):
    u, w_hi, w_lo = np.broadcast_arrays(
        np.asarray(u, dtype=np.float64),
        np.asarray(w_hi, dtype=np.float64),
        np.asarray(w_lo, dtype=np.float64),
    )
    out = np.zeros(u.shape)
    trivial = (u == 0.0) | (w_hi == 0.0) | (w_lo == 0.0)
    small = ~trivial & (u <= SERIES_CUTOFF)
    large = ~trivial & ~small
    if np.any(small):
        us, wh, wl = u[small], w_hi[small], w_lo[small]
        geo = np.ones_like(us)
        wpow = np.ones_like(us)
        term = us * us / 2.0
        acc = term * geo
        done = np.zeros(us.shape, dtype=bool)
        for k in range(3, _SERIES_MAX_TERMS):
            wpow = wpow * wh
            geo = geo + wpow
            term = term * (us / k)
            inc = np.where(done, 0.0, term * geo)
            acc = acc + inc
            done |= inc <= 1e-17 * acc
            if done.all():
                break
        out[small] = wh * wl * acc
    if np.any(large):
        ul, wh, wl = u[large], w_hi[large], w_lo[large]
        out[large] = np.where(
            wh <= 0.5,
            wh * np.expm1(ul) - np.expm1(wh * ul),
            -np.exp(ul) * np.expm1(-wl * ul) - wl * np.expm1(ul),
        )
    return out


if JIT_ENABLED:
    jacobi_eigh = jacobi_eigh_numba
    young_gap_scaled = young_gap_scaled_numba
else:
    jacobi_eigh = jacobi_eigh_numpy
    young_gap_scaled = young_gap_scaled_numpy
