"""Globally adaptive Gauss-Kronrod (G7/K15) integration of vector-valued integrands.

The integrand is evaluated on every node of every active interval in a
single vectorised call, which is what makes the occupation integral cheap
enough for sweeps. Semi-infinite pieces are mapped onto ``[0, 1)`` with
``x = anchor +/- s t / (1 - t)``.
"""

from __future__ import annotations

import numpy as np

from .errors import QuadratureError

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
W_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
W_GAUSS = np.zeros(15)
_gauss_idx = np.array([1, 3, 5, 7, 9, 11, 13])
W_GAUSS[_gauss_idx] = np.concatenate([_WG[:-1], _WG[::-1]])

FINITE, RIGHT_TAIL, LEFT_TAIL = 0, 1, -1


def _rule(f, kind, anchor, scale, lo, hi):
    """Kronrod estimate and |K - G| per interval; shapes (ncomp, nint)."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    t = mid[:, None] + half[:, None] * NODES[None, :]
    k = kind[:, None]
    one_minus = np.where(k == FINITE, 1.0, 1.0 - t)
    stretch = np.where(k == FINITE, t, scale[:, None] * t / one_minus)
    x = np.where(k == LEFT_TAIL, anchor[:, None] - stretch,
                 np.where(k == RIGHT_TAIL, anchor[:, None] + stretch, stretch))
    jac = np.where(k == FINITE, 1.0, scale[:, None] / one_minus**2)
    vals = np.atleast_2d(f(x.ravel()))
    vals = vals.reshape(vals.shape[0], *x.shape) * jac[None]
    kron = (vals * W_KRONROD).sum(axis=-1) * half
    gauss = (vals * W_GAUSS).sum(axis=-1) * half
    return kron, np.abs(kron - gauss).sum(axis=0)


def integrate(f, breakpoints, tail_scale=1.0, epsabs=0.0, epsrel=1e-8, limit=10_000):
    """Integrate ``f`` over the whole real line.

    Parameters
    ----------
    f : callable
        Maps a 1-D array of abscissae to an array of shape ``(ncomp, n)``
        (or ``(n,)`` for a scalar integrand).
    breakpoints : sequence of float
        Sorted finite points; the line is split at each of them and the two
        outer pieces are semi-infinite.
    tail_scale : float
        Length scale of the tail mapping.
    limit : int
        Maximum number of subintervals.

    Returns
    -------
    value : ndarray, shape (ncomp,)
    error : float
        Summed absolute error estimate.
    """
    pts = np.asarray(sorted(breakpoints), dtype=float)
    n = len(pts)
    kind = np.concatenate([[LEFT_TAIL], np.full(n - 1, FINITE), [RIGHT_TAIL]])
    anchor = np.concatenate([[pts[0]], np.zeros(n - 1), [pts[-1]]])
    scale = np.full(n + 1, float(tail_scale))
    lo = np.concatenate([[0.0], pts[:-1], [0.0]])
    hi = np.concatenate([[1.0], pts[1:], [1.0]])

    kron, err = _rule(f, kind, anchor, scale, lo, hi)
    while True:
        total = kron.sum(axis=1)
        total_err = err.sum()
        tol = max(epsabs, epsrel * np.abs(total).sum())
        if total_err <= tol:
            return total, float(total_err)
        if len(lo) >= limit:
            raise QuadratureError(
                f"error estimate {total_err:.3g} above tolerance {tol:.3g} "
                f"after {len(lo)} subintervals"
            )
        # bisect the worst intervals that together carry half the excess
        order = np.argsort(err)[::-1]
        cum = np.cumsum(err[order])
        nsplit = int(np.searchsorted(cum, 0.5 * (total_err - tol))) + 1
        nsplit = min(nsplit, limit - len(lo))
        split = order[:max(nsplit, 1)]
        width = hi[split] - lo[split]
        if np.any(width <= 1e-14 * np.maximum(np.abs(lo[split]) + np.abs(hi[split]), 1e-300)):
            raise QuadratureError(f"roundoff limits accuracy; error estimate {total_err:.3g}")

        keep = np.ones(len(lo), dtype=bool)
        keep[split] = False
        mid = 0.5 * (lo[split] + hi[split])
        new_kind = np.concatenate([kind[split], kind[split]])
        new_anchor = np.concatenate([anchor[split], anchor[split]])
        new_scale = np.concatenate([scale[split], scale[split]])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        nk, ne = _rule(f, new_kind, new_anchor, new_scale, new_lo, new_hi)

        kind = np.concatenate([kind[keep], new_kind])
        anchor = np.concatenate([anchor[keep], new_anchor])
        scale = np.concatenate([scale[keep], new_scale])
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        kron = np.concatenate([kron[:, keep], nk], axis=1)
        err = np.concatenate([err[keep], ne])
