"""Hot loops over long log-weight arrays.

Each kernel has a numba version and a pure-numpy version with identical
results.  Numba is used unless ``SHIFTTREE_DISABLE_NUMBA=1`` is set or numba
is not importable.
"""

import os

import numpy as np

__all__ = ["window_extrema", "radius_logsums", "BACKEND", "HAVE_NUMBA"]

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_DISABLED = os.environ.get("SHIFTTREE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")


def window_extrema_np(P, lo, hi, nmax):
    """max/min over start m in [lo, hi) of P[m+n] - P[m], for n = 1..nmax.

    ``P`` is a prefix-sum array; P[m+n] - P[m] is the log of a product of
    ``n`` consecutive weights.
    """
    m = np.arange(lo, hi)
    vmax = np.empty(nmax)
    vmin = np.empty(nmax)
    for n in range(1, nmax + 1):
        d = P[m + n] - P[m]
        vmax[n - 1] = d.max()
        vmin[n - 1] = d.min()
    return vmax, vmin


def radius_logsums_np(L, member, kT, nmax):
    """log of sum over g in [n, n+kT], rows l with member[l, g], of exp(2 (L[l,g] - L[l,g-n])).

    Returned for n = 1..nmax.
    """
    out = np.empty(nmax)
    for n in range(1, nmax + 1):
        g = np.arange(n, n + kT + 1)
        terms = 2.0 * (L[:, g] - L[:, g - n])
        terms = np.where(member[:, g], terms, -np.inf)
        top = terms.max()
        out[n - 1] = top + np.log(np.exp(terms - top).sum())
    return out


if HAVE_NUMBA:

    @njit(cache=True)
    def window_extrema_nb(P, lo, hi, nmax):
        vmax = np.empty(nmax)
        vmin = np.empty(nmax)
        for n in range(1, nmax + 1):
            best = -np.inf
            worst = np.inf
            for m in range(lo, hi):
                d = P[m + n] - P[m]
                if d > best:
                    best = d
                if d < worst:
                    worst = d
            vmax[n - 1] = best
            vmin[n - 1] = worst
        return vmax, vmin

    @njit(cache=True)
    def radius_logsums_nb(L, member, kT, nmax):
        rows = L.shape[0]
        out = np.empty(nmax)
        for n in range(1, nmax + 1):
            top = -np.inf
            for g in range(n, n + kT + 1):
                for r in range(rows):
                    if member[r, g]:
                        t = 2.0 * (L[r, g] - L[r, g - n])
                        if t > top:
                            top = t
            s = 0.0
            for g in range(n, n + kT + 1):
                for r in range(rows):
                    if member[r, g]:
                        s += np.exp(2.0 * (L[r, g] - L[r, g - n]) - top)
            out[n - 1] = top + np.log(s)
        return out


if HAVE_NUMBA and not _DISABLED:
    BACKEND = "numba"
    window_extrema = window_extrema_nb
    radius_logsums = radius_logsums_nb
else:
    BACKEND = "numpy"
    window_extrema = window_extrema_np
    radius_logsums = radius_logsums_np
