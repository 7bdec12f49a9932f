"""Spherical Bessel functions as entire functions of ``t = w**2``.

``u_l(t) = j_l(w) / w**l`` is even in ``w``, hence entire in ``t``; it has
the series ``sum_k (-t/2)**k / (k! (2l+2k+1)!!)`` and satisfies
``du_l/dt = -u_{l+1}/2``.  Near the origin the series is used; elsewhere
the closed trigonometric forms of ``j_0``, ``j_1`` and upward recurrence.

All evaluators accept ``scaled=True``, which multiplies every value at a
point by the same positive factor ``exp(-|Im w|)`` so that nothing
overflows for large negative ``t``.
"""

from __future__ import annotations

import numpy as np

SERIES_RADIUS = 4.0
_N_TERMS = 60


def _double_factorial_odd(n: int) -> float:
    out = 1.0
    for k in range(1, n + 1, 2):
        out *= k
    return out


def _series(l: int, t: np.ndarray) -> np.ndarray:
    # Horner on the ratio of consecutive terms: c_{k+1}/c_k = (-t/2) / ((k+1)(2l+2k+3)).
    acc = np.ones_like(t)
    for k in range(_N_TERMS - 1, -1, -1):
        acc = 1.0 + acc * (-t / 2.0) / ((k + 1) * (2 * l + 2 * k + 3))
    return acc / _double_factorial_odd(2 * l + 1)


def u_values(lmax: int, t, scaled: bool = False) -> list[np.ndarray]:
    """Return ``[u_0(t), ..., u_lmax(t)]``."""
    t = np.asarray(t, dtype=complex)
    w = np.sqrt(t)
    out = [np.empty_like(t) for _ in range(lmax + 1)]
    small = np.abs(w) < SERIES_RADIUS + lmax
    if np.any(small):
        ts = t[small]
        factor = np.exp(-np.abs(w[small].imag)) if scaled else 1.0
        for l in range(lmax + 1):
            out[l][small] = _series(l, ts) * factor
    big = ~small
    if np.any(big):
        wb = w[big]
        if scaled:
            sn, cs = _damped_trig(wb)
        else:
            with np.errstate(over="ignore", invalid="ignore"):
                sn, cs = np.sin(wb), np.cos(wb)
        with np.errstate(invalid="ignore", over="ignore"):
            js = _recurrence(sn, cs, wb, lmax)
        for l in range(lmax + 1):
            out[l][big] = js[l]
    return out


def _damped_trig(w):
    """``sin w`` and ``cos w`` times ``exp(-|Im w|)`` without overflow."""
    u, v = w.real, w.imag
    q = np.exp(-2.0 * np.abs(v))
    ch = 0.5 * (1.0 + q)
    sh = 0.5 * np.sign(v) * (1.0 - q)
    return np.sin(u) * ch + 1j * np.cos(u) * sh, np.cos(u) * ch - 1j * np.sin(u) * sh


def _recurrence(sn, cs, wb, lmax):
    j_prev = sn / wb
    j_cur = sn / wb**2 - cs / wb
    js = [j_prev, j_cur]
    for l in range(1, lmax):
        j_prev, j_cur = j_cur, (2 * l + 1) / wb * j_cur - j_prev
        js.append(j_cur)
    return [js[l] / wb**l for l in range(lmax + 1)]


def spherical_jn(l: int, w):
    """``j_l(w)`` for complex ``w`` (reference helper; not scaled)."""
    w = np.asarray(w, dtype=complex)
    return u_values(l, w * w)[l] * w**l
