"""Phase functions, sampling grids, norms by sampling and kernel interpolation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .entire import as_entire
from .exceptions import IncompleteGrid, RealZeroOfE, ValidationError
from .space import DeBrangesSpace, membership

STEP_LIMIT = math.pi / 4
JUMP_LIMIT = math.pi / 2
ZERO_TOL = 1e-13


def _window(window) -> tuple[float, float]:
    lo, hi = (float(v) for v in window)
    if not hi > lo:
        raise ValidationError(f"empty window [{lo}, {hi}]")
    return lo, hi


def _unit(space: DeBrangesSpace, x) -> np.ndarray:
    v = np.asarray(space.e.arg_values(np.asarray(x, dtype=float)), dtype=complex)
    return v / np.abs(v)


def _check_no_zero(space: DeBrangesSpace, x) -> None:
    ex = np.abs(space.e.func(x))
    bad = np.isfinite(ex) & (ex < ZERO_TOL)
    if np.any(bad):
        raise RealZeroOfE(f"|e(x)| < {ZERO_TOL:g} at x = {x[bad][0]:.12g}")


@dataclass
class PhaseCurve:
    """Unwrapped phase samples on a pre-grid certified by ``max jump < pi/2``."""

    x: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    anchor_offset: float
    max_jump: float

    def __call__(self, x, space: DeBrangesSpace):
        """Continuous phase at arbitrary points of the window."""
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(self.x, x), 0, self.x.size - 1)
        left = np.clip(i - 1, 0, self.x.size - 1)
        near = np.where(np.abs(self.x[left] - x) < np.abs(self.x[i] - x), left, i)
        ref = self.phi[near]
        # local increment from the nearest certified sample, principal branch
        delta = np.angle(_unit(space, self.x[near]) / _unit(space, x))
        return ref + delta


def _refine(space: DeBrangesSpace, x: np.ndarray, max_points: int):
    hint = space.info.get("phase_step")
    for _ in range(60):
        d = space.phase_derivative(x)
        if np.any(~np.isfinite(d)):
            _check_no_zero(space, x)
            raise RealZeroOfE("phase derivative is not finite on the window")
        u = _unit(space, x)
        inc = np.abs(np.angle(u[1:] / u[:-1]))
        h = np.diff(x)
        load = np.maximum(h * np.maximum(np.abs(d[:-1]), np.abs(d[1:])), inc)
        pieces = np.ceil(load / STEP_LIMIT).astype(int)
        if hint is not None:
            pieces = np.maximum(pieces, np.ceil(h / hint(0.5 * (x[:-1] + x[1:]))).astype(int))
        if np.all(pieces <= 1):
            return x, d, u
        pieces = np.maximum(pieces, 1)
        if pieces.sum() > max_points:
            raise ValidationError("window too large for the phase pre-grid")
        parts = [np.linspace(a, b, k, endpoint=False) for a, b, k in zip(x[:-1], x[1:], pieces)]
        x = np.concatenate(parts + [x[-1:]])
    raise ValidationError("phase pre-grid refinement did not settle")


def phase_curve(space: DeBrangesSpace, window, *, max_points: int = 4_000_000) -> PhaseCurve:
    """Phase ``-arg e`` on an adaptive grid.

    Cells are split until both ``phi' dx`` at the ends and the sampled phase
    increment are below ``pi/4``; the grid is then halved once more and
    accepted only if the unwrapped total does not move (a hidden full turn
    inside a cell would shift it).  Anchored so ``phi(x_lo)`` is in ``(-pi, 0]``.
    """
    lo, hi = _window(window)
    x = np.linspace(lo, hi, 1025)
    for _ in range(20):
        x, d, u = _refine(space, x, max_points)
        total = np.unwrap(-np.angle(u))[-1]
        mids = 0.5 * (x[:-1] + x[1:])
        xx = np.empty(2 * x.size - 1)
        xx[0::2], xx[1::2] = x, mids
        uu = _unit(space, xx)
        if abs(np.unwrap(-np.angle(uu))[-1] - total) < 1.0:
            break
        x = xx
    else:
        raise ValidationError("phase pre-grid verification did not settle")
    _check_no_zero(space, x)
    phi = np.unwrap(-np.angle(u))
    jumps = np.abs(np.diff(phi))
    max_jump = float(jumps.max()) if jumps.size else 0.0
    if max_jump >= JUMP_LIMIT:
        raise ValidationError(f"phase unwrapping failed (jump {max_jump:.3g})")
    k = math.ceil(phi[0] / math.pi)
    offset = -k * math.pi
    return PhaseCurve(x, phi + offset, d, offset, max_jump)


def phase(space: DeBrangesSpace, x, window=None):
    """Continuous phase at ``x`` (anchored at the left end of ``window``)."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if window is None:
        window = (float(xs.min()), float(xs.max()) + (1.0 if xs.size == 1 else 0.0))
    curve = phase_curve(space, window)
    out = curve(xs, space)
    return float(out[0]) if np.ndim(x) == 0 else out


def crossings(space: DeBrangesSpace, curve: PhaseCurve, alpha: float,
              tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """All ``t`` with ``phi(t) = alpha mod pi`` inside the curve's window.

    Returns the points and the targets ``phi(t_n)``.  Each root is bracketed
    by the pre-grid and polished by safeguarded Newton on ``sin(phi - target)``.
    """
    phi = curve.phi
    kmin = math.ceil((phi[0] - alpha) / math.pi)
    kmax = math.floor((phi[-1] - alpha) / math.pi)
    if kmax < kmin:
        return np.empty(0), np.empty(0)
    targets = alpha + math.pi * np.arange(kmin, kmax + 1)
    j = np.searchsorted(phi, targets)
    exact = (j < phi.size) & (phi[np.minimum(j, phi.size - 1)] == targets)
    j = np.clip(j, 1, phi.size - 1)
    a = curve.x[j - 1].copy()
    b = curve.x[j].copy()
    pa = phi[j - 1]
    # linear start inside the bracket
    t = np.where(exact, curve.x[np.minimum(j, phi.size - 1)],
                 a + (targets - pa) / np.where(phi[j] > pa, phi[j] - pa, 1.0) * (b - a))
    ua = _unit(space, a)

    def g(x):
        # sin(phi(x) - target) with phi continued from the bracket's left end
        local = pa + np.angle(ua / _unit(space, x))
        return np.sin(local - targets), local

    for _ in range(100):
        val, _loc = g(t)
        done = np.abs(val) <= tol
        if np.all(done):
            break
        neg = val < 0
        a = np.where(neg, t, a)
        b = np.where(neg, b, t)
        dphi = space.phase_derivative(t)
        with np.errstate(all="ignore"):
            step = t - val / (np.cos(_loc - targets) * dphi)
        inside = np.isfinite(step) & (step > a) & (step < b)
        t = np.where(done, t, np.where(inside, step, 0.5 * (a + b)))
    return t, targets


@dataclass
class PhaseGrid:
    space: DeBrangesSpace = field(repr=False)
    alpha: float
    window: tuple
    points: np.ndarray
    weights: np.ndarray
    targets: np.ndarray
    anchor_offset: float
    max_jump: float
    curve: PhaseCurve = field(repr=False)
    complete: Optional[bool] = None

    def __len__(self) -> int:
        return self.points.size

    def phi_at_points(self) -> np.ndarray:
        return self.curve(self.points, self.space)


def sampling_grid(space: DeBrangesSpace, alpha: float, window) -> PhaseGrid:
    """Points with ``phi(t) = alpha mod pi`` and weights ``pi/phi'(t)``."""
    curve = phase_curve(space, window)
    t, targets = crossings(space, curve, float(alpha))
    w = math.pi / space.phase_derivative(t) if t.size else np.empty(0)
    return PhaseGrid(space, float(alpha), _window(window), t, np.asarray(w, dtype=float), targets,
                     curve.anchor_offset, curve.max_jump, curve)


def check_complete(grid: PhaseGrid) -> bool:
    """The grid's kernels span B(e) iff ``s_alpha`` is not a member."""
    if grid.complete is None:
        s = grid.space.s_beta(grid.alpha % math.pi)
        grid.complete = not membership(grid.space, s).member
    return grid.complete


def _tail_fit(terms: np.ndarray) -> tuple[float, float]:
    """Tail of a one-sided series from its last decade of nonzero terms.

    Terms are indexed by rank ``n``; a fit ``c n**-q`` over ``n`` in
    ``[N/10, N]`` gives ``sum_{m > N} ~ term_N N/(q-1)``.
    """
    n_all = np.arange(1, terms.size + 1, dtype=float)
    if terms.size < 10:
        return 0.0, float("nan")
    sel = n_all >= terms.size / 10
    keep = sel & (terms > 0)
    if keep.sum() < 5:
        return 0.0, float("nan")
    q, logc = np.polyfit(np.log(n_all[keep]), np.log(terms[keep]), 1)
    q = -q
    if q <= 1.0:
        return float("inf"), float(q)
    N = terms.size
    return float(np.exp(logc) * N ** (1 - q) / (q - 1)), float(q)


def norm_by_sampling(grid: PhaseGrid, f, *, full_output: bool = False, check: bool = True):
    """Norm of ``f`` from its samples on a complete orthogonal grid.

    The sum of ``|f(t_n)/e(t_n)|**2 pi/phi'(t_n)`` is corrected by a power
    law tail fitted on each side.
    """
    if check and not check_complete(grid):
        raise IncompleteGrid(f"s_alpha with alpha={grid.alpha:g} belongs to the space")
    f = as_entire(f)
    if grid.points.size == 0:
        out = {"norm": 0.0, "norm_squared": 0.0, "partial": 0.0, "tail": 0.0, "exponents": []}
        return out if full_output else 0.0
    r = grid.space.ratio(f, grid.points)
    terms = np.abs(r) ** 2 * grid.weights
    partial = float(math.fsum(terms))
    tail = 0.0
    exps = []
    centre = 0.5 * (grid.window[0] + grid.window[1])
    for side in (grid.points >= centre, grid.points < centre):
        side_terms = terms[side]
        order = np.argsort(np.abs(grid.points[side] - centre))
        tl, q = _tail_fit(side_terms[order])
        if np.isfinite(tl):
            tail += tl
        exps.append(q)
    total = partial + tail
    if full_output:
        return {"norm": math.sqrt(max(total, 0.0)), "norm_squared": total, "partial": partial,
                "tail": tail, "exponents": exps}
    return math.sqrt(max(total, 0.0))


def interpolate(grid: PhaseGrid, samples, z, *, check: bool = True, full_output: bool = False,
                extrapolate: bool = True):
    """Sampling series ``sum k(z, t_n)/k(t_n, t_n) f(t_n)``.

    The symmetric partial sums over ``|t - c| <= R`` of kernel-type data
    converge like ``1/R``; with ``extrapolate`` the sums at ``R`` and ``R/2``
    are combined to cancel that term (a no-op when only central samples are
    nonzero).  ``full_output`` also reports the size of that correction as a
    truncation indicator.
    """
    if check and not check_complete(grid):
        raise IncompleteGrid(f"s_alpha with alpha={grid.alpha:g} belongs to the space")
    samples = np.asarray(samples, dtype=complex)
    if samples.shape != grid.points.shape:
        raise ValidationError(f"{samples.size} samples for {grid.points.size} grid points")
    z = np.asarray(z, dtype=complex)
    zr = z.reshape(-1)
    sp = grid.space
    t = grid.points
    diag = np.real(sp.kernel(t, t))
    K = sp.kernel(zr[:, None], t[None, :])
    terms = K * (samples / diag)[None, :]
    full = terms.sum(axis=1)
    correction = np.zeros_like(full)
    if t.size:
        c = 0.5 * (grid.window[0] + grid.window[1])
        R = 0.5 * (grid.window[1] - grid.window[0])
        half = terms[:, np.abs(t - c) <= 0.5 * R].sum(axis=1)
        correction = full - half
    out = (full + correction if extrapolate else full).reshape(z.shape)
    value = complex(out) if out.ndim == 0 else out
    if not full_output:
        return value
    return {"value": value, "tail_indicator": np.abs(correction).reshape(z.shape)}
