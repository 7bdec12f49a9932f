"""The multiplication operator ``S: f -> z f`` in ``B(e)`` and its extensions ``S_beta``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .entire import EntireFunction, as_entire
from .exceptions import (EigenvalueHit, NotAnEigenvalue, NotFiniteDimensional,
                         S0NotInSpace, SpectrumMismatch, ValidationError, WindowMismatch)
from .phase import _unit, _window, crossings, phase_curve
from .space import DeBrangesSpace, membership

NEAR = 1e-8


@dataclass
class SpectralSequence:
    beta: float
    eigenvalues: np.ndarray
    window: tuple
    method: str = "phase-crossing"
    space: str = ""
    residual: float = 0.0
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return self.eigenvalues.size

    def to_dict(self) -> dict:
        return {"beta": self.beta, "eigenvalues": [float(v) for v in self.eigenvalues],
                "window": list(self.window), "method": self.method, "space": self.space,
                "residual": self.residual}


def _s_over_e(space: DeBrangesSpace, beta: float, x) -> np.ndarray:
    """``s_beta(x)/|e(x)|`` on the real line, overflow-safe; equals ``sin(phi - beta)``."""
    u = _unit(space, x)
    return -np.imag(np.exp(1j * beta) * u)


def spectrum(space: DeBrangesSpace, beta: float, window, *, cross_check: bool = True
             ) -> SpectralSequence:
    """Zeros of ``s_beta`` in ``window`` as phase crossings ``phi = beta mod pi``.

    The crossings are compared with the sign changes of ``s_beta`` sampled on
    the same pre-grid; a disagreement raises :class:`SpectrumMismatch`.
    """
    beta = float(beta)
    lo, hi = _window(window)
    curve = phase_curve(space, (lo, hi))
    t, _ = crossings(space, curve, beta)
    t = t[(t >= lo) & (t <= hi)]
    s = space.s_beta(beta)
    sv = np.real(s.arg_values(curve.x))
    ev = np.abs(space.e.arg_values(curve.x))
    rel = sv / ev
    if cross_check:
        sign = np.sign(np.where(np.abs(rel) < 1e-14, 0.0, rel))
        changes = int(np.count_nonzero(sign[:-1] * sign[1:] < 0))
        # an exact zero on a node counts once, unless it sits at an end of the window
        zero_nodes = np.flatnonzero(sign == 0)
        changes += int(np.count_nonzero((zero_nodes > 0) & (zero_nodes < sign.size - 1)))
        inner = t[(t > curve.x[0]) & (t < curve.x[-1])]
        if changes != inner.size:
            raise SpectrumMismatch(
                f"{inner.size} phase crossings but {changes} sign changes of s_beta "
                f"on [{lo:g}, {hi:g}] (beta={beta:g})")
    res = float(np.max(np.abs(_s_over_e(space, beta, t)))) if t.size else 0.0
    return SpectralSequence(beta, np.sort(t), (lo, hi), "phase-crossing", space.label, res)


def interlacing_check(seq1: SpectralSequence, seq2: SpectralSequence) -> bool:
    """True iff the merged spectra strictly alternate."""
    if tuple(seq1.window) != tuple(seq2.window):
        raise WindowMismatch(f"{seq1.window} vs {seq2.window}")
    if math.isclose(seq1.beta % math.pi, seq2.beta % math.pi, abs_tol=1e-15):
        raise ValidationError("interlacing needs two different beta")
    pts = np.concatenate([np.asarray(seq1.eigenvalues, float), np.asarray(seq2.eigenvalues, float)])
    lab = np.concatenate([np.zeros(len(seq1), int), np.ones(len(seq2), int)])
    order = np.argsort(pts, kind="stable")
    pts, lab = pts[order], lab[order]
    if np.any(np.diff(pts) <= 0):
        return False
    return bool(np.all(lab[1:] != lab[:-1]))


def _spectrum_from_list(values, beta: float, window) -> SpectralSequence:
    return SpectralSequence(float(beta), np.sort(np.asarray(values, float)), tuple(window), "given")


# ---------------------------------------------------------------------------
# resolvent and eigenfunctions
# ---------------------------------------------------------------------------


def resolvent_apply(space: DeBrangesSpace, beta: float, w: complex, f) -> EntireFunction:
    """``(S_beta - w)^{-1} f``: ``g(z) = [f(z) - s(z) f(w)/s(w)] / (z - w)``."""
    f = as_entire(f)
    w = complex(w)
    s = space.s_beta(beta)
    sw = complex(s(w))
    scale = max(1.0, abs(complex(space.e(w))))
    if not np.isfinite(sw) or abs(sw) <= 1e-12 * scale:
        raise EigenvalueHit(f"s_beta(w) = {sw:.3g} at w = {w}")
    fw = complex(f(w))
    c = fw / sw
    near_val = complex(f.derivative(w)) - c * complex(s.derivative(w))

    def g(z):
        z = np.asarray(z, dtype=complex)
        d = z - w
        near = np.abs(d) < NEAR
        with np.errstate(all="ignore"):
            out = (f.func(z) - c * s.func(z)) / np.where(near, 1.0, d)
        return np.where(near, near_val, out)

    axis = None
    if f.axis_ratio is not None and f.axis_base is space.e:
        fr = f.axis_ratio
        eb = np.exp(1j * float(beta))

        def axis(x, ex):
            d = x - w
            s_e = -np.imag(eb * ex) / ex
            return (fr(x, ex) - c * s_e) / d

    return EntireFunction(func=g, label=f"R({w:.4g})[{f.label}]", axis_ratio=axis,
                          axis_base=space.e if axis is not None else None)


def eigenfunction(space: DeBrangesSpace, beta: float, x_n: float, *,
                  normalize: bool = True) -> EntireFunction:
    """``s_beta(z)/(z - x_n)``, scaled to unit norm.

    The norm is known in closed form: ``||s_beta/(z - x)||**2 = pi phi'(x)``.
    """
    x_n = float(x_n)
    s = space.s_beta(beta)
    ex = complex(space.e(x_n))
    if abs(_s_over_e(space, float(beta), np.array([x_n]))[0]) > 1e-8 * max(1.0, 1.0 / abs(ex)):
        raise NotAnEigenvalue(f"s_beta({x_n}) is not zero")
    c = 1.0
    if normalize:
        dphi = float(space.phase_derivative(np.array([x_n]))[0])
        c = 1.0 / math.sqrt(math.pi * dphi)
    ds = complex(s.derivative(x_n))
    eb = np.exp(1j * float(beta))

    def psi(z):
        z = np.asarray(z, dtype=complex)
        d = z - x_n
        near = np.abs(d) < NEAR
        with np.errstate(all="ignore"):
            out = s.func(z) / np.where(near, 1.0, d)
        return c * np.where(near, ds, out)

    def axis(x, ex_):
        d = x - x_n
        near = np.abs(d) < NEAR
        with np.errstate(all="ignore"):
            out = -np.imag(eb * ex_) / ex_ / np.where(near, 1.0, d)
        if np.any(near):
            out = np.where(near, psi(x) / c / ex_, out)
        return c * out

    return EntireFunction(func=psi, is_real=True, label=f"psi[{beta:g},{x_n:.6g}]",
                          axis_ratio=axis, axis_base=space.e)


# ---------------------------------------------------------------------------
# domain density and the finite-dimensional case
# ---------------------------------------------------------------------------


def domain_density(space: DeBrangesSpace, beta_grid=None) -> Optional[float]:
    """The ``beta`` on the grid with ``s_beta`` in the space, or ``None``."""
    if beta_grid is None:
        beta_grid = np.linspace(0.0, math.pi, 64, endpoint=False)
    hits = [float(b) for b in beta_grid if membership(space, space.s_beta(float(b))).member]
    if not hits:
        return None
    return hits[0]


def gram_polynomial(space: DeBrangesSpace, degree: int, nodes: int = 400) -> np.ndarray:
    """Gram matrix of ``1, z, ..., z**degree`` in a polynomial space.

    With ``x = tan t`` the integrand ``x**m / |e(x)|**2 dx`` becomes smooth on
    ``[-pi/2, pi/2]``, so Gauss-Legendre converges geometrically.
    """
    t, w = np.polynomial.legendre.leggauss(nodes)
    t = 0.5 * np.pi * t
    w = 0.5 * np.pi * w
    x = np.tan(t)
    dens = w / np.cos(t) ** 2 / np.abs(space.e.func(x)) ** 2
    powers = np.vander(x, 2 * degree + 1, increasing=True)
    m = powers.T @ dens
    return np.array([[m[j + k] for k in range(degree + 1)] for j in range(degree + 1)])


@dataclass
class FiniteModel:
    """Orthonormal basis ``q_j = sum_i R[i, j] z**i`` of a polynomial space."""

    space: DeBrangesSpace
    coeffs: np.ndarray  # columns are the basis polynomials, ascending powers

    def coordinates(self, poly_coeffs) -> np.ndarray:
        """Coordinates ``<q_i, p>`` of a polynomial given by ascending coefficients."""
        n = self.coeffs.shape[0]
        p = np.zeros(n, dtype=complex)
        pc = np.asarray(poly_coeffs, dtype=complex)
        if pc.size > n and np.any(np.abs(pc[n:]) > 1e-12):
            raise ValidationError("polynomial degree too high for the space")
        p[:min(n, pc.size)] = pc[:n]
        return np.linalg.solve(self.coeffs, p)


def orthonormal_basis(space: DeBrangesSpace) -> FiniteModel:
    n = space.dimension
    if not n:
        raise NotFiniteDimensional(f"{space.label} is not a polynomial space")
    G = gram_polynomial(space, n - 1)
    L = np.linalg.cholesky(G)
    # monomials = q L^H  ->  q = monomials L^{-H}
    R = np.linalg.inv(L.conj().T)
    return FiniteModel(space, R)


def _poly_coeffs(space: DeBrangesSpace) -> np.ndarray:
    roots = space.info["roots"]
    return np.polynomial.polynomial.polyfromroots(np.asarray(roots, dtype=complex))


def s_beta_coeffs(space: DeBrangesSpace, beta: float) -> np.ndarray:
    """Ascending coefficients of ``s_beta`` for a polynomial space."""
    c = _poly_coeffs(space)
    return 0.5j * np.exp(1j * beta) * c - 0.5j * np.exp(-1j * beta) * np.conj(c)


def rank_one_extension_matrix(space: DeBrangesSpace, beta: float) -> np.ndarray:
    """Matrix of ``S_beta = S_{pi/2} - (cot beta / pi) <s_0, .> s_0`` in an orthonormal basis.

    ``S_{pi/2}`` acts as ``f -> z f + f_{n-1} s_{pi/2}`` (``f_{n-1}`` the top
    coefficient), which keeps the degree below ``n``.
    """
    beta = float(beta)
    if not 0.0 < beta < math.pi:
        raise ValidationError("beta must lie in (0, pi)")
    model = orthonormal_basis(space)
    n = space.dimension
    s0 = s_beta_coeffs(space, 0.0)
    if abs(s0[-1]) > 1e-12 or not membership(space, EntireFunction.polynomial(s0[:-1])).member:
        raise S0NotInSpace("s_0 is not a member of the space")
    s_half = s_beta_coeffs(space, math.pi / 2)
    R = model.coeffs
    M = np.zeros((n, n), dtype=complex)
    for j in range(n):
        q = R[:, j]
        zq = np.concatenate([[0.0], q])  # z * q_j, degree <= n
        img = zq - zq[-1] / s_half[-1] * s_half
        M[:, j] = model.coordinates(img[:n])
    c = model.coordinates(s0[:n])
    cot = math.cos(beta) / math.sin(beta)
    return M - (cot / math.pi) * np.outer(c, c.conj())
