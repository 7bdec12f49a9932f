"""de Branges spaces ``B(e)``: kernel, inner product, membership, ``s_beta``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .entire import (IDENTITY, EntireFunction, HermiteBiehler, as_entire,
                     mean_type)
from .exceptions import (DeterminantNotOne, QuadratureDivergence, TauOutOfRange,
                         ValidationError)
from .quadrature import LineIntegral, QuadratureConfig, integrate_real_line

DIAGONAL_RADIUS = 1e-8
PROBE_IMAG = (0.5, 1.0, 2.0, 4.0)
PROBE_REAL = np.linspace(-20.0, 20.0, 81)


@dataclass(frozen=True)
class DeBrangesSpace:
    """``B(e)`` together with quadrature settings.

    ``kernel_override`` replaces the generic kernel formula (e.g. the sinc
    kernel of Paley-Wiener spaces).  ``info`` carries catalog metadata such
    as ``{"kind": "polynomial", "dimension": 2}``.
    """

    hb: HermiteBiehler
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    kernel_override: Optional[Callable] = field(default=None, compare=False)
    label: str = ""
    info: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_function(cls, e, *, quadrature: QuadratureConfig | None = None,
                      check: bool = True, label: str = "", **kw) -> "DeBrangesSpace":
        hb = e if isinstance(e, HermiteBiehler) else HermiteBiehler.from_function(e, check=check)
        return cls(hb=hb, quadrature=quadrature or QuadratureConfig(),
                   label=label or hb.label, **kw)

    @property
    def e(self) -> EntireFunction:
        return self.hb.e

    @property
    def dimension(self) -> Optional[int]:
        return self.info.get("dimension")

    def with_quadrature(self, **changes) -> "DeBrangesSpace":
        return replace(self, quadrature=replace(self.quadrature, **changes))

    # -- kernel ---------------------------------------------------------
    def kernel(self, z, w):
        if self.kernel_override is not None:
            return self.kernel_override(z, w)
        return kernel_formula(self.e, z, w)

    def kernel_function(self, w: complex) -> EntireFunction:
        """``k(., w)`` as an entire function."""
        w = complex(w)
        e = self.e
        ew, esw = complex(e(np.conj(w))), complex(np.conj(e(w)))

        def axis(x, ex):
            # k(x,w)/e(x) with e#(x)/e(x) = conj(e(x))/e(x) on the real line
            d = x - np.conj(w)
            near = np.abs(d) < DIAGONAL_RADIUS
            with np.errstate(all="ignore"):
                out = (np.conj(ex) / ex * ew - esw) / (2j * np.pi * np.where(near, 1.0, d))
            if np.any(near):
                out = np.where(near, self.kernel(x, w) / ex, out)
            return out

        return EntireFunction(func=lambda z: self.kernel(z, w), label=f"k(.,{w:.6g})",
                              axis_ratio=axis, axis_base=e)

    # -- L2 structure ----------------------------------------------------
    def ratio(self, f, x, ex=None):
        """``f(x)/e(x)`` on the real line with overflow of ``e`` mapped to 0."""
        f = as_entire(f)
        if ex is None:
            ex = self.e.func(x)
        with np.errstate(all="ignore"):
            if f.axis_ratio is not None and f.axis_base is self.e:
                r = f.axis_ratio(x, ex)
            else:
                r = f.func(x) / ex
        return np.where(np.isfinite(ex) & (np.abs(ex) < 1e300), r, 0.0)

    def integrate(self, f, g) -> LineIntegral:
        f, g = as_entire(f), as_entire(g)

        def integrand(x):
            ex = self.e.func(x)
            return np.conj(self.ratio(f, x, ex)) * self.ratio(g, x, ex)

        return integrate_real_line(integrand, self.quadrature)

    def inner_product(self, f, g) -> complex:
        return self.integrate(f, g).value

    def norm(self, f) -> float:
        return float(np.sqrt(max(self.inner_product(f, f).real, 0.0)))

    def membership(self, f) -> "MembershipReport":
        return membership(self, f)

    # -- associated functions ---------------------------------------------
    def s_beta(self, beta: float) -> EntireFunction:
        return s_beta_function(self.e, beta)

    def phase_derivative(self, x):
        """``phi'(x) = -Im(e'(x)/e(x))`` on the real line."""
        return -np.imag(self.e.log_derivative(np.asarray(x, dtype=float)))

    def to_descriptor(self) -> dict:
        return {"e": self.label, "quadrature": self.quadrature.to_dict()}


def kernel_formula(e: EntireFunction, z, w):
    """Reproducing kernel of ``B(e)`` from ``e`` alone.

    Off the diagonal ``[e#(z) e(conj w) - e(z) e#(conj w)] / (2 pi i (z - conj w))``;
    when ``|z - conj w| < 1e-8`` the quotient is replaced by the derivative of
    the numerator at the midpoint.
    """
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    scalar = z.ndim == 0 and w.ndim == 0
    z, w = np.broadcast_arrays(z, w)
    wb = np.conj(w)
    es = e.sharp
    d = z - wb
    near = np.abs(d) < DIAGONAL_RADIUS
    out = np.empty(z.shape, dtype=complex)
    far = ~near
    if np.any(far):
        zf, wf = z[far], wb[far]
        num = es.func(zf) * e.func(wf) - e.func(zf) * es.func(wf)
        out[far] = num / (2j * np.pi * d[far])
    if np.any(near):
        m = 0.5 * (z[near] + wb[near])
        num = es.derivative(m) * e.func(m) - e.derivative(m) * es.func(m)
        out[near] = num / (2j * np.pi)
    return complex(out) if scalar else out


def kernel(space: DeBrangesSpace, z, w):
    return space.kernel(z, w)


def inner_product(space: DeBrangesSpace, f, g) -> complex:
    return space.inner_product(f, g)


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


@dataclass
class MembershipReport:
    member: bool
    reasons: list
    norm_squared: Optional[float] = None
    growth_constant: Optional[float] = None
    growth_ratio: Optional[float] = None

    def __bool__(self) -> bool:
        return self.member

    def to_dict(self) -> dict:
        return {"member": self.member, "reasons": list(self.reasons),
                "norm_squared": self.norm_squared, "growth_constant": self.growth_constant,
                "growth_ratio": self.growth_ratio}


def growth_bound(space: DeBrangesSpace, f, norm: float | None = None) -> tuple[float, float]:
    """Fit ``c`` in ``|f/e|, |f#/e| <= c/sqrt(Im z)`` on the inner probe grid.

    Returns ``(c, worst ratio on the outer held-out grid)``; the bound is
    accepted when the ratio is at most 2.  Every member obeys the bound with
    ``c = ||f|| / sqrt(4 pi)``, so a known ``norm`` floors the fitted value.
    """
    f = as_entire(f)
    fs = f.sharp
    x, y = np.meshgrid(PROBE_REAL, PROBE_IMAG)
    z = x + 1j * y
    ez = space.e.func(z)
    with np.errstate(all="ignore"):
        v = np.maximum(np.abs(f.func(z) / ez), np.abs(fs.func(z) / ez)) * np.sqrt(y)
    v = np.where(np.isfinite(ez), v, 0.0)
    if not np.all(np.isfinite(v)):
        return float("inf"), float("inf")
    inner = np.abs(x) <= 10.0
    c = float(v[inner].max())
    if norm is not None and np.isfinite(norm):
        c = max(c, norm / math.sqrt(4 * math.pi))
    outer = float(v[~inner].max())
    if c == 0.0:
        return 0.0, 0.0 if outer == 0.0 else float("inf")
    return c, outer / c


def membership(space: DeBrangesSpace, f) -> MembershipReport:
    """Numerical membership test for ``f`` in ``B(e)``.

    Two checks: the integral of ``|f/e|**2`` converges, and the half-plane
    growth bound holds with the fitted constant on the held-out probes.
    """
    reasons = []
    norm2 = None
    try:
        norm2 = float(space.integrate(f, f).value.real)
    except QuadratureDivergence as exc:
        reasons.append(f"integral_diverges: {exc}")
    c, ratio = growth_bound(space, f, None if norm2 is None else math.sqrt(max(norm2, 0.0)))
    if not np.isfinite(c):
        reasons.append("growth_nonfinite")
    elif ratio > 2.0:
        reasons.append(f"growth_bound: held-out ratio {ratio:.3g} > 2")
    return MembershipReport(not reasons, reasons, norm2, c, ratio)


def assoc_membership(space: DeBrangesSpace, f, n: int) -> bool:
    """Is ``f`` in ``B((z+i)**n e)``?"""
    if int(n) != n or n < 0:
        raise ValidationError("n must be a non-negative integer")
    if n == 0:
        return membership(space, f).member
    factor = (IDENTITY + 1j) ** int(n)
    e_n = (factor * space.e).with_label(f"(z+i)^{n}*{space.label}")
    bigger = DeBrangesSpace.from_function(e_n, quadrature=space.quadrature, check=False)
    return membership(bigger, f).member


# ---------------------------------------------------------------------------
# s_beta, e_M, subspaces
# ---------------------------------------------------------------------------


def s_beta_function(e: EntireFunction, beta: float) -> EntireFunction:
    """``s_beta = (i/2)[e^{i beta} e - e^{-i beta} e#]``, i.e. ``-sin(beta) a + cos(beta) b``."""
    beta = float(beta)
    p, m = 0.5j * np.exp(1j * beta), -0.5j * np.exp(-1j * beta)
    es = e.sharp

    def sc(z):
        # Real-line sign/phase helper: same positive scale as e.scaled.
        return p * e.arg_values(z) + m * es.arg_values(z)

    return EntireFunction(
        func=lambda z: p * e.func(z) + m * es.func(z),
        deriv=lambda z: p * e.derivative(z) + m * es.derivative(z),
        is_real=True,
        label=f"s_{beta:.6g}[{e.label}]",
        scaled=sc if e.scaled is not None else None,
    )


def s_beta(space: DeBrangesSpace, beta: float, z):
    return space.s_beta(beta)(z)


def transform_M(e, M) -> HermiteBiehler:
    """``e_M = a_M - i b_M`` with ``(a_M, b_M) = M (a, b)``; requires ``det M = 1``."""
    M = np.asarray(M, dtype=float)
    if M.shape != (2, 2):
        raise ValidationError("M must be a 2x2 real matrix")
    det = float(np.linalg.det(M))
    if abs(det - 1.0) > 1e-12:
        raise DeterminantNotOne(f"det M = {det!r}")
    hb = e if isinstance(e, HermiteBiehler) else HermiteBiehler.from_function(e, check=False)
    a, b = hb.a, hb.b
    (m11, m12), (m21, m22) = M
    a_m = m11 * a + m12 * b
    b_m = m21 * a + m22 * b
    e_m = (a_m - 1j * b_m).with_label(f"M[{hb.label}]")
    return HermiteBiehler.from_function(e_m, no_real_zeros=hb.no_real_zeros)


def tau_min(space: DeBrangesSpace) -> float:
    """``tau_e = mt(e#/e)``."""
    e = space.e
    es = e.sharp
    return mean_type(lambda z: es.func(z) / e.func(z))


def subspace(space: DeBrangesSpace, tau: float) -> DeBrangesSpace:
    """The chain member ``B(e_tau)`` with ``e_tau(z) = e(z) exp(-i tau z / 2)``."""
    tau = float(tau)
    lo = tau_min(space)
    if tau > 1e-12 or tau < lo - 1e-9:
        raise TauOutOfRange(f"tau={tau} outside [{lo:.6g}, 0]")
    if tau == 0.0:
        return space
    e_tau = (space.e * EntireFunction.exponential(-0.5j * tau)).with_label(
        f"{space.label}|tau={tau:g}")
    info = dict(space.info)
    if info.get("kind") == "paley-wiener":
        a = info["a"] + tau / 2
        info["a"] = a
        if a > 0:
            from .models import paley_wiener
            return replace(paley_wiener(a), quadrature=space.quadrature)
    return DeBrangesSpace.from_function(e_tau, quadrature=space.quadrature, check=False,
                                        info=info)
