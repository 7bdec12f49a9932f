"""Catalog of model spaces and the string ids used by the CLI.

Ids: ``pw:a=1`` (alias ``exp:a=1``), ``bessel:l=2,b=1``,
``poly:roots=-1i,-2i``, ``momentum:a=1``.

Bessel spaces are realised in the spectral variable ``lam = z**2``: the
function ``xi_l(z, b) + i xi_l'(z, b)`` is even in ``z``, so it cannot be
Hermite-Biehler in ``z`` itself, but as a function of ``lam`` it is.
Spectra of Bessel spaces are therefore values of ``lam``; their square
roots are the familiar zeros (``(k+1/2) pi`` and so on).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bessel import u_values
from .entire import EntireFunction
from .exceptions import (LengthMismatch, NonpositiveBandwidth, RootInClosedUpperHalfPlane,
                         UnknownFunction, ValidationError)
from .quadrature import QuadratureConfig
from .space import DeBrangesSpace


# ---------------------------------------------------------------------------
# Paley-Wiener
# ---------------------------------------------------------------------------


def pw_kernel(a: float) -> Callable:
    def k(z, w):
        z = np.asarray(z, dtype=complex)
        w = np.asarray(w, dtype=complex)
        u = z - np.conj(w)
        small = np.abs(u) < 1e-8
        safe = np.where(small, 1.0, u)
        # sin(a u)/(pi u) with its Taylor expansion near u = 0
        out = np.where(small, a / np.pi * (1 - (a * u) ** 2 / 6), np.sin(a * safe) / (np.pi * safe))
        return complex(out) if out.ndim == 0 else out
    return k


def paley_wiener(a: float = 1.0, quadrature: QuadratureConfig | None = None) -> DeBrangesSpace:
    """``PW_a = B(exp(-i a z))`` with the sinc kernel as closed form."""
    a = float(a)
    if not a > 0:
        raise NonpositiveBandwidth(f"a must be positive, got {a}")
    e = EntireFunction.exponential(-1j * a, label=f"pw:a={a:g}")
    return DeBrangesSpace.from_function(
        e, quadrature=quadrature, label=f"pw:a={a:g}", kernel_override=pw_kernel(a),
        info={"kind": "paley-wiener", "a": a})


def pw_spectrum(a: float, gamma: float, window) -> np.ndarray:
    """Closed form ``{(gamma + k pi)/a}`` within ``window``."""
    lo, hi = window
    kmin = math.ceil((a * lo - gamma) / math.pi)
    kmax = math.floor((a * hi - gamma) / math.pi)
    return (gamma + np.pi * np.arange(kmin, kmax + 1)) / a


# ---------------------------------------------------------------------------
# Bessel
# ---------------------------------------------------------------------------


def bessel_e(l: int, b: float = 1.0) -> EntireFunction:
    """``e(lam) = xi_l(sqrt lam, b) + i xi_l'(sqrt lam, b)``, constant factors dropped."""
    l, b = int(l), float(b)

    def parts(lam, scaled):
        lam = np.asarray(lam, dtype=complex)
        t = lam * b * b
        u = u_values(l + 2, t, scaled=scaled)
        xi = b ** (l + 1) * u[l]
        xip = b**l * ((l + 1) * u[l] - t * u[l + 1])
        dxi = -0.5 * b ** (l + 3) * u[l + 1]
        dxip = b ** (l + 2) * (-0.5 * (l + 3) * u[l + 1] + 0.5 * t * u[l + 2])
        return xi + 1j * xip, dxi + 1j * dxip

    return EntireFunction(
        func=lambda z: parts(z, False)[0],
        deriv=lambda z: parts(z, False)[1],
        label=f"bessel:l={l},b={b:g}",
        scaled=lambda z: parts(z, True)[0],
        scaled_deriv=lambda z: parts(z, True)[1],
    )


def bessel_space(l: int, b: float = 1.0, quadrature: QuadratureConfig | None = None) -> DeBrangesSpace:
    if int(l) != l or l < 0:
        raise ValidationError(f"l must be a non-negative integer, got {l}")
    if not b > 0:
        raise NonpositiveBandwidth(f"b must be positive, got {b}")
    e = bessel_e(int(l), float(b))
    return DeBrangesSpace.from_function(
        e, quadrature=quadrature, label=e.label,
        info={"kind": "bessel", "l": int(l), "b": float(b), "variable": "lambda",
              "phase_step": _bessel_step(float(b))})


def _bessel_step(b: float):
    # a quarter period of sqrt(lam)*b, expressed as a length in lam
    return lambda lam: 0.5 * math.pi * np.sqrt(np.maximum(np.abs(lam), 1.0 / b**2)) / b


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


def polynomial_space(roots: Sequence[complex],
                     quadrature: QuadratureConfig | None = None) -> DeBrangesSpace:
    """``B(e)`` for ``e = prod (z - root)``; equals the polynomials of degree < n."""
    r = [complex(x) for x in roots]
    if not r:
        raise ValidationError("at least one root is required")
    bad = [x for x in r if x.imag >= 0]
    if bad:
        raise RootInClosedUpperHalfPlane(f"roots must satisfy Im < 0, got {bad}")
    label = "poly:roots=" + ",".join(_fmt_root(x) for x in r)
    e = EntireFunction.from_roots(r, label=label)
    return DeBrangesSpace.from_function(
        e, quadrature=quadrature, label=label,
        info={"kind": "polynomial", "roots": r, "dimension": len(r)})


def _fmt_root(x: complex) -> str:
    if x.real == 0:
        return f"{x.imag:g}i"
    return f"{x.real:g}{x.imag:+g}i"


# ---------------------------------------------------------------------------
# linear momentum
# ---------------------------------------------------------------------------


FILON_ORDER = 48


def _spherical_j_upward(w: np.ndarray, n: int) -> np.ndarray:
    """``j_0..j_{n-1}`` at ``w``; upward recurrence is stable here because ``|w| > n``."""
    out = np.empty((w.size, n), dtype=complex)
    sn, cs = np.sin(w), np.cos(w)
    out[:, 0] = sn / w
    if n > 1:
        out[:, 1] = sn / w**2 - cs / w
    for k in range(1, n - 1):
        out[:, k + 1] = (2 * k + 1) / w * out[:, k] - out[:, k - 1]
    return out


@dataclass(frozen=True)
class MomentumModel:
    """Momentum operator on ``L2[-a, a]`` and its functional model ``PW_a``."""

    a: float
    space: DeBrangesSpace = field(compare=False)

    def spectrum(self, gamma: float, window) -> np.ndarray:
        return pw_spectrum(self.a, gamma, window)

    def mu0(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(np.abs(x) <= self.a, 1.0 / (2 * self.a), 0.0)

    def mu1(self, x):
        x = np.asarray(x, dtype=float)
        a = self.a
        left = (x >= -a) & (x < 0)
        right = (x >= 0) & (x <= a)
        return np.where(left, -1j * (a + x) / (2 * a), np.where(right, 1j * (a - x) / (2 * a), 0j))

    def transform(self, phi: Callable, z, *, normalized: bool = False, breakpoints=(),
                  order: int = FILON_ORDER):
        """``int_{-a}^{a} exp(-i z x) phi(x) dx``.

        ``normalized`` divides by ``sqrt(2 pi)``, which makes the map an
        isometry into ``PW_a``.  Breakpoints of ``phi`` (0 is always one)
        split ``[-a, a]`` into pieces on which ``phi`` is smooth.  On each
        piece, small frequencies use Gauss-Legendre directly; large ones
        integrate the Legendre expansion of ``phi`` exactly through
        ``int_{-1}^{1} P_k(t) exp(-i w t) dt = 2 (-i)**k j_k(w)``.
        """
        z = np.asarray(z, dtype=complex)
        a = self.a
        cuts = sorted({-a, 0.0, a, *[float(p) for p in breakpoints if -a < p < a]})
        t, wg = np.polynomial.legendre.leggauss(order)
        # P_k(t_i) for the projection of phi onto Legendre polynomials
        V = np.polynomial.legendre.legvander(t, order - 1)
        ks = np.arange(order)
        zr = z.reshape(-1)
        out = np.zeros(zr.shape, dtype=complex)
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            h, c = 0.5 * (hi - lo), 0.5 * (hi + lo)
            vals = np.asarray(phi(c + h * t), dtype=complex) * np.ones_like(t)
            w = zr * h
            small = np.abs(w) <= order
            if np.any(small):
                out[small] += h * np.exp(-1j * np.outer(zr[small], c + h * t)) @ (vals * wg)
            if np.any(~small):
                coef = (2 * ks + 1) / 2.0 * (V.T @ (vals * wg))
                jk = _spherical_j_upward(w[~small], order)
                moments = 2.0 * (-1j) ** ks[None, :] * jk
                out[~small] += h * np.exp(-1j * zr[~small] * c) * (moments @ coef)
        if normalized:
            out /= math.sqrt(2 * math.pi)
        out = out.reshape(z.shape)
        return complex(out) if out.ndim == 0 else out

    def transform_function(self, phi: Callable, *, normalized: bool = True,
                           breakpoints=()) -> EntireFunction:
        return EntireFunction(
            func=lambda z: self.transform(phi, z, normalized=normalized, breakpoints=breakpoints),
            label="momentum-image")

    def gauge_residual(self, y) -> np.ndarray:
        """``|int e^{-iyx} mu0 + y int e^{-iyx} mu1 - 1|``."""
        y = np.asarray(y, dtype=float)
        lhs = self.transform(self.mu0, y) + y * self.transform(self.mu1, y)
        return np.abs(lhs - 1.0)


def momentum_model(a: float = 1.0, quadrature: QuadratureConfig | None = None) -> MomentumModel:
    space = paley_wiener(a, quadrature)
    from dataclasses import replace
    space = replace(space, label=f"momentum:a={float(a):g}",
                    info={**space.info, "model": "momentum"})
    return MomentumModel(float(a), space)


# ---------------------------------------------------------------------------
# Jacobi model
# ---------------------------------------------------------------------------


def jacobi_model_transform(problem, phi, z):
    """``sum_k phi_k P_k(z)`` for the orthonormal polynomials of a moment problem."""
    coeffs = problem.poly_coefficients if hasattr(problem, "poly_coefficients") else problem
    phi = np.asarray(phi, dtype=complex)
    if phi.ndim != 1 or phi.size > len(coeffs):
        raise LengthMismatch(f"{phi.size} coefficients but only {len(coeffs)} polynomials")
    c = np.zeros(max(len(p) for p in coeffs), dtype=complex)
    for k, ph in enumerate(phi):
        p = np.asarray([float(v) for v in coeffs[k]])
        c[:p.size] += ph * p
    z = np.asarray(z, dtype=complex)
    out = np.polynomial.polynomial.polyval(z, c)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# ids
# ---------------------------------------------------------------------------

_ID = re.compile(r"^\s*([a-z]+)\s*:\s*(.*)$")


def _parse_params(text: str) -> dict:
    out = {}
    # "roots=" values contain commas, so split on commas that start a key=.
    for part in re.split(r",(?=\s*[a-z]+\s*=)", text):
        if not part.strip():
            continue
        if "=" not in part:
            raise UnknownFunction(f"malformed parameter {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "")
    s = re.sub(r"(^|[+-])i$", r"\g<1>1i", s)
    s = s.replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise UnknownFunction(f"cannot parse complex number {text!r}") from None


def _num(params: dict, key: str, default=None) -> float:
    if key not in params:
        if default is None:
            raise UnknownFunction(f"missing parameter {key!r}")
        return default
    try:
        return float(params[key])
    except ValueError:
        raise UnknownFunction(f"parameter {key}={params[key]!r} is not a number") from None


def parse_space(space_id: str, quadrature: QuadratureConfig | None = None):
    """Build a catalog space from its id."""
    m = _ID.match(space_id or "")
    if not m:
        raise UnknownFunction(f"unknown space id {space_id!r}")
    kind, params = m.group(1), _parse_params(m.group(2))
    if kind in ("pw", "exp"):
        return paley_wiener(_num(params, "a", 1.0), quadrature)
    if kind == "momentum":
        return momentum_model(_num(params, "a", 1.0), quadrature).space
    if kind == "bessel":
        l = _num(params, "l")
        if l != int(l):
            raise ValidationError("only integer l is supported")
        return bessel_space(int(l), _num(params, "b", 1.0), quadrature)
    if kind == "poly":
        if "roots" not in params:
            raise UnknownFunction("poly needs roots=...")
        roots = [parse_complex(r) for r in params["roots"].split(",") if r.strip()]
        return polynomial_space(roots, quadrature)
    raise UnknownFunction(f"unknown space kind {kind!r}")


def parse_descriptor(desc: dict) -> DeBrangesSpace:
    """``{"e": id, "quadrature": {...}}`` -> space."""
    if not isinstance(desc, dict) or "e" not in desc:
        raise ValidationError("descriptor needs an 'e' entry")
    q = QuadratureConfig(**desc.get("quadrature", {}))
    return parse_space(desc["e"], q)


CATALOG = {
    "pw:a=1": "Paley-Wiener space, e(z) = exp(-i a z)",
    "exp:a=1": "alias of pw:a=1",
    "bessel:l=0,b=1": "Bessel space in lam = z^2, e = xi_l + i xi_l'",
    "bessel:l=2,b=1": "Bessel space with l = 2",
    "poly:roots=-1i,-1i": "polynomials of degree < #roots, e = prod (z - root)",
    "poly:roots=-1i,-2i": "two-dimensional polynomial space with distinct roots",
    "momentum:a=1": "momentum operator model (PW_a)",
}


def catalog_examples() -> list:
    return [paley_wiener(1.0), bessel_space(0, 1.0), bessel_space(1, 1.0), bessel_space(2, 1.0),
            bessel_space(3, 1.0), polynomial_space([-1j, -1j]), polynomial_space([-1j, -2j]),
            momentum_model(1.0).space]
