"""Entire-function handles, the ``#`` involution, and Hermite-Biehler checks."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np

from .exceptions import EmptyGrid, ValidationError, ZeroOnAxis

ArrayFunc = Callable[[np.ndarray], np.ndarray]


def _as_complex(z):
    return np.asarray(z, dtype=complex)


def _unwrap_scalar(z, out):
    if np.ndim(z) == 0:
        return complex(out)
    return out


def central_difference(func: ArrayFunc, z) -> np.ndarray:
    """Fourth-order central difference with step ``1e-5 * max(1, |z|)``."""
    z = _as_complex(z)
    h = 1e-5 * np.maximum(1.0, np.abs(z))
    return (-func(z + 2 * h) + 8 * func(z + h) - 8 * func(z - h) + func(z - 2 * h)) / (12 * h)


@dataclass(frozen=True)
class EntireFunction:
    """A vectorised entire function with optional closed-form derivative.

    Parameters
    ----------
    func : callable
        Maps a complex ndarray to a complex ndarray of the same shape.
    deriv : callable, optional
        Closed-form derivative. When missing, :meth:`derivative` falls back
        to a fourth-order central difference.
    is_real : bool
        ``f# == f``.
    zero_free : bool
        Claimed to have no zeros in the plane (metadata only).
    label : str
        Human readable id, usually a catalog id.
    scaled : callable, optional
        ``f(z) * c(z)`` for some positive ``c(z)`` chosen to avoid overflow.
        Only the argument of these values is ever used.
    scaled_deriv : callable, optional
        ``f'(z) * c(z)`` with the same ``c`` as ``scaled``; lets
        :meth:`log_derivative` avoid overflow.
    axis_ratio, axis_base : optional
        Fast path for ``f(x)/e(x)`` on the real line given ``x`` and
        ``e(x)``, valid for the HB function ``axis_base`` only.
    """

    func: ArrayFunc
    deriv: Optional[ArrayFunc] = None
    is_real: bool = False
    zero_free: bool = False
    label: str = ""
    scaled: Optional[ArrayFunc] = field(default=None, compare=False)
    scaled_deriv: Optional[ArrayFunc] = field(default=None, compare=False)
    axis_ratio: Optional[Callable] = field(default=None, compare=False)
    axis_base: Optional[object] = field(default=None, compare=False)

    def __call__(self, z):
        zz = _as_complex(z)
        return _unwrap_scalar(z, np.asarray(self.func(zz), dtype=complex))

    def derivative(self, z):
        zz = _as_complex(z)
        if self.deriv is not None:
            out = self.deriv(zz)
        else:
            out = central_difference(self.func, zz)
        return _unwrap_scalar(z, np.asarray(out, dtype=complex))

    def arg_values(self, z):
        """Values with the same complex argument as ``f(z)``, overflow-safe."""
        zz = _as_complex(z)
        fn = self.scaled if self.scaled is not None else self.func
        return _unwrap_scalar(z, np.asarray(fn(zz), dtype=complex))

    def log_derivative(self, z):
        """``f'(z)/f(z)``, from the scaled pair when available."""
        zz = _as_complex(z)
        if self.scaled is not None and self.scaled_deriv is not None:
            out = self.scaled_deriv(zz) / self.scaled(zz)
        else:
            out = np.asarray(self.derivative(zz)) / self.func(zz)
        return _unwrap_scalar(z, np.asarray(out, dtype=complex))

    @property
    def sharp(self) -> "EntireFunction":
        f, df, sc, sd = self.func, self.deriv, self.scaled, self.scaled_deriv
        return EntireFunction(
            func=lambda z: np.conj(f(np.conj(z))),
            deriv=None if df is None else (lambda z: np.conj(df(np.conj(z)))),
            is_real=self.is_real,
            zero_free=self.zero_free,
            label=f"({self.label})#" if self.label else "",
            scaled=None if sc is None else (lambda z: np.conj(sc(np.conj(z)))),
            scaled_deriv=None if sd is None else (lambda z: np.conj(sd(np.conj(z)))),
        )

    def with_label(self, label: str) -> "EntireFunction":
        return replace(self, label=label)

    # --- arithmetic -----------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        f, g = self.func, other.func
        ra, rb = self.axis_ratio, other.axis_ratio
        shared = ra is not None and rb is not None and self.axis_base is other.axis_base
        return EntireFunction(
            func=lambda z: f(z) + g(z),
            deriv=lambda z: self.derivative(z) + other.derivative(z),
            is_real=self.is_real and other.is_real,
            label=f"({self.label}+{other.label})",
            axis_ratio=(lambda x, ex: ra(x, ex) + rb(x, ex)) if shared else None,
            axis_base=self.axis_base if shared else None,
        )

    __radd__ = __add__

    def __neg__(self):
        return (-1.0) * self

    def __sub__(self, other):
        return self + (-1.0) * _coerce(other)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            c = complex(other)
            f = self.func
            sc, sd, ra = self.scaled, self.scaled_deriv, self.axis_ratio
            return EntireFunction(
                func=lambda z: c * f(z),
                deriv=lambda z: c * self.derivative(z),
                is_real=self.is_real and c.imag == 0,
                zero_free=self.zero_free and c != 0,
                label=f"{_fmt(c)}*{self.label}",
                scaled=None if sc is None else (lambda z: c * sc(z)),
                scaled_deriv=None if sd is None else (lambda z: c * sd(z)),
                axis_ratio=None if ra is None else (lambda x, ex: c * ra(x, ex)),
                axis_base=self.axis_base,
            )
        other = _coerce(other)
        f, g = self.func, other.func
        sc = None
        if self.scaled is not None or other.scaled is not None:
            fs = self.scaled or f
            gs = other.scaled or g
            sc = lambda z: fs(z) * gs(z)  # noqa: E731
        return EntireFunction(
            func=lambda z: f(z) * g(z),
            deriv=lambda z: self.derivative(z) * g(z) + f(z) * other.derivative(z),
            is_real=self.is_real and other.is_real,
            zero_free=self.zero_free and other.zero_free,
            label=f"{self.label}*{other.label}",
            scaled=sc,
        )

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if int(n) != n or n < 0:
            raise ValidationError("only non-negative integer powers are supported")
        out = constant(1.0)
        for _ in range(int(n)):
            out = out * self
        return out

    # --- constructors ---------------------------------------------------
    @classmethod
    def polynomial(cls, coeffs: Sequence[complex], label: str = "") -> "EntireFunction":
        """Polynomial with coefficients in ascending order."""
        c = np.asarray(coeffs, dtype=complex)
        p = np.polynomial.Polynomial(c)
        dp = p.deriv()
        return cls(
            func=lambda z: p(z),
            deriv=lambda z: dp(z) + 0 * z,
            is_real=bool(np.all(c.imag == 0)),
            zero_free=bool(len(np.trim_zeros(c, "b")) == 1),
            label=label or f"poly{list(np.round(c, 12))}",
        )

    @classmethod
    def from_roots(cls, roots: Iterable[complex], label: str = "") -> "EntireFunction":
        r = np.asarray(list(roots), dtype=complex)
        coeffs = np.polynomial.polynomial.polyfromroots(r) if len(r) else np.array([1.0])
        return cls.polynomial(coeffs, label=label or f"poly:roots={','.join(_fmt(x) for x in r)}")

    @classmethod
    def exponential(cls, c: complex, label: str = "") -> "EntireFunction":
        """``exp(c z)``."""
        c = complex(c)
        return cls(
            func=lambda z: np.exp(c * z),
            deriv=lambda z: c * np.exp(c * z),
            is_real=c.imag == 0,
            zero_free=True,
            label=label or f"exp({_fmt(c)}z)",
        )


def constant(c: complex) -> EntireFunction:
    c = complex(c)
    return EntireFunction(
        func=lambda z: np.full(np.shape(z), c, dtype=complex),
        deriv=lambda z: np.zeros(np.shape(z), dtype=complex),
        is_real=c.imag == 0,
        zero_free=c != 0,
        label=_fmt(c),
    )


IDENTITY = EntireFunction(
    func=lambda z: np.array(z, dtype=complex),
    deriv=lambda z: np.ones(np.shape(z), dtype=complex),
    is_real=True,
    label="z",
)


def _fmt(c: complex) -> str:
    c = complex(c)
    if c.imag == 0:
        return f"{c.real:g}"
    return f"{c.real:g}{c.imag:+g}i"


def _coerce(f) -> EntireFunction:
    if isinstance(f, EntireFunction):
        return f
    if np.isscalar(f):
        return constant(f)
    raise TypeError(f"cannot use {type(f).__name__} as an entire function")


def as_entire(f, label: str = "") -> EntireFunction:
    """Wrap a plain vectorised callable (or a constant) as an EntireFunction."""
    if isinstance(f, EntireFunction):
        return f
    if np.isscalar(f):
        return constant(f)
    return EntireFunction(func=f, label=label or getattr(f, "__name__", "f"))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def sharp(f, z):
    """``f#(z) = conj(f(conj(z)))``."""
    f = as_entire(f)
    zz = _as_complex(z)
    return _unwrap_scalar(z, np.conj(f.func(np.conj(zz))))


def ab_decompose(e) -> tuple[EntireFunction, EntireFunction]:
    """Split ``e = a - i b`` into the real entire functions ``a`` and ``b``."""
    e = as_entire(e)
    es = e.sharp
    a = EntireFunction(
        func=lambda z: 0.5 * (e.func(z) + es.func(z)),
        deriv=lambda z: 0.5 * (e.derivative(z) + es.derivative(z)),
        is_real=True,
        label=f"a[{e.label}]",
    )
    b = EntireFunction(
        func=lambda z: 0.5j * (e.func(z) - es.func(z)),
        deriv=lambda z: 0.5j * (e.derivative(z) - es.derivative(z)),
        is_real=True,
        label=f"b[{e.label}]",
    )
    return a, b


class HBReport(NamedTuple):
    passed: bool
    worst_margin: float
    worst_point: complex


def default_hb_grid(n_moduli: int = 64, n_angles: int = 16,
                    r_min: float = 1e-2, r_max: float = 1e2) -> np.ndarray:
    """Log-spaced moduli times interior angles of the upper half-plane."""
    r = np.geomspace(r_min, r_max, n_moduli)
    theta = np.pi * (np.arange(n_angles) + 0.5) / n_angles
    return (r[:, None] * np.exp(1j * theta[None, :])).ravel()


def verify_hb(e, test_points=None) -> HBReport:
    """Sampled Hermite-Biehler test ``|e(z)| > |e(conj z)|`` on ``Im z > 0``."""
    e = as_entire(e)
    pts = default_hb_grid() if test_points is None else _as_complex(test_points).ravel()
    if pts.size == 0:
        raise EmptyGrid("no test points given")
    if np.any(pts.imag <= 0):
        raise ValidationError("HB test points must lie in the open upper half-plane")
    margin = np.abs(e.func(pts)) - np.abs(e.func(np.conj(pts)))
    margin = np.where(np.isnan(margin), -np.inf, margin)
    i = int(np.argmin(margin))
    return HBReport(bool(np.all(margin > 0)), float(margin[i]), complex(pts[i]))


DEFAULT_Y_LEVELS = (8.0, 16.0, 32.0, 64.0, 128.0)


def mean_type(f, y_levels: Sequence[float] = DEFAULT_Y_LEVELS) -> float:
    """Mean type ``limsup log|f(iy)| / y``.

    The limit is extrapolated from the last two levels: with
    ``g(y) = log|f(iy)|/y = tau + c/y`` the secant slope of ``log|f(iy)|``
    between ``y1`` and ``y2`` removes the ``c/y`` term exactly.
    """
    fn = f.func if isinstance(f, EntireFunction) else f
    y = np.asarray(y_levels, dtype=float)
    if y.size < 2 or np.any(np.diff(y) <= 0) or y[0] <= 0:
        raise ValidationError("y_levels must be increasing positive reals (at least two)")
    vals = np.abs(np.asarray(fn(1j * y), dtype=complex))
    if np.any(vals == 0):
        raise ZeroOnAxis(f"f(iy) = 0 at y = {y[vals == 0][0]}")
    logs = np.log(vals)
    return float((logs[-1] - logs[-2]) / (y[-1] - y[-2]))


@dataclass(frozen=True)
class HermiteBiehler:
    """An HB function with its cached ``a``/``b`` decomposition."""

    e: EntireFunction
    a: EntireFunction
    b: EntireFunction
    no_real_zeros: bool = True

    @classmethod
    def from_function(cls, e, *, no_real_zeros: bool = True, check: bool = True,
                      test_points=None) -> "HermiteBiehler":
        e = as_entire(e)
        if check:
            rep = verify_hb(e, test_points)
            if not rep.passed:
                raise ValidationError(
                    f"{e.label or 'e'} fails the sampled HB test "
                    f"(margin {rep.worst_margin:.3g} at {rep.worst_point:.4g})")
        a, b = ab_decompose(e)
        return cls(e=e, a=a, b=b, no_real_zeros=no_real_zeros)

    def __call__(self, z):
        return self.e(z)

    @property
    def label(self) -> str:
        return self.e.label
