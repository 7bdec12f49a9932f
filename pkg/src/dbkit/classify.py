"""Numerical tests of conditions (C1)-(C3) and the n-entire classification.

Every limit is judged from dyadic truncations.  Sums are corrected by a
power-law tail fitted on the last decade of each side: terms ``T(x) ~ x**p``
and the counting function ``N(x) ~ x**d`` give an index exponent ``p/d``,
which decides convergence, and the classical integral estimate of the
remainder.

The normalisation ``e(0) = 1/sin(gamma)`` is realised with ``gamma = pi/2``
by replacing ``e`` with ``e * exp(-i psi)/r`` where ``e(0) = r exp(i psi)``;
this multiplies every ``s_beta`` by ``1/r`` and shifts ``beta`` by ``psi``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .entire import constant
from .exceptions import (Inconclusive, InsufficientWindow, NormalizationMissing,
                         OneSidedSequence, ValidationError)
from .operator import spectrum
from .space import DeBrangesSpace, assoc_membership

C1_TOL = 1e-4
C2_TOL = 1e-3
C3_TOL = 1e-5
EXPONENT_MARGIN = 1e-2
MIN_SIDE = 10


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _side_fit(absx: np.ndarray, values: Optional[np.ndarray] = None) -> dict:
    """Fit ``N(x) ~ D x**d`` (and ``T ~ C x**p`` if values given) on the last decade."""
    absx = np.sort(absx) if values is None else absx
    n = absx.size
    out = {"count": n, "d": float("nan"), "D": float("nan"), "p": float("nan"), "C": float("nan")}
    if n < MIN_SIDE:
        return out
    order = np.argsort(absx)
    xs = absx[order]
    idx = np.arange(1, n + 1, dtype=float)
    sel = xs >= xs[-1] / 10
    if sel.sum() < 5:
        sel = idx > n / 2
    d, logD = np.polyfit(np.log(xs[sel]), np.log(idx[sel]), 1)
    out.update(d=float(d), D=float(np.exp(logD)))
    if values is not None:
        v = np.abs(values[order])
        keep = sel & (v > 0)
        if keep.sum() >= 5:
            p, logC = np.polyfit(np.log(xs[keep]), np.log(v[keep]), 1)
            out.update(p=float(p), C=float(np.exp(logC)))
    return out


def _dyadic_radii(absmax: float, absmin: float, k: int = 6) -> np.ndarray:
    # nudged outward so that mirror-image points straddling r are treated alike
    return absmax * (1 + 1e-9) / 2.0 ** np.arange(k - 1, -1, -1)


# ---------------------------------------------------------------------------
# (C1)
# ---------------------------------------------------------------------------


@dataclass
class C1Report:
    radii: list
    partial_sums: list
    corrected_sums: list
    limit: float
    converged: bool


def _averaged_sum(x: np.ndarray, r: float) -> float:
    """``(1/r) int_r^{2r} S(rho) d rho`` for the sharp partial sums ``S`` of ``1/x``.

    ``S`` is a step function, so the average is a weighted sum; it removes the
    sawtooth ``O(1/r)`` error that comes from where the cut falls between points.
    """
    a = np.abs(x)
    keep = a <= 2 * r
    w = (2 * r - np.maximum(a[keep], r)) / r
    return math.fsum(w / x[keep])


def check_c1(x: Sequence[float], *, n_radii: int = 6) -> C1Report:
    """Symmetric partial sums of ``1/x_j`` over ``0 < |x_j| <= r`` at dyadic ``r``.

    The verdict uses the partial sums averaged over ``[r, 2r]`` and corrected
    by the remainder ``int_r^inf dN(t)/t`` of each side whose counting
    exponent ``d`` is below one; sides with ``d >= 1`` are left alone (their
    remainders only cancel in pairs).
    """
    x = np.asarray(x, dtype=float)
    x = x[x != 0]
    if x.size < 2 * MIN_SIDE and np.sum(x > 0) < MIN_SIDE:
        raise InsufficientWindow(f"only {x.size} points available for (C1)")
    pos, neg = np.abs(x[x > 0]), np.abs(x[x < 0])
    rmax = min(pos.max() if pos.size >= MIN_SIDE else np.inf,
               neg.max() if neg.size >= MIN_SIDE else np.inf)
    if not np.isfinite(rmax):
        rmax = np.abs(x).max()
    radii = _dyadic_radii(rmax / 2, np.abs(x).min(), n_radii)
    fits = [_side_fit(pos), _side_fit(neg)]
    partial, corrected = [], []
    for r in radii:
        tail = 0.0
        for sign, f in zip((1.0, -1.0), fits):
            d, D = f["d"], f["D"]
            if np.isfinite(d) and d < 0.99:
                # remainder D d rho**(d-1)/(1-d), averaged over [r, 2r]
                tail += sign * D * ((2 * r) ** d - r ** d) / (r * (1 - d))
        partial.append(math.fsum(1.0 / x[np.abs(x) <= r]))
        corrected.append(_averaged_sum(x, r) + tail)
    last = corrected[-3:]
    converged = (max(last) - min(last)) < C1_TOL
    return C1Report([float(r) for r in radii], partial, corrected, float(corrected[-1]), converged)


# ---------------------------------------------------------------------------
# (C2)
# ---------------------------------------------------------------------------


@dataclass
class C2Report:
    slopes_plus: list
    slopes_minus: list
    s_plus: float
    s_minus: float
    equal_opposite: bool
    finite: bool
    note: str = ""


def _slope(side: np.ndarray) -> tuple[list, float]:
    """``j/x_j`` at ``j = N/4, N/2, N`` and its Richardson limit (``c/j`` error model)."""
    n = side.size
    if n < MIN_SIDE:
        return [], 0.0
    xs = np.sort(np.abs(side))
    js = [max(1, n // 4), max(1, n // 2), n]
    est = [j / xs[j - 1] for j in js]
    if est[2] < 0.75 * est[1] and est[1] < 0.75 * est[0]:
        # j/x_j itself decays like a power of j: zero density
        return [float(v) for v in est], 0.0
    # j/x_j = s + c/j: eliminate c between the last two levels
    j1, j2 = js[1], js[2]
    s = (j2 * est[2] - j1 * est[1]) / (j2 - j1)
    return [float(v) for v in est], float(s)


def check_c2(x: Sequence[float], *, strict: bool = False) -> C2Report:
    """Densities ``lim j/x_j^+`` and ``lim j/x_j^-``; a side with fewer than ten points has density 0."""
    x = np.asarray(x, dtype=float)
    pos, neg = x[x > 0], x[x < 0]
    if strict and (pos.size == 0 or neg.size == 0):
        raise OneSidedSequence("both signs are required")
    sp_list, sp = _slope(pos)
    sm_list, sm = _slope(neg)
    sm = -sm
    sm_list = [-v for v in sm_list]
    notes = []
    if pos.size < MIN_SIDE or neg.size < MIN_SIDE:
        notes.append("one side is finite; its density is taken as 0")
    if sp == 0.0 and sm == 0.0:
        equal = True
        notes.append("both densities vanish")
    else:
        equal = abs(sp + sm) <= C2_TOL * max(abs(sp), abs(sm))
    finite = bool(np.isfinite(sp) and np.isfinite(sm))
    return C2Report(sp_list, sm_list, sp, sm, bool(equal), finite, "; ".join(notes))


# ---------------------------------------------------------------------------
# products and (C3)
# ---------------------------------------------------------------------------


def _product_tail(b: np.ndarray, z, sign: float):
    """Continuum remainder of ``sum log(1 - z/b) + z/b`` over the missing zeros of one side."""
    side = np.sort(np.abs(b[np.sign(b) == sign]))
    if side.size < 3:
        return 0.0
    gaps = np.diff(side[-min(11, side.size):])
    delta = float(gaps.mean())
    A = side[-1] + 0.5 * delta
    zz = sign * np.asarray(z, dtype=complex)
    return (-zz - (A - zz) * np.log(1 - zz / A)) / delta


def h_beta_eval(zeros, z, r: float, *, origin_root: bool = False, tail_correction: bool = True):
    """Symmetric truncated product ``prod_{|b_j| <= r} (1 - z/b_j)`` (times ``z`` for an origin root).

    ``tail_correction`` adds the continuum estimate of the missing factors on
    each side, assuming locally uniform spacing and equal densities (so that
    the ``z/b`` compensators cancel); it is skipped for one-sided zero sets.
    """
    b = np.asarray(zeros, dtype=float)
    b = b[(np.abs(b) <= r) & (b != 0)]
    z = np.asarray(z, dtype=complex)
    logp = np.log1p(-z[..., None] / b).sum(axis=-1) if b.size else np.zeros(z.shape, complex)
    two_sided = np.sum(b > 0) >= 3 and np.sum(b < 0) >= 3
    if tail_correction and two_sided:
        logp = logp + _product_tail(b, z, 1.0) + _product_tail(b, z, -1.0)
    out = np.exp(logp)
    if origin_root:
        out = out * z
    return complex(out) if out.ndim == 0 else out


@dataclass
class C3Report:
    n: int
    radii: list
    partial_sums: list
    corrected_sums: list
    exponent: float
    side_exponents: list
    convergent: bool
    warnings: list = field(default_factory=list)


def c3_terms(n: int, x, h0: Callable, hgamma_prime: Callable) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(all="ignore"):
        return np.abs(1.0 / (x ** (2 * n) * h0(x) * hgamma_prime(x)))


def check_c3(n: int, x_seq, zeros_of_s0=None, zeros_of_s_gamma=None, *, h0: Callable | None = None,
             hgamma_prime: Callable | None = None, gamma: float | None = None,
             n_radii: int = 6) -> C3Report:
    """Convergence of ``sum |1/(x_j**(2n) h_0(x_j) h_gamma'(x_j))|``.

    ``h0``/``hgamma_prime`` may be given as callables; otherwise they are
    built from the zero lists as truncated products (``h_0`` has a root at
    the origin).  ``gamma`` must be supplied: it records the normalisation
    under which ``x_seq`` are the zeros of ``s_gamma``.
    """
    if gamma is None:
        raise NormalizationMissing("the gamma anchor of e(0) = 1/sin(gamma) is required")
    x = np.asarray(x_seq, dtype=float)
    warnings = []
    if x.size == 0:
        return C3Report(n, [], [], [], float("nan"), [], True, ["empty sequence: vacuously convergent"])
    if h0 is None or hgamma_prime is None:
        if zeros_of_s0 is None:
            raise ValidationError("need h0/hgamma_prime or the zero lists")
        zs0 = np.asarray(zeros_of_s0, float)
        zsg = np.asarray(zeros_of_s_gamma if zeros_of_s_gamma is not None else x, float)
        r0 = float(np.abs(zs0).max())
        rg = float(np.abs(zsg).max())
        h0 = lambda t: h_beta_eval(zs0, t, r0, origin_root=True)  # noqa: E731
        hgamma_prime = _product_derivative(zsg, rg)
        # truncated products are only trusted well inside their zero lists
        x = x[np.abs(x) <= 0.5 * min(r0, rg)]
        warnings.append("h functions from truncated products; terms kept for |x| <= r/2")
    terms = c3_terms(n, x, h0, hgamma_prime)
    absx = np.abs(x)
    fits = [_side_fit(absx[x > 0], terms[x > 0]), _side_fit(absx[x < 0], terms[x < 0])]
    side_exp = []
    for f in fits:
        if f["count"] >= MIN_SIDE and np.isfinite(f["p"]) and f["d"] > 0:
            side_exp.append(f["p"] / f["d"])
        else:
            side_exp.append(float("nan"))
    finite_exp = [v for v in side_exp if np.isfinite(v)]
    if not finite_exp:
        warnings.append("too few points for an exponent fit")
        exponent = float("nan")
    else:
        exponent = max(finite_exp)
    rmax = absx.max()
    radii = _dyadic_radii(rmax, absx.min(), n_radii)
    partial, corrected = [], []
    for r in radii:
        inside = absx <= r
        s = math.fsum(terms[inside])
        tail = 0.0
        for sgn, f, q in zip((1, -1), fits, side_exp):
            if not np.isfinite(q):
                continue
            if q >= -1.0:
                tail = math.inf
                break
            # sum over j > N of C x_j**p with N = D r**d  ->  T(r) N / (-q - 1)
            N = f["D"] * r ** f["d"]
            tail += f["C"] * r ** f["p"] * N / (-q - 1)
        partial.append(s)
        corrected.append(s + tail)
    last = corrected[-3:]
    scale = max(1.0, abs(last[-1])) if np.isfinite(last[-1]) else 1.0
    cauchy = all(np.isfinite(last)) and (max(last) - min(last)) <= C3_TOL * scale
    convergent = bool(np.isfinite(exponent) and exponent < -1 - EXPONENT_MARGIN and cauchy)
    if not np.isfinite(exponent) and all(np.isfinite(last)) and cauchy:
        convergent = True
    return C3Report(n, [float(r) for r in radii], partial, corrected, float(exponent), side_exp,
                    convergent, warnings)


def _product_derivative(zeros, r):
    """``h'(x_j) = -(1/x_j) prod_{k != j} (1 - x_j/x_k)`` at the zeros themselves.

    The missing factors beyond ``r`` get the same continuum estimate as in
    :func:`h_beta_eval`.
    """
    zs = np.asarray(zeros, float)
    zs = zs[np.abs(zs) <= r]
    two_sided = np.sum(zs > 0) >= 3 and np.sum(zs < 0) >= 3

    def hp(x):
        x = np.atleast_1d(np.asarray(x, float))
        out = np.empty(x.size, complex)
        for i, xi in enumerate(x):
            others = zs[np.abs(zs - xi) > 1e-12 * max(1.0, abs(xi))]
            logp = np.log1p(-xi / others.astype(complex)).sum()
            if two_sided:
                logp += _product_tail(zs, xi, 1.0) + _product_tail(zs, xi, -1.0)
            out[i] = -np.exp(logp) / xi
        return out

    return hp


# ---------------------------------------------------------------------------
# classification
# ---------------------------------------------------------------------------


@dataclass
class Normalization:
    gamma: float
    psi: float
    r: float
    beta_gamma: float
    beta_zero: float


def normalization(space: DeBrangesSpace) -> Normalization:
    e0 = complex(space.e(0.0))
    if e0 == 0:
        raise NormalizationMissing("e(0) = 0")
    r, psi = abs(e0), math.atan2(e0.imag, e0.real)
    return Normalization(math.pi / 2, psi, r, (math.pi / 2 - psi) % math.pi, (-psi) % math.pi)


def h_functions(space: DeBrangesSpace, norm: Normalization):
    """Closed forms ``h_0 = s_0/s_0'(0)`` and ``h_gamma' = s_gamma'/s_gamma(0)``.

    For the catalog spaces (Cartwright class) the symmetric products over the
    zeros converge to exactly these functions.
    """
    s0 = space.s_beta(norm.beta_zero)
    sg = space.s_beta(norm.beta_gamma)
    d0 = complex(s0.derivative(0.0))
    g0 = complex(sg(0.0))

    def h0(x):
        return np.real(s0(np.asarray(x, float))) / d0.real

    def hgp(x):
        return np.real(sg.derivative(np.asarray(x, float))) / g0.real

    return h0, hgp


@dataclass
class CriteriaReport:
    space: str
    window: list
    normalization: dict
    c1: C1Report
    c2: C2Report
    c3: list
    minimal_n: Optional[int]
    stable: bool
    assoc_check: dict = field(default_factory=dict)
    method: str = "criteria"
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def default_window(space: DeBrangesSpace, target: int = 200) -> float:
    """Half-width holding about ``target`` eigenvalues on the busier side."""
    info = space.info
    if info.get("kind") == "paley-wiener":
        return target * math.pi / info["a"]
    if info.get("kind") == "bessel":
        return (target * math.pi / info["b"]) ** 2
    w = 100.0
    for _ in range(30):
        n = len(spectrum(space, math.pi / 2, (-w, w), cross_check=False))
        if n >= target:
            break
        w *= 2
    return w


def _evaluate(space, norm, h0, hgp, w, n_max):
    seq = spectrum(space, norm.beta_gamma, (-w, w))
    x = seq.eigenvalues
    c1 = check_c1(x)
    c2 = check_c2(x)
    c3 = [check_c3(n, x, h0=h0, hgamma_prime=hgp, gamma=norm.gamma) for n in range(n_max + 1)]
    return c1, c2, c3


def _verdicts(c1, c2, c3):
    return (c1.converged, c2.equal_opposite and c2.finite, tuple(r.convergent for r in c3))


def classify(space: DeBrangesSpace, n_max: int = 4, *, window: float | None = None,
             cross_check: bool = True) -> CriteriaReport:
    """Smallest ``n <= n_max`` for which (C1), (C2) and (C3) all pass.

    The verdicts are recomputed on a doubled window and must agree,
    otherwise :class:`Inconclusive` is raised.  Polynomial spaces are not
    run through the criteria; their answer comes from ``assoc_membership``.
    """
    if n_max < 0:
        raise ValidationError("n_max must be non-negative")
    if space.dimension:
        return _classify_finite(space, n_max)
    norm = normalization(space)
    h0, hgp = h_functions(space, norm)
    w = float(window) if window else default_window(space)
    first = _evaluate(space, norm, h0, hgp, w, n_max)
    second = _evaluate(space, norm, h0, hgp, 2 * w, n_max)
    v1, v2 = _verdicts(*first), _verdicts(*second)
    if v1 != v2:
        names = ["C1", "C2"] + [f"C3(n={n})" for n in range(n_max + 1)]
        flat1 = [v1[0], v1[1], *v1[2]]
        flat2 = [v2[0], v2[1], *v2[2]]
        bad = [nm for nm, a, b in zip(names, flat1, flat2) if a != b]
        raise Inconclusive(f"verdicts changed when the window doubled: {', '.join(bad)}")
    c1, c2, c3 = second
    flags = [r.convergent for r in c3]
    for n in range(len(flags) - 1):
        if flags[n] and not flags[n + 1]:
            raise Inconclusive(f"(C3) passes at n={n} but fails at n={n + 1}")
    minimal = None
    if c1.converged and c2.equal_opposite and c2.finite:
        minimal = next((n for n, ok in enumerate(flags) if ok), None)
    report = CriteriaReport(space.label, [-2 * w, 2 * w], asdict(norm), c1, c2, c3, minimal, True)
    if cross_check and minimal is not None:
        one = constant(1.0)
        try:
            report.assoc_check = {str(n): assoc_membership(space, one, n)
                                  for n in sorted({max(minimal - 1, 0), minimal})}
            expected = {str(n): n >= minimal for n in sorted({max(minimal - 1, 0), minimal})}
            if report.assoc_check != expected:
                report.warnings.append(
                    f"assoc_membership(1, n) disagrees: {report.assoc_check} vs {expected}")
        except Exception as exc:  # report only
            report.warnings.append(f"assoc cross-check skipped: {exc}")
    return report


def _classify_finite(space: DeBrangesSpace, n_max: int) -> CriteriaReport:
    one = constant(1.0)
    checks = {}
    minimal = None
    for n in range(n_max + 1):
        ok = assoc_membership(space, one, n)
        checks[str(n)] = ok
        if ok:
            minimal = n
            break
    empty1 = C1Report([], [], [], float("nan"), False)
    empty2 = C2Report([], [], float("nan"), float("nan"), False, False, "not evaluated")
    return CriteriaReport(space.label, [], {}, empty1, empty2, [], minimal, True, checks,
                          method="assoc_membership",
                          warnings=["finite-dimensional space: (C1)-(C3) not evaluated"])
