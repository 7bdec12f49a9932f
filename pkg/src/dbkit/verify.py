"""Invariant suites run by ``dbkit verify``: cheap self-consistency checks of one space."""

from __future__ import annotations

import math

import numpy as np

from .classify import default_window
from .entire import verify_hb
from .operator import interlacing_check, resolvent_apply, spectrum
from .phase import norm_by_sampling, phase_curve, sampling_grid
from .space import DeBrangesSpace


def _suite(name, passed, **detail):
    return {"suite": name, "passed": bool(passed), **detail}


def hb_suite(space: DeBrangesSpace):
    rep = verify_hb(space.e)
    return _suite("hermite-biehler", rep.passed, worst_margin=rep.worst_margin,
                  worst_point=rep.worst_point)


def kernel_suite(space: DeBrangesSpace, rng, n: int = 20, tol: float = 1e-10):
    z = rng.uniform(-5, 5, n) + 1j * rng.uniform(-2, 2, n)
    w = rng.uniform(-5, 5, n) + 1j * rng.uniform(-2, 2, n)
    k1 = space.kernel(z, w)
    k2 = np.conj(space.kernel(w, z))
    herm = float(np.max(np.abs(k1 - k2) / np.maximum(1.0, np.abs(k1))))
    diag = np.real(space.kernel(z, z))
    return _suite("kernel-hermitian", herm <= tol and bool(np.all(diag > 0)),
                  hermitian_residual=herm, min_diagonal=float(diag.min()))


def reproducing_suite(space: DeBrangesSpace, rng, n: int = 3, tol: float = 1e-5):
    worst = 0.0
    for _ in range(n):
        w1 = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
        w2 = complex(rng.uniform(-3, 3), rng.uniform(-1, 1))
        f = space.kernel_function(w2)
        nf = math.sqrt(max(space.inner_product(f, f).real, 0.0))
        got = space.inner_product(space.kernel_function(w1), f)
        worst = max(worst, abs(got - complex(f(w1))) / max(nf, 1e-300))
    return _suite("reproducing", worst <= tol, relative_residual=worst)


def interlacing_suite(space: DeBrangesSpace, window, rng, pairs: int = 3):
    ok = True
    sizes = []
    for _ in range(pairs):
        b1, b2 = rng.uniform(0, math.pi, 2)
        s1 = spectrum(space, b1, window)
        s2 = spectrum(space, b2, window)
        sizes.append((len(s1), len(s2)))
        ok &= interlacing_check(s1, s2)
    return _suite("interlacing", ok, sizes=sizes)


def phase_suite(space: DeBrangesSpace, window):
    curve = phase_curve(space, window)
    return _suite("phase-monotone", bool(np.all(curve.dphi > 0) and np.all(np.diff(curve.phi) > 0)),
                  min_derivative=float(curve.dphi.min()), max_jump=curve.max_jump)


def resolvent_suite(space: DeBrangesSpace, tol: float = 1e-10):
    w = 2.0 + 1.0j
    f = space.kernel_function(0.5 + 0.5j)
    g = resolvent_apply(space, 0.0, w, f)
    z = np.array([-1.5 + 0.3j, 0.7 - 0.2j, 3.0 + 1.0j])
    c = complex(f(w)) / complex(space.s_beta(0.0)(w))
    lhs = (z - w) * g(z)
    rhs = f(z) - c * space.s_beta(0.0)(z)
    res = float(np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(np.abs(rhs)))))
    return _suite("resolvent-algebraic", res <= tol, residual=res)


def sampling_suite(space: DeBrangesSpace, window, tol: float = 1e-3):
    f = space.kernel_function(0.3 + 0.4j)
    exact = space.norm(f)
    grid = sampling_grid(space, math.pi / 2, window)
    got = norm_by_sampling(grid, f)
    rel = abs(got - exact) / exact
    return _suite("parseval-sampling", rel <= tol, relative_error=rel, grid_size=len(grid))


def verify_space(space: DeBrangesSpace, window=(-30.0, 30.0), seed: int = 0,
                 sampling_window=None) -> dict:
    """Run every suite; sampling uses a wide window holding ~200 grid points a side."""
    rng = np.random.default_rng(seed)
    if sampling_window is None:
        if space.info.get("kind") in ("paley-wiener", "bessel"):
            w = default_window(space)
            sampling_window = (-w, w)
        else:
            sampling_window = (40 * window[0], 40 * window[1])
    suites = [hb_suite(space), kernel_suite(space, rng), reproducing_suite(space, rng),
              phase_suite(space, window), interlacing_suite(space, window, rng),
              resolvent_suite(space), sampling_suite(space, sampling_window)]
    return {"space": space.label, "passed": all(s["passed"] for s in suites), "suites": suites}
