import math

import numpy as np
import pytest
from scipy import integrate

from dbkit.classify import default_window
from dbkit.entire import EntireFunction
from dbkit.exceptions import IncompleteGrid, RealZeroOfE, ValidationError
from dbkit.models import catalog_examples, polynomial_space
from dbkit.phase import interpolate, norm_by_sampling, phase, phase_curve, sampling_grid
from dbkit.space import DeBrangesSpace

SINC = EntireFunction(lambda z: np.sinc(np.asarray(z) / np.pi), label="sinc")


def test_pw_phase_is_linear(pw1):
    x = np.linspace(-7.0, 9.0, 33)
    p = phase(pw1, x, window=(-7.0, 9.0))
    assert np.allclose(np.diff(p), np.diff(x), atol=1e-12)
    assert -math.pi < p[0] <= 0.0
    assert np.allclose(pw1.phase_derivative(x), 1.0)


def test_linear_factor_phase():
    sp = DeBrangesSpace.from_function(EntireFunction.polynomial([1j, 1.0]))
    x = np.linspace(-6.0, 6.0, 49)
    p = phase(sp, x, window=(-6.0, 6.0))
    ref = -np.arctan2(1.0, x)
    assert np.allclose(p - ref, (p - ref)[0], atol=1e-12)
    assert np.allclose(sp.phase_derivative(x), 1 / (1 + x**2), atol=1e-12)
    # finite differences agree with the closed-form derivative
    h = 1e-5
    fd = (phase(sp, x + h, window=(-7, 7)) - phase(sp, x - h, window=(-7, 7))) / (2 * h)
    assert np.allclose(fd, 1 / (1 + x**2), atol=1e-8)


@pytest.mark.parametrize("space", catalog_examples(), ids=lambda s: s.label)
def test_phase_monotone(space):
    curve = phase_curve(space, (-25.0, 25.0))
    assert np.all(np.diff(curve.phi) > 0)
    assert curve.max_jump < math.pi / 2


def test_real_zero_detected():
    sp = DeBrangesSpace.from_function(EntireFunction.polynomial([1j, 1.0]), check=False)
    bad = DeBrangesSpace.from_function(sp.e * EntireFunction.polynomial([-0.5, 1.0]), check=False)
    with pytest.raises(RealZeroOfE), np.errstate(divide="ignore", invalid="ignore"):
        phase_curve(bad, (-3.0, 3.0))


def test_empty_window(pw1):
    with pytest.raises(ValidationError):
        sampling_grid(pw1, 0.0, (2.0, 1.0))


def test_pw_grid_points(pw1):
    g = sampling_grid(pw1, 0.0, (-20.0, 20.0))
    n = np.arange(-6, 7)
    assert np.max(np.abs(g.points - n * math.pi)) <= 1e-9
    assert np.allclose(g.weights, math.pi)
    assert np.allclose(np.diff(g.phi_at_points()), math.pi, atol=1e-6)
    # realness: e(t) exp(i phi(t)) is real
    ex = pw1.e.func(g.points)
    assert np.max(np.abs(np.imag(ex * np.exp(1j * g.phi_at_points())))) <= 1e-8


def test_pw_grids_interlace(pw1):
    a = sampling_grid(pw1, 0.4, (-20.0, 20.0)).points
    b = sampling_grid(pw1, 0.4 + math.pi / 2, (-20.0, 20.0)).points
    merged = np.sort(np.concatenate([a, b]))
    src = np.isin(merged, a)
    assert np.all(src[1:] != src[:-1])


def test_bessel_grid(bessel0):
    g = sampling_grid(bessel0, 0.0, (0.5, 40.0**2))
    z = np.sqrt(g.points)
    assert np.max(np.abs(z - (np.arange(z.size) + 0.5) * math.pi)) <= 1e-6


@pytest.mark.parametrize("space", catalog_examples(), ids=lambda s: s.label)
def test_grid_points_are_zeros_of_s(space):
    for alpha in (0.0, 1.1):
        g = sampling_grid(space, alpha, (-30.0, 30.0))
        s = space.s_beta(alpha).func(g.points)
        assert np.all(np.abs(s) <= 1e-8 * np.maximum(1.0, np.abs(space.e.func(g.points))))


def test_sinc_norm_by_sampling(pw1):
    g = sampling_grid(pw1, 0.0, (-200.0, 200.0))
    # panels of length pi on [0, L], then int_L^inf sin(x)**2/x**2 = 1/(2L) + O(L**-3)
    L = 1000 * math.pi
    body = sum(integrate.quad(lambda x: np.sinc(x / np.pi) ** 2, j * math.pi, (j + 1) * math.pi)[0]
               for j in range(1000))
    oracle = 2 * (body + 1 / (2 * L))
    assert abs(oracle - math.pi) < 1e-6
    assert norm_by_sampling(g, SINC) ** 2 == pytest.approx(oracle, abs=1e-4)
    assert norm_by_sampling(g, lambda z: 0 * z) == 0.0


def test_kernel_norm_by_sampling(pw1):
    g = sampling_grid(pw1, 0.0, (-400.0, 400.0))
    k0 = pw1.kernel_function(0.0)
    assert norm_by_sampling(g, k0) ** 2 == pytest.approx(1 / math.pi, abs=1e-4)
    off = pw1.kernel_function(0.3 + 0.4j)
    assert norm_by_sampling(g, off) ** 2 == pytest.approx(pw1.norm(off) ** 2, rel=1e-3)


def test_parseval_consistency_catalog(rng):
    for space in catalog_examples():
        w = default_window(space) if space.info.get("kind") in ("paley-wiener", "bessel") else 400.0
        g = sampling_grid(space, math.pi / 2, (-w, w))
        for _ in range(3):
            f = space.kernel_function(complex(rng.uniform(-2, 2), rng.uniform(0.2, 1.5)))
            exact = space.norm(f) ** 2
            assert abs(norm_by_sampling(g, f) ** 2 - exact) <= 1e-3 * exact


def test_incomplete_grid_rejected():
    # e = (z+i)**2: s_0 = -2z lies in the space
    sp = polynomial_space([-1j, -1j])
    g = sampling_grid(sp, 0.0, (-50.0, 50.0))
    with pytest.raises(IncompleteGrid):
        norm_by_sampling(g, lambda z: z)
    with pytest.raises(IncompleteGrid):
        interpolate(g, np.zeros(len(g)), 0.5j)


def test_interpolate_kernel_column(pw1, rng):
    g = sampling_grid(pw1, 0.0, (-30.0, 30.0))
    t3 = g.points[np.argmin(np.abs(g.points - 3 * math.pi))]
    f = pw1.kernel_function(t3)
    z = rng.uniform(-10, 10, 8) + 1j * rng.uniform(-2, 2, 8)
    got = interpolate(g, f(g.points), z)
    assert np.max(np.abs(got - f(z))) <= 1e-9


def test_interpolate_sinc(pw1, rng):
    g = sampling_grid(pw1, 0.0, (-30.0, 30.0))
    z = rng.uniform(-10, 10, 8) + 1j * rng.uniform(-2, 2, 8)
    got = interpolate(g, SINC(g.points), z)
    assert np.max(np.abs(got - SINC(z))) <= 1e-9


def test_interpolation_truncation_decays(pw1):
    f = pw1.kernel_function(0.3)
    z = np.array([0.1, 1.7 + 0.5j, -2.2 - 0.3j, 4.0])
    errs = []
    for w in (20.0, 40.0, 80.0):
        g = sampling_grid(pw1, 0.0, (-w, w))
        errs.append(np.max(np.abs(interpolate(g, f(g.points), z) - f(z))))
    assert errs[1] <= 0.5 * errs[0] and errs[2] <= 0.5 * errs[1]


def test_kernels_on_grid_orthogonal(pw1, bessel0):
    for space, window in ((pw1, (-10.0, 10.0)), (bessel0, (0.5, 120.0))):
        t = sampling_grid(space, 0.3, window).points[:4]
        for i in range(len(t)):
            for j in range(i + 1, len(t)):
                ip = space.inner_product(space.kernel_function(t[i]), space.kernel_function(t[j]))
                scale = math.sqrt(space.kernel(t[i], t[i]).real * space.kernel(t[j], t[j]).real)
                assert abs(ip) <= 1e-4 * scale
