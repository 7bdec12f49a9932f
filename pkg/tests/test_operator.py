import math

import numpy as np
import pytest

from dbkit.exceptions import (EigenvalueHit, NotAnEigenvalue, NotFiniteDimensional,
                              ValidationError, WindowMismatch)
from dbkit.models import catalog_examples, polynomial_space, pw_spectrum
from dbkit.operator import (_spectrum_from_list, domain_density, eigenfunction,
                            interlacing_check, rank_one_extension_matrix, resolvent_apply,
                            spectrum)
from dbkit.phase import phase, sampling_grid
from dbkit.space import membership

P2 = polynomial_space([-1j, -1j])


@pytest.mark.parametrize("beta", [0.0, 0.3, 1.2, math.pi / 2, 3.0])
def test_pw_spectrum(pw1, beta):
    seq = spectrum(pw1, beta, (-20.0, 20.0))
    ref = pw_spectrum(1.0, beta, (-20.0, 20.0))
    assert seq.eigenvalues.size == ref.size
    assert np.max(np.abs(seq.eigenvalues - ref)) <= 1e-8
    s = pw1.s_beta(beta).func(seq.eigenvalues)
    assert np.all(np.abs(s) <= 1e-8 * np.maximum(1.0, np.abs(pw1.e.func(seq.eigenvalues))))
    assert np.all(np.abs(pw1.s_beta(beta).derivative(seq.eigenvalues)) >= 1e-6)


def test_bessel_spectra(bessel0):
    # spaces of the Bessel family live in the variable lambda = z**2
    seq0 = spectrum(bessel0, 0.0, (0.5, 60.0**2))
    k = np.arange(seq0.eigenvalues.size)
    assert np.max(np.abs(np.sqrt(seq0.eigenvalues) - (k + 0.5) * math.pi)) <= 1e-6
    seq1 = spectrum(bessel0, math.pi / 2, (0.5, 60.0**2))
    k = np.arange(1, seq1.eigenvalues.size + 1)
    assert np.max(np.abs(np.sqrt(seq1.eigenvalues) - k * math.pi)) <= 1e-6
    assert interlacing_check(seq0, seq1)


def test_interlacing_examples(pw1):
    w = (-10.0, 10.0)
    a = _spectrum_from_list(np.arange(-3, 4) * math.pi, 0.0, w)
    b = _spectrum_from_list(np.arange(-3, 3) * math.pi + math.pi / 2, math.pi / 2, w)
    assert interlacing_check(a, b)
    w = (-0.5, 3.5)
    assert not interlacing_check(_spectrum_from_list([0, 1], 0.0, w),
                                 _spectrum_from_list([2, 3], 1.0, w))
    assert interlacing_check(spectrum(pw1, 0.3, (-30, 30)), spectrum(pw1, 1.2, (-30, 30)))
    with pytest.raises(WindowMismatch):
        interlacing_check(spectrum(pw1, 0.3, (-30, 30)), spectrum(pw1, 1.2, (-20, 30)))
    with pytest.raises(ValidationError):
        interlacing_check(a, a)


@pytest.mark.parametrize("space", catalog_examples(), ids=lambda s: s.label)
def test_spectrum_equals_sampling_grid(space):
    for beta in (0.0, 0.7, math.pi / 2):
        s = spectrum(space, beta, (-40.0, 40.0)).eigenvalues
        g = sampling_grid(space, beta, (-40.0, 40.0)).points
        assert s.size == g.size and np.allclose(s, g, atol=1e-8)


def test_spectra_partition_the_line(pw1, rng):
    window = (-15.0, 15.0)
    betas = np.linspace(0, math.pi, 181, endpoint=False)
    for x in rng.uniform(-12, 12, 5):
        own = float(phase(pw1, x, window=window)) % math.pi
        hits = []
        for b in np.append(betas, own):
            ev = spectrum(pw1, b, window).eigenvalues
            if np.any(np.abs(ev - x) <= 1e-6):
                hits.append(b)
        assert hits == [own]


def test_resolvent_algebraic_identity(pw1, rng):
    f = pw1.kernel_function(0.4 - 0.2j)
    for beta, w in ((0.0, 1j), (1.1, 2.0 - 0.5j)):
        g = resolvent_apply(pw1, beta, w, f)
        z = rng.uniform(-8, 8, 100) + 1j * rng.uniform(-3, 3, 100)
        s = pw1.s_beta(beta)
        lhs = (z - w) * g(z) + s(z) / s(w) * f(w)
        assert np.max(np.abs(lhs - f(z))) <= 1e-10
        # removable singularity at z = w
        assert abs(g(w + 1e-10) - g(w + 1e-4)) <= 1e-3


def test_first_resolvent_identity(pw1):
    f = pw1.kernel_function(0.0)
    w1, w2 = 1j, 0.5 + 2j
    x, y = np.meshgrid(np.linspace(-10, 10, 21), [-2.0, 0.0, 0.5, 2.0])
    z = (x + 1j * y).ravel()
    lhs = resolvent_apply(pw1, 0.0, w1, f)(z) - resolvent_apply(pw1, 0.0, w2, f)(z)
    rhs = (w1 - w2) * resolvent_apply(pw1, 0.0, w1, resolvent_apply(pw1, 0.0, w2, f))(z)
    assert np.max(np.abs(lhs - rhs)) <= 1e-7


def test_resolvent_output_is_member(pw1):
    g = resolvent_apply(pw1, 0.0, 1j, pw1.kernel_function(0.0))
    assert membership(pw1, g).member


def test_resolvent_sharp_compatible(pw1, rng):
    f = pw1.kernel_function(0.4 - 0.2j)
    w = 0.8 + 1.3j
    g = resolvent_apply(pw1, 0.6, w, f)
    gb = resolvent_apply(pw1, 0.6, np.conj(w), f.sharp)
    z = rng.uniform(-8, 8, 30) + 1j * rng.uniform(-3, 3, 30)
    assert np.max(np.abs(gb(z) - g.sharp(z))) <= 1e-8


def test_resolvent_at_eigenvalue(pw1):
    with pytest.raises(EigenvalueHit):
        resolvent_apply(pw1, 0.0, math.pi, pw1.kernel_function(0.0))


def test_eigenfunction_is_kernel(pw1, rng):
    psi = eigenfunction(pw1, 0.0, math.pi)
    z = rng.uniform(-8, 8, 20) + 1j * rng.uniform(-2, 2, 20)
    ratio = psi(z) / pw1.kernel(z, math.pi)
    assert np.max(np.abs(ratio - ratio[0])) <= 1e-8 * abs(ratio[0])
    assert pw1.norm(psi) == pytest.approx(1.0, rel=1e-6)


def test_eigenfunctions_orthogonal(pw1, bessel0):
    for space, window in ((pw1, (-10.0, 10.0)), (bessel0, (0.5, 200.0))):
        ev = spectrum(space, 0.4, window).eigenvalues[:3]
        psis = [eigenfunction(space, 0.4, x) for x in ev]
        for i in range(3):
            for j in range(i + 1, 3):
                assert abs(space.inner_product(psis[i], psis[j])) <= 1e-4


def test_eigenfunction_resolvent_equation(pw1, rng):
    x = spectrum(pw1, 0.9, (-10.0, 10.0)).eigenvalues[2]
    psi = eigenfunction(pw1, 0.9, x)
    w = 0.3 + 1.7j
    g = resolvent_apply(pw1, 0.9, w, psi)
    z = rng.uniform(-8, 8, 20) + 1j * rng.uniform(-2, 2, 20)
    assert np.max(np.abs(g(z) - psi(z) / (x - w))) <= 1e-7


def test_not_an_eigenvalue(pw1):
    with pytest.raises(NotAnEigenvalue):
        eigenfunction(pw1, 0.0, 1.0)


def test_domain_density():
    assert domain_density(polynomial_space([-1j, -1j])) == 0.0
    assert domain_density(polynomial_space([-1j, -2j, -3j])) is not None


def test_domain_density_pw(pw1):
    assert domain_density(pw1, np.linspace(0, math.pi, 8, endpoint=False)) is None


def test_rank_one_matrix():
    M = rank_one_extension_matrix(P2, math.pi / 2)
    assert np.allclose(np.sort(np.linalg.eigvals(M).real), [-1.0, 1.0], atol=1e-8)
    for beta in (0.4, 1.0, 2.5):
        M = rank_one_extension_matrix(P2, beta)
        assert np.max(np.abs(M - M.conj().T)) <= 1e-12
        ev = np.sort(np.linalg.eigvalsh(M))
        roots = np.sort(np.roots([math.sin(beta), 2 * math.cos(beta), -math.sin(beta)]).real)
        assert np.max(np.abs(ev - roots)) <= 1e-8
        sp = np.sort(spectrum(P2, beta, (-1e4, 1e4)).eigenvalues)
        assert np.max(np.abs(ev - sp)) <= 1e-8


def test_rank_one_higher_dimension():
    sp = polynomial_space([-1j, -2j, -0.5 + -1j])
    for beta in (0.7, 2.0):
        ev = np.sort(np.linalg.eigvalsh(rank_one_extension_matrix(sp, beta)))
        assert np.max(np.abs(ev - spectrum(sp, beta, (-1e4, 1e4)).eigenvalues)) <= 1e-8


def test_rank_one_errors(pw1):
    with pytest.raises(NotFiniteDimensional):
        rank_one_extension_matrix(pw1, 1.0)
    with pytest.raises(ValidationError):
        rank_one_extension_matrix(P2, 0.0)
