import math

import numpy as np
import pytest

from dbkit.entire import (EntireFunction, HermiteBiehler, IDENTITY, ab_decompose, as_entire,
                          constant, mean_type, sharp, verify_hb)
from dbkit.exceptions import EmptyGrid, ValidationError, ZeroOnAxis

EXP = EntireFunction.exponential(-1j)
COS = EntireFunction(func=np.cos, deriv=lambda z: -np.sin(z), is_real=True, label="cos")


def test_sharp_examples():
    assert sharp(EXP, 1j) == pytest.approx(math.exp(-1), rel=1e-15)
    z = np.array([0.3 + 2j, -1.1 - 0.4j])
    assert np.allclose(sharp(COS, z), np.cos(z), rtol=1e-15)
    assert sharp(IDENTITY, 1j) == pytest.approx(1j)


def test_sharp_is_an_involution(rng):
    z = rng.normal(size=50) + 1j * rng.normal(size=50)
    twice = EXP.sharp.sharp
    assert np.max(np.abs(twice(z) - EXP(z))) < 1e-15


@pytest.mark.parametrize("e, a_ref, b_ref", [
    (EXP, np.cos, np.sin),
    (IDENTITY + 1j, lambda z: z, lambda z: -np.ones_like(z)),
    (COS, np.cos, lambda z: np.zeros_like(z)),
])
def test_ab_decompose(e, a_ref, b_ref, rng):
    z = rng.uniform(-3, 3, 40) + 1j * rng.uniform(-2, 2, 40)
    a, b = ab_decompose(e)
    assert np.allclose(a(z), a_ref(z), atol=1e-13)
    assert np.allclose(b(z), b_ref(z), atol=1e-13)
    # a - i b reassembles e; both parts are real entire
    assert np.max(np.abs(a(z) - 1j * b(z) - e(z)) / np.abs(e(z))) < 1e-12
    assert np.allclose(a.sharp(z), a(z), atol=1e-13)
    assert np.allclose(b.sharp(z), b(z), atol=1e-13)


def test_verify_hb_examples():
    rep = verify_hb(EXP, [1j])
    assert rep.passed and rep.worst_margin == pytest.approx(math.e - 1 / math.e, rel=1e-12)
    assert math.isclose(rep.worst_margin, 2.3504, abs_tol=1e-4)
    assert not verify_hb(constant(1.0)).passed
    assert verify_hb(constant(1.0)).worst_margin == 0.0
    rep = verify_hb(IDENTITY + 1j, [1j])
    assert rep.passed and rep.worst_margin == pytest.approx(2.0)


def test_verify_hb_errors():
    with pytest.raises(EmptyGrid):
        verify_hb(EXP, [])
    with pytest.raises(ValidationError):
        verify_hb(EXP, [1.0 + 0j])


def test_hb_margin_sign_kept_under_multiplication_by_z_plus_i():
    pts = np.array([0.5j, 1 + 1j, -3 + 0.1j, 10 + 4j])
    for e in (EXP, IDENTITY + 2j):
        before = np.abs(e(pts)) - np.abs(e(np.conj(pts)))
        f = (IDENTITY + 1j) * e
        after = np.abs(f(pts)) - np.abs(f(np.conj(pts)))
        assert np.all(after[before > 0] > 0)


def test_mean_type_examples():
    assert mean_type(EntireFunction.exponential(-1j)) == pytest.approx(1.0, abs=1e-8)
    assert mean_type(constant(1.0)) == pytest.approx(0.0, abs=1e-12)
    ratio = lambda z: EXP.sharp(z) / EXP(z)  # noqa: E731
    assert mean_type(ratio) == pytest.approx(-2.0, abs=1e-8)
    with pytest.raises(ZeroOnAxis):
        mean_type(lambda z: z * 0)


def test_derivative_closed_form_and_fallback(rng):
    z = rng.normal(size=10) + 1j * rng.normal(size=10)
    plain = as_entire(lambda z: np.exp(2 * z) * np.sin(z))
    exact = np.exp(2 * z) * (2 * np.sin(z) + np.cos(z))
    assert np.max(np.abs(plain.derivative(z) - exact) / np.abs(exact)) < 1e-8
    assert np.allclose(EXP.derivative(z), -1j * EXP(z), rtol=1e-15)


def test_arithmetic():
    f = 2 * EXP + COS - 1
    z = np.array([0.2 - 0.3j])
    assert np.allclose(f(z), 2 * np.exp(-1j * z) + np.cos(z) - 1)
    p = EntireFunction.from_roots([-1j, -1j])
    assert np.allclose(p(z), (z + 1j) ** 2)
    assert np.allclose(p.derivative(z), 2 * (z + 1j))


def test_hermite_biehler_rejects_non_hb():
    with pytest.raises(ValidationError):
        HermiteBiehler.from_function(EntireFunction.exponential(1j))
    hb = HermiteBiehler.from_function(EXP)
    assert hb.no_real_zeros and hb(0.0) == 1
