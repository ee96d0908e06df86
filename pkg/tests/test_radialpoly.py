import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liouville_lab.radialpoly import (
    RadialPolynomial,
    bilinear_identity_residual,
    commutator_residual,
    euler_derivative,
    iterated_laplacian,
    poly_check,
    radial_laplacian,
)

R = RadialPolynomial


def mono(k, c=1):
    return R.monomial(k, c)


def test_laplacian_examples():
    assert radial_laplacian(mono(2), 3) == R.constant(6)
    assert radial_laplacian(mono(4), 3) == mono(2, 20)
    assert radial_laplacian(R.constant(7), 3).is_zero()


def test_iterated_laplacian_examples():
    assert iterated_laplacian(mono(4), 3, 2) == R.constant(120)
    p = mono(4) + mono(2, Fraction(1, 3))
    assert iterated_laplacian(p, 5, 0) == p
    assert iterated_laplacian(mono(4), 3, 3).is_zero()


def test_euler_examples():
    assert euler_derivative(mono(2)) == mono(2, 2)
    assert euler_derivative(R.constant(5)).is_zero()
    assert euler_derivative(mono(4) + mono(2)) == mono(4, 4) + mono(2, 2)


@pytest.mark.parametrize(
    "poly, n, i",
    [(mono(2), 3, 1), (mono(4), 5, 2), (mono(6) + mono(2, 3), 7, 3)],
)
def test_commutator_examples(poly, n, i):
    assert commutator_residual(poly, n, i).is_zero()


@pytest.mark.parametrize("z, w", [(mono(2), mono(2)), (mono(4), mono(2)), (mono(6), mono(4))])
@pytest.mark.parametrize("n", [1, 3, 8])
def test_bilinear_examples(z, w, n):
    assert bilinear_identity_residual(z, w, n).is_zero()


def test_odd_powers_rejected():
    with pytest.raises(ValueError):
        R({3: Fraction(1)})


def test_arithmetic():
    p = mono(2, 3) + R.constant(1)
    assert p - p == R()
    assert p * mono(2) == mono(4, 3) + mono(2)
    assert 2 * p == p + p
    assert p.degree == 2 and R().degree == -1
    assert p(2.0) == pytest.approx(13.0)


polys = st.dictionaries(
    st.integers(0, 6).map(lambda k: 2 * k),
    st.fractions(-50, 50, max_denominator=50),
    max_size=7,
).map(RadialPolynomial)


@given(polys, st.integers(1, 10), st.integers(0, 4))
def test_commutator_vanishes(poly, n, i):
    assert commutator_residual(poly, n, i).is_zero()


@given(polys, polys)
def test_bilinear_vanishes(z, w):
    assert bilinear_identity_residual(z, w).is_zero()


def test_laplacian_matches_finite_differences():
    rng = random.Random(3)
    poly = R({0: Fraction(1), 2: Fraction(-2, 3), 4: Fraction(5, 7), 6: Fraction(1, 9)})
    n = 4
    lap = radial_laplacian(poly, n)
    h = 2e-3  # five-point stencils: O(h^4) truncation, O(eps/h^2) rounding
    for _ in range(20):
        r = rng.uniform(0.5, 2.0)
        f = [poly(r + k * h) for k in (-2, -1, 0, 1, 2)]
        d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h**2)
        assert d2 + (n - 1) / r * d1 == pytest.approx(lap(r), rel=1e-8)


def test_poly_check_counts():
    result = poly_check(cases=50, seed=1)
    assert result == {"commutator": (50, 50), "bilinear": (50, 50)}


def test_evaluation_is_vectorized():
    r = np.linspace(0, 1, 5)
    assert np.allclose((mono(2) + R.constant(1))(r), r**2 + 1)
