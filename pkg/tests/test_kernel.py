import math
from fractions import Fraction

import pytest
from mpmath.ctx_mp import MPContext

from latticesums.kernel import (KernelParams, bernoulli_numbers,
                                bernoulli_poly, kernel_coeff, kernel_moment,
                                kernel_series, kernel_series_dy,
                                moment_integral_exact)
from latticesums.scalar import ExactRing

CTX = MPContext()
CTX.prec = 100

R = ExactRing(12)


def test_bernoulli_numbers():
    assert bernoulli_numbers(8) == (
        Fraction(1), Fraction(-1, 2), Fraction(1, 6), Fraction(0),
        Fraction(-1, 30), Fraction(0), Fraction(1, 42), Fraction(0),
        Fraction(-1, 30))


def test_bernoulli_polynomials():
    assert bernoulli_poly(2, Fraction(0)) == Fraction(1, 6)
    assert bernoulli_poly(1, Fraction(1, 2)) == 0
    # B_3(y) = y^3 - 3 y^2/2 + y/2
    assert bernoulli_poly(3, Fraction(1, 3)) == Fraction(1, 27)


def test_integral_branch_is_bernoulli():
    p = KernelParams.make(Fraction(0), Fraction(1, 3))
    for k in range(7):
        assert kernel_coeff(R, k, p) == \
            R.from_fraction(bernoulli_poly(k, Fraction(1, 3)))
    assert kernel_coeff(R, 2, KernelParams.make(0, Fraction(0))) == \
        R.from_fraction(Fraction(1, 6))


def test_constant_coefficient_branches():
    nonint = KernelParams.make(Fraction(1, 2), Fraction(1, 3))
    assert kernel_coeff(R, 0, nonint).is_zero()
    integral = KernelParams.make(Fraction(2), Fraction(1, 3))
    assert kernel_coeff(R, 0, integral) == \
        R.root_of_unity(Fraction(-2) * Fraction(1, 3))


def test_first_coefficient_branches():
    y = Fraction(1, 3)
    nonint = KernelParams.make(Fraction(1, 2), y)
    expected = R.root_of_unity(Fraction(-1, 2) * y) \
        * R.inv(R.root_of_unity(Fraction(-1, 2)) - R.one())
    assert kernel_coeff(R, 1, nonint) == expected
    integral = KernelParams.make(Fraction(1), y)
    expected2 = R.from_fraction(y - Fraction(1, 2)) * R.root_of_unity(-y)
    assert kernel_coeff(R, 1, integral) == expected2


def test_series_matches_closed_coefficients():
    ring = ExactRing(36)
    for b in (Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 3)):
        for y in (Fraction(0), Fraction(1, 3), Fraction(1)):
            p = KernelParams.make(b, y)
            s = kernel_series(ring, p, 6)
            for k in range(7):
                assert s.coefficient((k,)) * ring.from_fraction(
                    Fraction(math.factorial(k))) == kernel_coeff(ring, k, p)


def test_bernoulli_relation_against_truncated_sum():
    # symmetric sums of e^{2 pi i m y}/m^k approach -(2 pi i)^k/k! B_k({y})
    N = 10_000
    for k, y in ((2, Fraction(1, 3)), (3, Fraction(1, 7)),
                 (4, Fraction(2, 5))):
        acc = CTX.mpc(0)
        for m in range(1, N + 1):
            ph = CTX.expjpi(2 * CTX.mpf(y.numerator) / y.denominator * m)
            acc += ph / CTX.mpf(m) ** k
            acc += ph.conjugate() / CTX.mpf(-m) ** k
        target = -(2j * CTX.pi) ** k / math.factorial(k) \
            * CTX.mpf(bernoulli_poly(k, y).numerator) \
            / bernoulli_poly(k, y).denominator
        assert abs(complex(acc - target)) < 10.0 / N


@pytest.mark.parametrize("b", [Fraction(0), Fraction(1, 2), Fraction(1, 3)])
@pytest.mark.parametrize("m", [-3, -2, -1, 0, 1, 2, 3])
@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_moment_four_case_table_by_symbolic_integration(k, m, b):
    ring = ExactRing(12)
    table = kernel_moment(k, m, b)
    shifted = m + b
    if k == 0:
        assert table == (-1 if shifted == 0 else 0)
    elif shifted == 0:
        assert table == 0
    else:
        assert table == 1 / shifted**k
    assert moment_integral_exact(ring, k, m, b) == ring.from_fraction(table)


def test_moment_nonrational_b():
    v = kernel_moment(2, 3, 0.5 + 0j)
    assert abs(v - 1 / 3.5**2) < 1e-12


def test_derivative_series_eigenproperty():
    # d/dy kernel = (t - 2 pi i b) * kernel, coefficientwise
    ring = ExactRing(84)
    for b in (Fraction(0), Fraction(1), Fraction(1, 3)):
        for y in (Fraction(0), Fraction(1, 7)):
            p = KernelParams.make(b, y)
            s = kernel_series(ring, p, 5)
            ds = kernel_series_dy(ring, p, 5)
            tpib = ring.two_pi_i() * ring.from_fraction(b)
            for k in range(5):
                # coefficient of t^k in (t - 2 pi i b) * s
                want = (s.coefficient((k - 1,)) if k else ring.zero()) \
                    - tpib * s.coefficient((k,))
                assert ds.coefficient((k,)) == want


def test_kernel_argument_validation():
    with pytest.raises(ValueError):
        KernelParams.make(Fraction(0), Fraction(3, 2))
