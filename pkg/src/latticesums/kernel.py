"""The one-dimensional generating kernel and its Taylor coefficients.

The kernel t * e^{(t - 2 pi i b) y} / (e^{t - 2 pi i b} - 1) splits into two
branches.  For integral b it reduces to the Bernoulli generating function
scaled by a root of unity; otherwise the denominator is a unit series and is
inverted directly.  Both the series and the closed-form coefficients live
here, together with the moment integrals against e^{-2 pi i m x} that drive
the brute-force/closed-form agreement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Union

from .series import TruncatedSeries, Truncation


@lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple:
    """B_0..B_n with B_1 = -1/2, from the defining series convolution."""
    out: List[Fraction] = [Fraction(1)]
    for m in range(1, n + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * out[j]
        out.append(-acc / (m + 1))
    return tuple(out)


@lru_cache(maxsize=None)
def bernoulli_poly_coeffs(k: int) -> tuple:
    """Coefficients (in increasing powers of y) of the k-th Bernoulli polynomial."""
    bn = bernoulli_numbers(k)
    return tuple(math.comb(k, j) * bn[k - j] for j in range(k + 1))


def bernoulli_poly(k: int, y) -> Fraction:
    acc = Fraction(0)
    yp = Fraction(1)
    for c in bernoulli_poly_coeffs(k):
        acc += c * yp
        yp *= y
    return acc


@dataclass(frozen=True)
class KernelParams:
    """Kernel data: constant b, fractional-part argument y in [0, 1]."""

    b: Union[Fraction, complex]
    y: Union[Fraction, float]
    integral: bool

    @classmethod
    def make(cls, b, y) -> "KernelParams":
        if isinstance(b, Fraction) or isinstance(b, int):
            b = Fraction(b)
            integral = b.denominator == 1
        else:
            b = complex(b)
            integral = b.imag == 0 and abs(b.real - round(b.real)) < 1e-12
        if isinstance(y, Fraction) or isinstance(y, int):
            y = Fraction(y)
        if not 0 <= y <= 1:
            raise ValueError(f"kernel argument must lie in [0, 1], got {y}")
        return cls(b, y, integral)


def _num(ring, v):
    """Numeric-ring scalar preserving exact rational inputs at full precision."""
    if isinstance(v, (int, Fraction)):
        return ring.from_fraction(Fraction(v))
    return ring.from_complex(complex(v))


def _exp_b(ring, b, scale=1):
    """e^{2 pi i b scale} in either ring."""
    if ring.exact:
        return ring.root_of_unity(Fraction(b) * scale)
    if isinstance(b, (int, Fraction)) and isinstance(scale, (int, Fraction)):
        return ring.root_of_unity(Fraction(b) * Fraction(scale))
    return ring.exp_2pii_times(complex(b) * complex(scale))


def _exp_ty(ring, var, vars, trunc, y) -> TruncatedSeries:
    """exp(t*y) as a univariate series with y a fixed constant."""
    s = TruncatedSeries(ring, vars, trunc)
    p = s.vars.index(var)
    if ring.exact:
        yv = Fraction(y)
        fact = Fraction(1)
        yp = Fraction(1)
        for j in range(trunc.total + 1):
            if j:
                fact *= j
                yp *= yv
            e = [0] * len(s.vars)
            e[p] = j
            coeff = yp / fact
            if coeff:
                s.terms[tuple(e)] = ring.from_fraction(coeff)
    else:
        yv = _num(ring, y)
        term = ring.one()
        for j in range(trunc.total + 1):
            if j:
                term = term * yv / j
            e = [0] * len(s.vars)
            e[p] = j
            s.terms[tuple(e)] = term
    return s.prune()


def _denominator_series(ring, var, vars, trunc, b) -> TruncatedSeries:
    """e^{t - 2 pi i b} - 1 as a series in var."""
    eb = _exp_b(ring, b, -1)  # e^{-2 pi i b}
    s = TruncatedSeries(ring, vars, trunc)
    p = s.vars.index(var)
    fact = Fraction(1)
    for j in range(trunc.total + 1):
        if j:
            fact *= j
        e = [0] * len(s.vars)
        e[p] = j
        c = eb * ring.from_fraction(Fraction(1) / fact)
        if j == 0:
            c = c - ring.one()
        if not ring.is_zero(c):
            s.terms[tuple(e)] = c
    return s


def _bernoulli_value(ring, k: int, y):
    """B_k(y) as a ring scalar, exactly for Fraction y."""
    if ring.exact:
        return ring.from_fraction(bernoulli_poly(k, Fraction(y)))
    acc = ring.zero()
    yp = ring.one()
    yv = _num(ring, y)
    for c in bernoulli_poly_coeffs(k):
        acc = acc + ring.from_fraction(c) * yp
        yp = yp * yv
    return acc


def kernel_series(ring, params: KernelParams, order: int, var: str = "t",
                  vars: Optional[tuple] = None) -> TruncatedSeries:
    """Taylor expansion of the kernel through total degree `order`."""
    vars = (var,) if vars is None else tuple(vars)
    trunc = Truncation(order)
    yscale = -Fraction(params.y) if isinstance(params.y, (int, Fraction)) \
        else -complex(params.y)
    pref = _exp_b(ring, params.b, yscale)
    if params.integral:
        s = TruncatedSeries(ring, vars, trunc)
        p = s.vars.index(var)
        fact = Fraction(1)
        for k in range(order + 1):
            if k:
                fact *= k
            e = [0] * len(vars)
            e[p] = k
            coeff = _bernoulli_value(ring, k, params.y) \
                * ring.from_fraction(1 / fact) * pref
            if not ring.is_zero(coeff):
                s.terms[tuple(e)] = coeff
        return s
    t = TruncatedSeries.variable(ring, vars, trunc, var)
    num = t * _exp_ty(ring, var, vars, trunc, params.y)
    den_inv = _denominator_series(ring, var, vars, trunc, params.b).invert_unit()
    return (num * den_inv).scalar_mul(pref)


def kernel_series_dy(ring, params: KernelParams, order: int, var: str = "t",
                     vars: Optional[tuple] = None) -> TruncatedSeries:
    """d/dy of the kernel series, by termwise differentiation in y."""
    vars = (var,) if vars is None else tuple(vars)
    trunc = Truncation(order)
    two_pi_i_b = ring.two_pi_i() * (ring.from_fraction(params.b)
                                    if ring.exact else _num(ring, params.b))
    yscale = -Fraction(params.y) if isinstance(params.y, (int, Fraction)) \
        else -complex(params.y)
    pref = _exp_b(ring, params.b, yscale)
    if params.integral:
        s = TruncatedSeries(ring, vars, trunc)
        p = s.vars.index(var)
        fact = Fraction(1)
        for k in range(order + 1):
            if k:
                fact *= k
            e = [0] * len(vars)
            e[p] = k
            # d/dy [e^{-2 pi i b y} B_k(y)] = e^{-2 pi i b y}(k B_{k-1} - 2 pi i b B_k)
            val = _bernoulli_value(ring, k - 1, params.y) \
                * ring.from_fraction(Fraction(k) / fact) if k else ring.zero()
            val = val - two_pi_i_b * _bernoulli_value(ring, k, params.y) \
                * ring.from_fraction(1 / fact)
            coeff = val * pref
            if not ring.is_zero(coeff):
                s.terms[tuple(e)] = coeff
        return s
    t = TruncatedSeries.variable(ring, vars, trunc, var)
    den_inv = _denominator_series(ring, var, vars, trunc, params.b).invert_unit()
    exp_ty = _exp_ty(ring, var, vars, trunc, params.y)
    # termwise y-derivative of exp(t y): sum_j y^{j-1}/(j-1)! t^j
    dexp = TruncatedSeries(ring, vars, trunc)
    p = dexp.vars.index(var)
    fact = Fraction(1)
    if ring.exact:
        y = Fraction(params.y)
        yp = Fraction(1)
        for j in range(1, trunc.total + 1):
            if j > 1:
                fact *= (j - 1)
                yp *= y
            e = [0] * len(vars)
            e[p] = j
            c = ring.from_fraction(yp / fact)
            if not ring.is_zero(c):
                dexp.terms[tuple(e)] = c
    else:
        yv = _num(ring, params.y)
        term = ring.one()
        for j in range(1, trunc.total + 1):
            if j > 1:
                term = term * yv / (j - 1)
            e = [0] * len(vars)
            e[p] = j
            dexp.terms[tuple(e)] = term
    inner = dexp - exp_ty.scalar_mul(two_pi_i_b)
    return (t * inner * den_inv).scalar_mul(pref)


def kernel_coeff(ring, k: int, params: KernelParams):
    """C(k, y; b): k! times the k-th Taylor coefficient."""
    if params.integral and ring.exact:
        pref = _exp_b(ring, params.b, -Fraction(params.y))
        return pref * ring.from_fraction(bernoulli_poly(k, Fraction(params.y)))
    s = kernel_series(ring, params, k)
    fact = ring.from_fraction(Fraction(math.factorial(k)))
    return s.coefficient((k,)) * fact


def kernel_moment(k: int, m: int, b) -> Union[Fraction, complex]:
    """The four-case value of -(2 pi i)^k/k! * integral_0^1 C(k,x;b) e^{-2 pi i m x} dx."""
    if isinstance(b, Fraction) or isinstance(b, int):
        shifted = Fraction(m) + Fraction(b)
        zero = shifted == 0
    else:
        shifted = m + complex(b)
        zero = shifted == 0
    if k == 0:
        return Fraction(-1) if zero else Fraction(0)
    if zero:
        return Fraction(0)
    if isinstance(shifted, Fraction):
        return 1 / shifted**k
    return 1 / shifted**k


def kernel_coeff_poly(ring, k: int, params_b: Fraction):
    """C(k, x; b) as a polynomial in x times e^{-2 pi i b x}.

    Returns the coefficient list [p_0, ..., p_d] (ring scalars) such that
    C(k, x; b) = (sum_j p_j x^j) e^{-2 pi i b x}.
    """
    b = Fraction(params_b)
    if b.denominator == 1:
        return [ring.from_fraction(c) for c in bernoulli_poly_coeffs(k)]
    trunc = Truncation(max(k, 1))
    inv = _denominator_series(ring, "t", ("t",), trunc, b).invert_unit()
    kfact = Fraction(math.factorial(k))
    out = []
    jfact = Fraction(1)
    for j in range(k):
        if j:
            jfact *= j
        coeff = inv.coefficient((k - 1 - j,))
        out.append(coeff * ring.from_fraction(kfact / jfact))
    return out if out else [ring.zero()]


def moment_integral_exact(ring, k: int, m: int, b: Fraction):
    """-(2 pi i)^k/k! * integral_0^1 C(k,x;b) e^{-2 pi i m x} dx, symbolically.

    The integrand is a polynomial times an exponential, so integration by
    parts gives a closed form inside Q(zeta_N)(pi).
    """
    b = Fraction(b)
    poly = kernel_coeff_poly(ring, k, b)
    shift = b + m
    if shift == 0:
        integral = ring.zero()
        for j, p in enumerate(poly):
            integral = integral + p * ring.from_fraction(Fraction(1, j + 1))
    else:
        c = -(ring.two_pi_i() * ring.from_fraction(shift))
        c_inv = ring.inv(c)
        e_c = ring.root_of_unity(-b)  # e^{-2 pi i (b + m)} = e^{-2 pi i b}
        integral = ring.zero()
        for j, p in enumerate(poly):
            if ring.is_zero(p):
                continue
            jfact = math.factorial(j)
            # int_0^1 x^j e^{cx} dx
            at_one = ring.zero()
            for i in range(j + 1):
                term = ring.from_fraction(Fraction((-1) ** (j - i) * jfact,
                                                   math.factorial(i)))
                at_one = at_one + term * c_inv ** (j - i + 1)
            at_zero = ring.from_fraction(Fraction((-1) ** j * jfact)) \
                * c_inv ** (j + 1)
            integral = integral + p * (e_c * at_one - at_zero)
    sign = ring.from_fraction(Fraction(-1, math.factorial(k)))
    return sign * ring.two_pi_i() ** k * integral
