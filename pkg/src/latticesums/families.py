"""Constructors for the arrangement families shipped as fixtures."""

from __future__ import annotations

from fractions import Fraction

from .lattice import Arrangement, make_functional


def hurwitz_a1(alpha) -> Arrangement:
    """Rank-one family with terms 1/((-m+a)^k1 m^k2 (m+a)^k3)."""
    alpha = Fraction(alpha)
    if alpha == 0:
        raise ValueError("the shift parameter must be nonzero")
    return Arrangement(1, [
        make_functional((-1,), alpha),
        make_functional((1,), 0),
        make_functional((1,), alpha),
    ])


def hurwitz_a2(alpha) -> Arrangement:
    """Rank-two, nine-functional family: the three direction pairs
    (1,0), (0,1), (1,1) each carrying the (-.+a, ., .+a) pattern."""
    alpha = Fraction(alpha)
    if alpha == 0:
        raise ValueError("the shift parameter must be nonzero")
    fs = []
    for d in [(1, 0), (0, 1), (1, 1)]:
        nd = tuple(-x for x in d)
        fs.append(make_functional(nd, alpha))
        fs.append(make_functional(d, 0))
        fs.append(make_functional(d, alpha))
    return Arrangement(2, fs)


def triangle(alpha, beta, gamma) -> Arrangement:
    """Directions (1,0), (0,1), (1,1) with arbitrary rational constants."""
    return Arrangement(2, [
        make_functional((1, 0), Fraction(alpha)),
        make_functional((0, 1), Fraction(beta)),
        make_functional((1, 1), Fraction(gamma)),
    ])


def a2_directions() -> Arrangement:
    """The all-constants-zero triangle: directions (1,0), (0,1), (1,1)."""
    return triangle(0, 0, 0)
