"""Integer-lattice combinatorics of affine hyperplane arrangements.

An arrangement is a finite ordered list of affine functionals
f(v) = <f_vec, v> + c_f with nonzero integer directions spanning R^r.
This module computes everything downstream evaluators need from it:
indispensable functionals, the bases (independent r-subsets) with dual
vectors and coset representatives of Z^r modulo the direction lattice,
a generic direction phi, the phi-branched multi-dimensional fractional
part, and the excluded-hyperplane membership tests.  All of it is exact
Fraction arithmetic; floats are only accepted for numeric-mode points.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import intlinalg
from .cyclotomic import CyclotomicField
from .errors import LatticeSumError

NUMERIC_EPS = 1e-9


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction
    im: Fraction

    def as_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)


Constant = Union[Fraction, GaussianRational, complex]


@dataclass(frozen=True)
class Functional:
    """An affine functional: integer direction plus a constant term."""

    direction: Tuple[int, ...]
    constant: Constant

    def __post_init__(self):
        if all(x == 0 for x in self.direction):
            raise ValueError("functional direction must be nonzero")

    @property
    def exact(self) -> bool:
        return isinstance(self.constant, (Fraction, GaussianRational))

    def rational_constant(self) -> Fraction:
        if isinstance(self.constant, Fraction):
            return self.constant
        if isinstance(self.constant, GaussianRational) and self.constant.im == 0:
            return self.constant.re
        raise ValueError(f"constant {self.constant!r} is not a real rational")

    def constant_complex(self) -> complex:
        if isinstance(self.constant, Fraction):
            return complex(self.constant)
        if isinstance(self.constant, GaussianRational):
            return self.constant.as_complex()
        return complex(self.constant)

    def constant_is_integer(self) -> Optional[bool]:
        """Exactly decidable only for exact constants; None for floats."""
        if isinstance(self.constant, Fraction):
            return self.constant.denominator == 1
        if isinstance(self.constant, GaussianRational):
            return self.constant.im == 0 and self.constant.re.denominator == 1
        return None

    def evaluate_int(self, v: Sequence[int]):
        base = sum(d * x for d, x in zip(self.direction, v))
        if isinstance(self.constant, Fraction):
            return base + self.constant
        if isinstance(self.constant, GaussianRational):
            return GaussianRational(base + self.constant.re, self.constant.im)
        return base + self.constant


def make_functional(direction, constant) -> Functional:
    if isinstance(constant, (int, Fraction)):
        constant = Fraction(constant)
    elif isinstance(constant, tuple):
        constant = GaussianRational(Fraction(constant[0]), Fraction(constant[1]))
    elif isinstance(constant, GaussianRational):
        pass
    else:
        constant = complex(constant)
        if constant.imag == 0:
            as_frac = Fraction(constant.real)
            if as_frac.denominator <= 10**6 and float(as_frac) == constant.real:
                constant = as_frac
    return Functional(tuple(int(x) for x in direction), constant)


@dataclass
class Basis:
    """An independent r-subset with its dual vectors and coset data."""

    members: Tuple[int, ...]
    direction_matrix: List[List[int]]
    dual_vectors: Dict[int, Tuple[Fraction, ...]]
    index: int
    coset_reps: List[Tuple[int, ...]]

    def dual(self, member: int) -> Tuple[Fraction, ...]:
        return self.dual_vectors[member]


@dataclass(frozen=True)
class GenericDirection:
    phi: Tuple[int, ...]


class Arrangement:
    def __init__(self, rank: int, functionals: Sequence[Functional]):
        if rank < 1:
            raise ValueError("rank must be >= 1")
        if not functionals:
            raise ValueError("arrangement must be nonempty")
        self.rank = rank
        self.functionals = list(functionals)
        for f in self.functionals:
            if len(f.direction) != rank:
                raise ValueError("direction length must equal the rank")
        if intlinalg.rank([f.direction for f in self.functionals]) != rank:
            raise ValueError("directions must span the full space")

    def __len__(self):
        return len(self.functionals)

    @property
    def size(self) -> int:
        return len(self.functionals)

    @property
    def is_exact(self) -> bool:
        return all(f.exact for f in self.functionals)

    @cached_property
    def indispensable(self) -> Tuple[int, ...]:
        """Functionals whose removal drops the direction span below full rank."""
        out = []
        dirs = [f.direction for f in self.functionals]
        for i in range(len(dirs)):
            rest = dirs[:i] + dirs[i + 1:]
            if intlinalg.rank(rest) != self.rank:
                out.append(i)
        return tuple(out)

    @cached_property
    def bases(self) -> List[Basis]:
        return enumerate_bases(self)

    @cached_property
    def codim1_normals(self) -> List[Tuple[int, ...]]:
        """Integer normals of the spans of independent (r-1)-subsets."""
        if self.rank == 1:
            return [(1,)]
        normals = {}
        dirs = [f.direction for f in self.functionals]
        for combo in itertools.combinations(range(len(dirs)), self.rank - 1):
            rows = [dirs[i] for i in combo]
            if intlinalg.rank(rows) != self.rank - 1:
                continue
            n = tuple(intlinalg.integer_normal(rows))
            canon = n if n > tuple(-x for x in n) else tuple(-x for x in n)
            normals[canon] = True
        return list(normals)

    def permuted(self, perm: Sequence[int]) -> "Arrangement":
        return Arrangement(self.rank, [self.functionals[i] for i in perm])

    def restricted(self, keep: Sequence[int]) -> "Arrangement":
        return Arrangement(self.rank, [self.functionals[i] for i in keep])


# ---------------------------------------------------------------------------
# bases
# ---------------------------------------------------------------------------


def enumerate_bases(arr: Arrangement) -> List[Basis]:
    """All r-subsets with invertible direction matrix, with dual vectors,
    index and Smith-normal-form coset representatives."""
    r = arr.rank
    out = []
    for combo in itertools.combinations(range(arr.size), r):
        rows = [list(arr.functionals[i].direction) for i in combo]
        d = intlinalg.det(rows)
        if d == 0:
            continue
        inv = intlinalg.mat_inverse(rows)
        duals = {m: tuple(inv[i][j] for i in range(r))
                 for j, m in enumerate(combo)}
        index = abs(int(d))
        out.append(Basis(tuple(combo), rows, duals, index, _coset_reps(rows)))
    for i in arr.indispensable:
        for b in out:
            if i not in b.members:
                raise LatticeSumError(
                    "internal: an indispensable functional escaped a basis")
    return out


def _coset_reps(rows: List[List[int]]) -> List[Tuple[int, ...]]:
    """Representatives of Z^r modulo the row lattice, via Smith normal form."""
    r = len(rows)
    D, U, V = intlinalg.smith_normal_form(rows)
    v_inv_frac = intlinalg.mat_inverse(V)
    if any(x.denominator != 1 for row in v_inv_frac for x in row):
        raise LatticeSumError("internal: Smith transform was not unimodular")
    v_inv = [[int(x) for x in row] for row in v_inv_frac]
    ranges = [range(D[i][i]) for i in range(r)]
    reps = []
    for c in itertools.product(*ranges):
        # w = c * V^{-1} (row-vector convention)
        w = tuple(sum(c[i] * v_inv[i][j] for i in range(r)) for j in range(r))
        reps.append(w)
    return reps


def lattice_contains(basis: Basis, v: Sequence) -> bool:
    return intlinalg.integer_row_lattice_contains(basis.direction_matrix, v)


def indispensable_set(arr: Arrangement) -> Tuple[int, ...]:
    """Functionals whose removal drops the direction span below full rank."""
    return arr.indispensable


# ---------------------------------------------------------------------------
# generic direction phi
# ---------------------------------------------------------------------------


def choose_phi(arr: Arrangement, skip: int = 0) -> GenericDirection:
    """Deterministic phi = (1, M, ..., M^(r-1)) for the smallest workable M.

    `skip` > 0 returns the (skip+1)-th workable M, for invariance tests.
    """
    r = arr.rank
    M = 1
    found = 0
    while True:
        phi = tuple(M**i for i in range(r))
        if _phi_valid(arr, phi):
            if found == skip:
                return GenericDirection(phi)
            found += 1
        M += 1
        if M > 10_000:
            raise LatticeSumError("no generic direction found (bug)")


def _phi_valid(arr: Arrangement, phi: Sequence[int]) -> bool:
    for b in arr.bases:
        for m in b.members:
            dual = b.dual(m)
            if sum(Fraction(p) * d for p, d in zip(phi, dual)) == 0:
                return False
    return True


# ---------------------------------------------------------------------------
# fractional parts and excluded hyperplanes
# ---------------------------------------------------------------------------


def _frac(a):
    if isinstance(a, Fraction):
        return a - (a.numerator // a.denominator)
    return a - math.floor(a)


def frac_part(y: Sequence, w: Sequence[int], basis: Basis, member: int,
              phi: GenericDirection):
    """The branch-aware fractional part of <y + w, dual(member)>.

    Returns {a} on the positive phi-branch and 1 - {-a} on the negative one,
    so integer values of a map to 0 or 1 respectively.
    """
    dual = basis.dual(member)
    val = sum((yi + wi) * d for yi, wi, d in zip(y, w, dual))
    sgn = sum(Fraction(p) * d for p, d in zip(phi.phi, dual))
    if sgn > 0:
        return _frac(val)
    return 1 - _frac(-val)


def inner_dual(y: Sequence, basis: Basis, member: int):
    dual = basis.dual(member)
    return sum(yi * d for yi, d in zip(y, dual))


def on_excluded_hyperplanes(y: Sequence, arr: Arrangement,
                            subset: Optional[Sequence[int]] = None) -> bool:
    """Whether y lies on an excluded translated hyperplane for some
    indispensable functional in `subset` (default: all of them).

    For indispensable f the excluded set is characterized by
    <y + w, dual_f> in Z for some integer w, i.e. <y, dual_f> lying in the
    subgroup of Q generated by 1 and the dual entries.
    """
    if subset is None:
        subset = arr.indispensable
    else:
        for i in subset:
            if i not in arr.indispensable:
                raise ValueError(f"functional {i} is not indispensable")
    if not subset:
        return False
    basis = arr.bases[0]
    exact = all(isinstance(v, (int, Fraction)) for v in y)
    for i in subset:
        dual = basis.dual(i)
        if exact:
            g = intlinalg.vec_gcd_of_fractions(
                [Fraction(1)] + [Fraction(d) for d in dual])
            val = sum(Fraction(v) * d for v, d in zip(y, dual))
            if (val / g).denominator == 1:
                return True
        else:
            g = float(intlinalg.vec_gcd_of_fractions(
                [Fraction(1)] + [Fraction(d) for d in dual]))
            val = float(sum(v * float(d) for v, d in zip(y, dual)))
            dist = abs(val / g - round(val / g))
            if dist < NUMERIC_EPS:
                warnings.warn("point is numerically on an excluded hyperplane")
                return True
    return False


def in_singular_locus(y: Sequence, arr: Arrangement) -> bool:
    """Whether y lies on any codimension-one direction span + Z^r.

    This is the locus where the fractional parts jump; polytope-based
    reconstruction and the differential hierarchy require y off it.
    """
    exact = all(isinstance(v, (int, Fraction)) for v in y)
    for n in arr.codim1_normals:
        g = math.gcd(*[abs(x) for x in n]) if len(n) > 1 else abs(n[0])
        if exact:
            val = sum(Fraction(v) * x for v, x in zip(y, n))
            if (val / g).denominator == 1:
                return True
        else:
            val = sum(float(v) * x for v, x in zip(y, n)) / g
            if abs(val - round(val)) < NUMERIC_EPS:
                return True
    return False


# ---------------------------------------------------------------------------
# coset character sums
# ---------------------------------------------------------------------------


def coset_character_sum(basis: Basis, lam: Sequence[Fraction]):
    """(1/index) * sum over coset reps w of e^{2 pi i <w, lam>}.

    Requires lam in the lattice spanned by the dual basis; returns the exact
    cyclotomic value (1 if lam is integral, else 0, by character
    orthogonality).
    """
    lam = [Fraction(x) for x in lam]
    for row in basis.direction_matrix:
        pairing = sum(l * d for l, d in zip(lam, row))
        if pairing.denominator != 1:
            raise ValueError("lam must pair integrally with the basis directions")
    N = 4
    for w in basis.coset_reps:
        val = sum(l * wi for l, wi in zip(lam, w))
        N = N * val.denominator // math.gcd(N, val.denominator)
    field = CyclotomicField(N)
    acc = field.zero()
    for w in basis.coset_reps:
        val = sum(l * wi for l, wi in zip(lam, w))
        acc = acc + field.root_of_unity(val)
    return acc * Fraction(1, basis.index)


# ---------------------------------------------------------------------------
# JSON interchange
# ---------------------------------------------------------------------------


def _constant_to_json(c: Constant):
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else str(c)
    if isinstance(c, GaussianRational):
        return {"re": str(c.re), "im": str(c.im)}
    return {"re": c.real, "im": c.imag}


def _constant_from_json(obj):
    if isinstance(obj, (int, str)):
        return Fraction(obj)
    if isinstance(obj, float):
        return complex(obj)
    if isinstance(obj, dict):
        re, im = obj.get("re", 0), obj.get("im", 0)
        if isinstance(re, float) or isinstance(im, float):
            return complex(float(re), float(im))
        return GaussianRational(Fraction(re), Fraction(im))
    raise ValueError(f"unreadable constant: {obj!r}")


def arrangement_to_json(arr: Arrangement) -> dict:
    return {
        "rank": arr.rank,
        "functionals": [
            {"direction": list(f.direction),
             "constant": _constant_to_json(f.constant)}
            for f in arr.functionals
        ],
    }


def arrangement_from_json(obj) -> Arrangement:
    if isinstance(obj, str):
        obj = json.loads(obj)
    fs = []
    for item in obj["functionals"]:
        fs.append(Functional(tuple(int(x) for x in item["direction"]),
                             _constant_from_json(item["constant"])))
    return Arrangement(int(obj["rank"]), fs)


def load_arrangement(path) -> Arrangement:
    with open(path) as fh:
        return arrangement_from_json(json.load(fh))
