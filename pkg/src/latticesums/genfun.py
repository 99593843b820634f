"""Central evaluator for lattice-sum special values.

The closed form is a sum over bases B of the arrangement: a product of
one-dimensional kernels in the basis variables, averaged over coset
representatives, times one factor t_g / (linear form in t) for every
functional outside the basis.  Factors whose linear form has a nonzero
constant term are inverted as unit series; the rest are genuinely singular
at the origin and are carried as rational forms whose singularities cancel
across bases.  Taylor coefficients of the holomorphic total give the
special values S via the weight prefactor prod_f -(2 pi i)^{k_f} / k_f!.

Two evaluation strategies share the same summand builder:

* ``generating_function`` assembles the full truncated series (fine for
  small arrangements and used by all cross-checks);
* ``coefficient`` targets a single exponent vector.  Unit factors are
  collapsed to the closed form -(a_g + U_g)^{-k_g} immediately, so each
  summand only keeps its basis variables and the variables of singular
  denominators alive; summands are then grouped by the connected
  components of their shared singular hyperplanes and resolved per
  component.  This keeps nine-functional evaluations at weight vectors
  like (2,...,2) in fractions of a second.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import ExcludedPoint
from .kernel import KernelParams, kernel_series, kernel_series_dy
from .lattice import (Arrangement, Basis, GenericDirection, choose_phi,
                      frac_part, on_excluded_hyperplanes)
from .scalar import ExactRing, NumericRing
from .series import (LinearForm, RationalForm, TruncatedSeries, Truncation,
                     sum_rational_forms)


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative integer weights, one per functional."""

    weights: Tuple[int, ...]

    @classmethod
    def make(cls, weights) -> "WeightVector":
        w = tuple(int(x) for x in weights)
        if any(x < 0 for x in w):
            raise ValueError("weights must be nonnegative")
        return cls(w)

    @property
    def total(self) -> int:
        return sum(self.weights)

    def zero_set(self) -> Tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.weights) if k == 0)

    def positive_set(self) -> Tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.weights) if k > 0)

    def one_set(self) -> Tuple[int, ...]:
        return tuple(i for i, k in enumerate(self.weights) if k == 1)


@dataclass
class EvaluationReport:
    value: object
    series_order: int
    basis_count: int
    degenerate_divisions: int
    mode: str
    n_cyclotomic: Optional[int] = None
    timing_ms: float = 0.0

    def to_json(self, include_C=None) -> dict:
        out = {
            "S": str(self.value),
            "mode": self.mode,
            "order": self.series_order,
            "N_cyclotomic": self.n_cyclotomic,
            "timing_ms": round(self.timing_ms, 3),
        }
        if include_C is not None:
            out["C"] = str(include_C)
        return out


def cyclotomic_order(arr: Arrangement, y: Sequence,
                     k: Optional[WeightVector] = None,
                     phi: Optional[GenericDirection] = None) -> int:
    """Smallest safe N: every exponential e^{-2 pi i q} met while evaluating
    at (arr, y) lies in Q(zeta_N).

    The constants pair multiplicatively with the fractional parts (and with
    the polytope vertex coordinates), so N collects the products of their
    denominators, not just the denominators themselves.
    """
    for f in arr.functionals:
        f.rational_constant()
    yq = [Fraction(v) for v in y]
    phi = phi or choose_phi(arr)
    N = 4

    def lcm_in(x: int):
        nonlocal N
        N = N * x // math.gcd(N, x)

    for f in arr.functionals:
        lcm_in(f.rational_constant().denominator)
    for b in arr.bases:
        for m in b.members:
            cden = arr.functionals[m].rational_constant().denominator
            dual_den = 1
            for d in b.dual(m):
                dual_den = dual_den * d.denominator // math.gcd(dual_den,
                                                                d.denominator)
            ip_den = sum(v * d for v, d in zip(yq, b.dual(m))).denominator
            scale = dual_den * ip_den // math.gcd(dual_den, ip_den)
            lcm_in(cden * scale)
    return N


class EvaluationContext:
    """Per-(arrangement, y, mode) state shared by all evaluation calls."""

    def __init__(self, arr: Arrangement, y: Sequence, mode: str = "exact",
                 precision: int = 128, phi: Optional[GenericDirection] = None,
                 workers: int = 1):
        if mode not in ("exact", "numeric"):
            raise ValueError("mode must be 'exact' or 'numeric'")
        if len(y) != arr.rank:
            raise ValueError("y must have one entry per dimension")
        self.arr = arr
        self.mode = mode
        self.workers = max(1, workers)
        self.phi = phi or choose_phi(arr)
        self.vars = tuple(f"t{i}" for i in range(arr.size))
        if mode == "exact":
            self.y = tuple(Fraction(v) for v in y)
            self.N = cyclotomic_order(arr, self.y, phi=self.phi)
            self.ring = ExactRing(self.N)
        else:
            self.y = tuple(v if isinstance(v, Fraction) else float(v)
                           for v in y)
            self.N = None
            self.ring = NumericRing(precision)
        self._kernels: Dict[tuple, TruncatedSeries] = {}
        self._geometry: Dict[int, list] = {}
        self._series: Dict[int, TruncatedSeries] = {}
        self._coeffs: Dict[Tuple[int, ...], object] = {}

    # -- scalar helpers -----------------------------------------------------

    def constant(self, i: int):
        f = self.arr.functionals[i]
        if self.mode == "exact":
            return f.rational_constant()
        return f.constant_complex()

    def to_scalar(self, q):
        if self.mode == "exact":
            return self.ring.from_fraction(Fraction(q))
        if isinstance(q, (int, Fraction)):
            return self.ring.from_fraction(Fraction(q))
        return self.ring.from_complex(complex(q))

    def yhat(self, bidx: int, w: Tuple[int, ...], member: int):
        return frac_part(self.y, w, self.arr.bases[bidx], member, self.phi)

    def kernel(self, bidx: int, w: Tuple[int, ...], member: int,
               order: int, derivative: bool = False) -> TruncatedSeries:
        key = (bidx, w, member, order, derivative)
        got = self._kernels.get(key)
        if got is None:
            params = KernelParams.make(self.constant(member),
                                       self.yhat(bidx, w, member))
            fn = kernel_series_dy if derivative else kernel_series
            got = fn(self.ring, params, order, var=self.vars[member])
            self._kernels[key] = got
        return got

    # -- basis geometry ------------------------------------------------------

    def geometry(self, bidx: int) -> list:
        """For each g outside basis bidx: (g, lin, aq, degenerate) where the
        factor denominator is t_g - sum lin[v] t_v - 2 pi i * aq."""
        got = self._geometry.get(bidx)
        if got is not None:
            return got
        b = self.arr.bases[bidx]
        out = []
        for g in range(self.arr.size):
            if g in b.members:
                continue
            gdir = self.arr.functionals[g].direction
            lin: Dict[int, Fraction] = {}
            aq = self.constant(g)
            for m in b.members:
                coef = sum(Fraction(d) * e
                           for d, e in zip(gdir, b.dual(m)))
                if coef:
                    lin[m] = coef
                aq = aq - self.constant(m) * coef
            if self.mode == "exact":
                degenerate = aq == 0
            else:
                norm = max([abs(complex(c)) for c in lin.values()] + [1.0])
                degenerate = abs(complex(aq)) < 1e-20 * norm
            out.append((g, lin, aq, degenerate))
        self._geometry[bidx] = out
        return out

    def denominator_form(self, bidx: int, g: int) -> LinearForm:
        """den_g = t_g - 2 pi i c_g - sum_f (t_f - 2 pi i c_f) <g, f^B>."""
        for gg, lin, aq, _ in self.geometry(bidx):
            if gg == g:
                coeffs = {self.vars[g]: self.ring.one()}
                for m, c in lin.items():
                    coeffs[self.vars[m]] = self.to_scalar(-c)
                const = -(self.ring.two_pi_i() * self.to_scalar(aq))
                return LinearForm(coeffs, const)
        raise KeyError(g)

    def degenerate_multiplicity(self) -> int:
        """Number of distinct singular hyperplanes, counted with the maximum
        multiplicity any single summand carries (here always one each)."""
        seen = {}
        for bidx in range(len(self.arr.bases)):
            for g, lin, aq, degenerate in self.geometry(bidx):
                if degenerate:
                    form = self._constant_free_form(bidx, g, lin)
                    key = form.normalized(self.ring)[0].key(self.ring)
                    seen[key] = 1
        return sum(seen.values())

    def _constant_free_form(self, bidx: int, g: int,
                            lin: Dict[int, Fraction]) -> LinearForm:
        coeffs = {self.vars[g]: self.ring.one()}
        for m, c in lin.items():
            coeffs[self.vars[m]] = self.to_scalar(-c)
        return LinearForm(coeffs, self.ring.zero())


# ---------------------------------------------------------------------------
# full series assembly
# ---------------------------------------------------------------------------


@dataclass
class Summand:
    """One (basis, coset) term of the generating function."""

    bidx: int
    w: Tuple[int, ...]
    weight: Fraction
    unit_factors: List[Tuple[int, LinearForm]] = field(default_factory=list)
    degenerate_factors: List[Tuple[int, LinearForm]] = field(default_factory=list)

    def members(self, ctx) -> Tuple[int, ...]:
        return ctx.arr.bases[self.bidx].members


def build_summands(ctx: EvaluationContext) -> List[Summand]:
    out = []
    for bidx, b in enumerate(ctx.arr.bases):
        for w in b.coset_reps:
            s = Summand(bidx, w, Fraction(1, b.index))
            for g, lin, aq, degenerate in ctx.geometry(bidx):
                form = ctx.denominator_form(bidx, g)
                if degenerate:
                    cf = LinearForm(dict(form.coeffs), ctx.ring.zero())
                    s.degenerate_factors.append((g, cf))
                else:
                    s.unit_factors.append((g, form))
            out.append(s)
    return out


def summand_rational_form(ctx: EvaluationContext, s: Summand,
                          order: int) -> RationalForm:
    """Assemble the summand as numerator / (constant-free forms)."""
    ring = ctx.ring
    trunc = Truncation(order)
    num = TruncatedSeries.constant(ring, ctx.vars, trunc,
                                   ctx.to_scalar(s.weight))
    for m in ctx.arr.bases[s.bidx].members:
        num = num * ctx.kernel(s.bidx, s.w, m, order).extend(ctx.vars, trunc)
    for g, form in s.unit_factors:
        tg = TruncatedSeries.variable(ring, ctx.vars, trunc, ctx.vars[g])
        inv = form.as_series(ring, ctx.vars, trunc).invert_unit()
        num = num * tg * inv
    denoms = []
    for g, cf in s.degenerate_factors:
        tg = TruncatedSeries.variable(ring, ctx.vars, trunc, ctx.vars[g])
        num = num * tg
        denoms.append(cf)
    return RationalForm(num, denoms)


def generating_function(arr: Arrangement, y: Sequence, order: int,
                        mode: str = "exact", precision: int = 128,
                        phi: Optional[GenericDirection] = None,
                        workers: int = 1, check_excluded: bool = True,
                        ctx: Optional[EvaluationContext] = None
                        ) -> TruncatedSeries:
    """Taylor expansion of the generating function through total degree K."""
    ctx = ctx or EvaluationContext(arr, y, mode, precision, phi, workers)
    if check_excluded and on_excluded_hyperplanes(ctx.y, arr):
        if ctx.mode == "numeric":
            warnings.warn("y lies on (or within 1e-9 of) an excluded "
                          "translated hyperplane; values may be meaningless")
        else:
            raise ExcludedPoint(
                "y lies on an excluded translated hyperplane for an "
                "indispensable functional")
    cached = ctx._series.get(order)
    if cached is not None:
        return cached
    guard = ctx.degenerate_multiplicity()
    work = order + guard + 1 if guard else order
    summands = build_summands(ctx)

    def job(s):
        return summand_rational_form(ctx, s, work)

    if ctx.workers > 1:
        with ThreadPoolExecutor(max_workers=ctx.workers) as pool:
            forms = list(pool.map(job, summands))
    else:
        forms = [job(s) for s in summands]
    total = sum_rational_forms(forms)
    result = total.with_truncation(Truncation(order))
    ctx._series[order] = result
    return result


# ---------------------------------------------------------------------------
# single-coefficient extraction
# ---------------------------------------------------------------------------


def _component_partition(ctx: EvaluationContext, summands: List[Summand]):
    """Group summands by connected components of shared singular forms."""
    keys = []
    for s in summands:
        ks = set()
        for g, cf in s.degenerate_factors:
            ks.add(cf.normalized(ctx.ring)[0].key(ctx.ring))
        keys.append(ks)
    parent = list(range(len(summands)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    by_form: Dict[tuple, int] = {}
    for i, ks in enumerate(keys):
        for k in ks:
            if k in by_form:
                ra, rb = find(i), find(by_form[k])
                if ra != rb:
                    parent[ra] = rb
            else:
                by_form[k] = i
    groups: Dict[int, List[int]] = {}
    for i in range(len(summands)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _summand_coefficient_series(ctx: EvaluationContext, s: Summand,
                                k: WeightVector, live_vars: Tuple[str, ...],
                                order: int) -> Optional[TruncatedSeries]:
    """The summand reduced to `live_vars`: unit factors in dead variables are
    collapsed to their target Taylor coefficient -(a_g + U_g)^{-k_g}."""
    ring = ctx.ring
    trunc = Truncation(order)
    b = ctx.arr.bases[s.bidx]
    num = TruncatedSeries.constant(ring, live_vars, trunc,
                                   ctx.to_scalar(s.weight))
    for m in b.members:
        num = num * ctx.kernel(s.bidx, s.w, m, order).extend(live_vars, trunc)
    for g, form in s.unit_factors:
        if ctx.vars[g] in live_vars:
            tg = TruncatedSeries.variable(ring, live_vars, trunc, ctx.vars[g])
            inv = form.as_series(ring, live_vars, trunc).invert_unit()
            num = num * tg * inv
            continue
        kg = k.weights[g]
        if kg == 0:
            return None  # [t_g^0] (t_g * unit) = 0
        # [t_g^{k_g}] t_g/(t_g - c) = -c^{-k_g} with c = a_g + U_g(t_B)
        coeffs = {v: -c for v, c in form.coeffs.items() if v != ctx.vars[g]}
        c_series = LinearForm(coeffs, -form.constant) \
            .as_series(ring, live_vars, trunc)
        inv = c_series.invert_unit()
        pw = inv
        for _ in range(kg - 1):
            pw = pw * inv
        num = num * (-pw)
    for g, cf in s.degenerate_factors:
        tg = TruncatedSeries.variable(ring, live_vars, trunc, ctx.vars[g])
        num = num * tg
    return num


def coefficient(arr: Arrangement, y: Sequence, k,
                mode: str = "exact", precision: int = 128,
                phi: Optional[GenericDirection] = None, workers: int = 1,
                ctx: Optional[EvaluationContext] = None,
                check_excluded: bool = False):
    """C(k, y; arrangement): k! times the Taylor coefficient at exponent k."""
    k = k if isinstance(k, WeightVector) else WeightVector.make(k)
    if len(k.weights) != arr.size:
        raise ValueError("one weight per functional required")
    ctx = ctx or EvaluationContext(arr, y, mode, precision, phi, workers)
    if check_excluded and on_excluded_hyperplanes(ctx.y, arr):
        raise ExcludedPoint("y lies on an excluded translated hyperplane")
    cached = ctx._coeffs.get(k.weights)
    if cached is not None:
        return cached
    full = ctx._series.get(max(ctx._series)) if ctx._series else None
    if full is not None and full.trunc.total >= k.total:
        value = full.coefficient(_k_exps(ctx, k))
    else:
        value = _coefficient_components(ctx, k)
    fact = Fraction(1)
    for kf in k.weights:
        fact *= math.factorial(kf)
    value = value * ctx.to_scalar(fact)
    ctx._coeffs[k.weights] = value
    return value


def _k_exps(ctx, k: WeightVector) -> Tuple[int, ...]:
    return tuple(k.weights[i] for i in range(ctx.arr.size))


def _coefficient_components(ctx: EvaluationContext, k: WeightVector):
    summands = build_summands(ctx)
    components = _component_partition(ctx, summands)

    def job(idxs):
        return _component_value(ctx, [summands[i] for i in idxs], k)

    if ctx.workers > 1:
        with ThreadPoolExecutor(max_workers=ctx.workers) as pool:
            vals = list(pool.map(job, components))
    else:
        vals = [job(idxs) for idxs in components]
    total = ctx.ring.zero()
    for v in vals:
        total = total + v
    return total


def _component_value(ctx: EvaluationContext, summands: List[Summand],
                     k: WeightVector):
    ring = ctx.ring
    live = set()
    divisions = {}
    for s in summands:
        for m in ctx.arr.bases[s.bidx].members:
            live.add(ctx.vars[m])
        for g, cf in s.degenerate_factors:
            live.add(ctx.vars[g])
            for v in cf.coeffs:
                live.add(v)
            divisions[cf.normalized(ring)[0].key(ring)] = 1
    live_vars = tuple(sorted(live, key=lambda v: ctx.vars.index(v)))
    target = {v: k.weights[ctx.vars.index(v)] for v in live_vars}
    order = sum(target.values()) + sum(divisions.values())
    forms = []
    for s in summands:
        num = _summand_coefficient_series(ctx, s, k, live_vars, order)
        if num is None:
            continue
        denoms = [cf for _, cf in s.degenerate_factors]
        forms.append(RationalForm(num, denoms))
    if not forms:
        return ring.zero()
    total = sum_rational_forms(forms)
    return total.coefficient(tuple(target[v] for v in live_vars))


# ---------------------------------------------------------------------------
# special values
# ---------------------------------------------------------------------------


def weight_prefactor(ring, k: WeightVector):
    """prod_f -(2 pi i)^{k_f} / k_f!."""
    out = ring.from_fraction(Fraction((-1) ** len(k.weights)))
    tpi = ring.two_pi_i()
    for kf in k.weights:
        out = out * tpi**kf * ring.from_fraction(
            Fraction(1, math.factorial(kf)))
    return out


def lattice_sum_value(arr: Arrangement, y: Sequence, k,
                      mode: str = "exact", precision: int = 128,
                      phi: Optional[GenericDirection] = None,
                      workers: int = 1,
                      ctx: Optional[EvaluationContext] = None
                      ) -> EvaluationReport:
    """The special value S(k, y; arrangement), with evaluation metadata."""
    t0 = time.perf_counter()
    k = k if isinstance(k, WeightVector) else WeightVector.make(k)
    ctx = ctx or EvaluationContext(arr, y, mode, precision, phi, workers)
    ones = set(k.one_set())
    bad = [i for i in arr.indispensable if i in ones]
    if bad and on_excluded_hyperplanes(ctx.y, arr, subset=bad):
        for i in bad:
            if not on_excluded_hyperplanes(ctx.y, arr, subset=[i]):
                continue
            message = (f"y lies on an excluded translated hyperplane for "
                       f"functional {i} (weight 1): the sum does not "
                       f"converge there")
            if ctx.mode == "numeric":
                warnings.warn(message)
                break
            raise ExcludedPoint(
                message, functional=i,
                hyperplane=f"span of directions other than #{i} + Z^r")
    c_val = coefficient(arr, ctx.y, k, ctx=ctx)
    value = weight_prefactor(ctx.ring, k) * c_val
    dt = (time.perf_counter() - t0) * 1000
    return EvaluationReport(
        value=value,
        series_order=k.total,
        basis_count=len(arr.bases),
        degenerate_divisions=ctx.degenerate_multiplicity(),
        mode=ctx.mode,
        n_cyclotomic=ctx.N,
        timing_ms=dt,
    )


# -- documented symmetric families ------------------------------------------


def documented_family(arr: Arrangement) -> Optional[str]:
    """Recognize the shipped symmetric families by structure."""
    dirs = [f.direction for f in arr.functionals]
    consts = [f.constant for f in arr.functionals]
    if arr.rank == 1 and arr.size == 3:
        # directions (-1), (1), (1); constants (a, 0, a) with a != 0
        if sorted(d[0] for d in dirs) == [-1, 1, 1]:
            neg = [consts[i] for i, d in enumerate(dirs) if d[0] == -1]
            pos = [consts[i] for i, d in enumerate(dirs) if d[0] == 1]
            if len(neg) == 1 and sorted(map(str, pos)) == sorted(
                    map(str, [neg[0], Fraction(0)])) and neg[0] != 0:
                return "hurwitz-a1"
    if arr.rank == 2 and arr.size == 9:
        groups: Dict[tuple, list] = {}
        for d, c in zip(dirs, consts):
            canon = d if d > tuple(-x for x in d) else tuple(-x for x in d)
            groups.setdefault(canon, []).append((d, c))
        if set(groups) == {(1, 0), (0, 1), (1, 1)} and \
                all(len(v) == 3 for v in groups.values()):
            alphas = set()
            ok = True
            for canon, items in groups.items():
                nonzero = [c for _, c in items if c != 0]
                zero = [c for _, c in items if c == 0]
                if len(zero) != 1 or len(set(map(str, nonzero))) != 1:
                    ok = False
                    break
                alphas.add(str(nonzero[0]))
            if ok and len(alphas) == 1:
                return "hurwitz-a2"
    if arr.rank == 2 and arr.size == 3:
        if sorted(dirs) == [(0, 1), (1, 0), (1, 1)] and \
                all(c == 0 for c in consts):
            return "a2-directions"
    return None


def zeta_from_S(arr: Arrangement, k, symmetry_factor: int,
                mode: str = "exact", precision: int = 128,
                ctx: Optional[EvaluationContext] = None):
    """S divided by the documented symmetry factor (2 for the rank-one
    family, 6 for the rank-two ones); rejects undocumented shapes."""
    k = k if isinstance(k, WeightVector) else WeightVector.make(k)
    family = documented_family(arr)
    if family is None:
        raise ValueError("arrangement is not one of the documented "
                         "symmetric families")
    expected = 2 if family == "hurwitz-a1" else 6
    if symmetry_factor != expected:
        raise ValueError(f"family {family} has symmetry factor {expected}")
    kw = set(k.weights)
    if len(kw) != 1 or next(iter(kw)) % 2 != 0 or next(iter(kw)) == 0:
        raise ValueError("documented families require equal even weights")
    y0 = tuple(Fraction(0) for _ in range(arr.rank))
    rep = lattice_sum_value(arr, y0, k, mode=mode, precision=precision,
                            ctx=ctx)
    value = rep.value * (Fraction(1, symmetry_factor) if mode == "exact"
                         else 1.0 / symmetry_factor)
    return value
