"""Brute-force partial sums of the defining lattice series.

This module is the ground truth the closed-form evaluators are checked
against, so it stays definitionally transparent: sum the terms
e^{2 pi i <y, v>} / prod f(v)^{k_f} over the integer points of an expanding
symmetric box, with the zero-weight functionals turned into exact linear
constraints on the summation sublattice and a (-1) sign each.  No
acceleration or resummation tricks.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from mpmath.ctx_mp import MPContext

from . import intlinalg
from .genfun import WeightVector
from .lattice import Arrangement, Basis, GaussianRational

@dataclass(frozen=True)
class TruncationWindow:
    """Box half-width N; either the coordinate box |v_j| <= N or the
    parallelotope |Re f(v)| <= N over a fixed basis."""

    N: int
    shape: str = "box"
    basis: Optional[Basis] = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("window size must be >= 1")
        if self.shape not in ("box", "basis_box"):
            raise ValueError("shape must be 'box' or 'basis_box'")
        if self.shape == "basis_box" and self.basis is None:
            raise ValueError("basis_box window needs a basis")


def _zero_constraints(arr: Arrangement, k: WeightVector):
    """Rows/rhs of the integral system f(v) = 0 for zero-weight functionals.

    Returns None when the system has no integer solutions (e.g. a
    non-integral constant), which empties the sum.
    """
    rows, rhs = [], []
    for i in k.zero_set():
        f = arr.functionals[i]
        c = f.constant
        if isinstance(c, Fraction):
            if c.denominator != 1:
                return None
            rhs.append(-int(c))
        elif isinstance(c, GaussianRational):
            if c.im != 0 or c.re.denominator != 1:
                return None
            rhs.append(-int(c.re))
        else:
            if c.imag != 0 or abs(c.real - round(c.real)) > 1e-12:
                warnings.warn("non-rational constant in a zero-weight "
                              "functional: the constrained sublattice is "
                              "empty by fiat")
                return None
            rhs.append(-int(round(c.real)))
        rows.append(list(f.direction))
    return rows, rhs


def _in_window(arr: Arrangement, v: Sequence[int],
               window: TruncationWindow) -> bool:
    if window.shape == "box":
        return all(abs(x) <= window.N for x in v)
    for m in window.basis.members:
        f = arr.functionals[m]
        val = sum(d * x for d, x in zip(f.direction, v)) \
            + float(f.constant_complex().real)
        if abs(val) > window.N:
            return False
    return True


def _window_bounding_box(arr: Arrangement, window: TruncationWindow) -> int:
    if window.shape == "box":
        return window.N
    rows = [list(arr.functionals[m].direction) for m in window.basis.members]
    inv = intlinalg.mat_inverse(rows)
    bound = 0
    for j in range(arr.rank):
        s = sum(abs(inv[j][i]) * (window.N
                                  + abs(arr.functionals[m].constant_complex()))
                for i, m in enumerate(window.basis.members))
        bound = max(bound, int(math.ceil(float(s))) + 1)
    return bound


def constrained_points(arr: Arrangement, k: WeightVector,
                       window: TruncationWindow) -> Iterator[Tuple[int, ...]]:
    """Integer points of the window with f(v) = 0 on the zero-weight set and
    f(v) != 0 on the positive-weight set, in lexicographic order."""
    k = k if isinstance(k, WeightVector) else WeightVector.make(k)
    constraints = _zero_constraints(arr, k)
    if constraints is None:
        return
    rows, rhs = constraints
    bound = _window_bounding_box(arr, window)
    positive = [arr.functionals[i] for i in k.positive_set()]

    def admissible(v) -> bool:
        if not _in_window(arr, v, window):
            return False
        for f in positive:
            val = f.evaluate_int(v)
            if isinstance(val, Fraction):
                if val == 0:
                    return False
            elif isinstance(val, GaussianRational):
                if val.re == 0 and val.im == 0:
                    return False
            else:
                if abs(val) < 1e-12:
                    return False
        return True

    if not rows:
        for v in itertools.product(range(-bound, bound + 1),
                                   repeat=arr.rank):
            if admissible(v):
                yield v
        return
    solved = intlinalg.solve_integer(rows, rhs)
    if solved is None:
        return
    x0, kernel = solved
    if not kernel:
        if admissible(tuple(x0)):
            yield tuple(x0)
        return
    # bound the kernel coefficients from an invertible coordinate subset
    d = len(kernel)
    kmat = [[kern[j] for kern in kernel] for j in range(arr.rank)]  # r x d
    rowsel = None
    for combo in itertools.combinations(range(arr.rank), d):
        sub = [kmat[j] for j in combo]
        if intlinalg.det(sub) != 0:
            rowsel = (combo, intlinalg.mat_inverse(sub))
            break
    combo, inv = rowsel
    bounds = []
    for i in range(d):
        s = sum(abs(inv[i][t]) * (bound + abs(x0[combo[t]]))
                for t in range(d))
        bounds.append(int(math.ceil(float(s))) + 1)
    pts = []
    for coeffs in itertools.product(*[range(-b, b + 1) for b in bounds]):
        v = tuple(x0[j] + sum(coeffs[i] * kernel[i][j] for i in range(d))
                  for j in range(arr.rank))
        if admissible(v):
            pts.append(v)
    yield from sorted(pts)


def truncated_sum(arr: Arrangement, k, y: Sequence,
                  window: TruncationWindow, precision: int = 53):
    """The raw box-truncated sum Z(N), with the (-1)^(#zero-weight) sign.

    Terms are accumulated in deterministic lexicographic order with
    compensated summation.  precision <= 53 uses the vectorized float path;
    higher precisions run through mpmath.
    """
    k = k if isinstance(k, WeightVector) else WeightVector.make(k)
    sign = (-1) ** len(k.zero_set())
    if not k.zero_set() and precision <= 53 and arr.rank == 2:
        return sign * _sum_vectorized(arr, k, y, window)
    return sign * _sum_pointwise(arr, k, y, window, precision)


def _sum_pointwise(arr, k, y, window, precision):
    ctx = MPContext()
    ctx.prec = max(precision, 53) + 24
    total = ctx.mpc(0)
    comp = ctx.mpc(0)  # Neumaier compensation
    yf = [ctx.mpf(v.numerator) / ctx.mpf(v.denominator)
          if isinstance(v, Fraction) else ctx.mpf(v) for v in y]
    positive = [(arr.functionals[i], k.weights[i]) for i in k.positive_set()]
    for v in constrained_points(arr, k, window):
        phase = ctx.expjpi(2 * sum(a * b for a, b in zip(yf, v)))
        den = ctx.mpc(1)
        for f, kf in positive:
            val = sum(d * x for d, x in zip(f.direction, v)) \
                + ctx.mpc(f.constant_complex())
            den *= val**kf
        term = phase / den
        # Neumaier step
        t = total + term
        if abs(total) >= abs(term):
            comp += (total - t) + term
        else:
            comp += (term - t) + total
        total = t
    return total + comp


def _sum_vectorized(arr, k, y, window) -> complex:
    N = window.N
    yf = [float(v) for v in y]
    positive = [(arr.functionals[i], k.weights[i]) for i in k.positive_set()]
    bound = _window_bounding_box(arr, window)
    if arr.rank == 1:
        v = np.arange(-bound, bound + 1, dtype=np.float64)
        mask = _window_mask_1d(arr, window, v)
        den = np.ones_like(v, dtype=np.complex128)
        for f, kf in positive:
            val = f.direction[0] * v + complex(f.constant_complex())
            mask &= np.abs(val) > 1e-12
            den *= np.where(mask, val, 1.0)**kf
        num = np.exp(2j * np.pi * yf[0] * v)
        terms = np.where(mask, num / den, 0.0)
        return complex(math.fsum(terms.real), math.fsum(terms.imag))
    v2 = np.arange(-bound, bound + 1, dtype=np.float64)
    re_parts: List[float] = []
    im_parts: List[float] = []
    for v1 in range(-bound, bound + 1):
        mask = _window_mask_2d(arr, window, v1, v2)
        den = np.ones_like(v2, dtype=np.complex128)
        for f, kf in positive:
            val = f.direction[0] * v1 + f.direction[1] * v2 \
                + complex(f.constant_complex())
            mask &= np.abs(val) > 1e-12
            den *= np.where(mask, val, 1.0)**kf
        num = np.exp(2j * np.pi * (yf[0] * v1 + yf[1] * v2))
        terms = np.where(mask, num / den, 0.0)
        re_parts.append(float(np.sum(terms.real)))
        im_parts.append(float(np.sum(terms.imag)))
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def _window_mask_1d(arr, window, v):
    if window.shape == "box":
        return np.abs(v) <= window.N
    mask = np.ones_like(v, dtype=bool)
    for m in window.basis.members:
        f = arr.functionals[m]
        val = f.direction[0] * v + float(f.constant_complex().real)
        mask &= np.abs(val) <= window.N
    return mask


def _window_mask_2d(arr, window, v1, v2):
    if window.shape == "box":
        return (np.abs(v2) <= window.N) & (abs(v1) <= window.N)
    mask = np.ones_like(v2, dtype=bool)
    for m in window.basis.members:
        f = arr.functionals[m]
        val = f.direction[0] * v1 + f.direction[1] * v2 \
            + float(f.constant_complex().real)
        mask &= np.abs(val) <= window.N
    return mask


def convergence_scan(arr: Arrangement, k, y: Sequence, Ns: Sequence[int],
                     precision: int = 53, target=None,
                     shape: str = "box", basis: Optional[Basis] = None
                     ) -> List[dict]:
    """Successive-difference table of Z(N) over increasing window sizes.

    `target` may be an exact scalar (embedded at working precision) or a
    complex number; differences are taken at working precision so that
    sub-double errors stay resolvable.
    """
    Ns = list(Ns)
    if any(b >= a for a, b in zip(Ns[1:], Ns)):
        raise ValueError("window sizes must be increasing")
    ctx = MPContext()
    ctx.prec = max(precision, 53) + 24
    tval = None
    if target is not None:
        tval = target.embed(ctx) if hasattr(target, "embed") \
            else ctx.mpc(complex(target))
    rows = []
    prev = None
    for N in Ns:
        z = truncated_sum(arr, k, y, TruncationWindow(N, shape, basis),
                          precision)
        z = ctx.mpc(z)
        row = {"N": N, "re": float(z.real), "im": float(z.imag)}
        row["diff_prev"] = float(abs(z - prev)) if prev is not None else None
        if tval is not None:
            row["err"] = float(abs(z - tval))
        rows.append(row)
        prev = z
    return rows
