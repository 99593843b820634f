"""Exception types shared across the package."""


class LatticeSumError(Exception):
    """Base class for all package errors."""


class ExcludedPoint(LatticeSumError):
    """The evaluation point lies on an excluded translated hyperplane.

    Carries the offending functional id and a description of the hyperplane
    so callers can report the precise non-convergence locus.
    """

    def __init__(self, message, functional=None, hyperplane=None):
        super().__init__(message)
        self.functional = functional
        self.hyperplane = hyperplane


class NonDivisible(LatticeSumError):
    """Exact division of a truncated series by a linear form left a residue.

    In exact mode this signals a bug or an arrangement violating the
    holomorphy of the assembled generating function.  ``residual`` holds the
    offending terms.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotSimple(LatticeSumError):
    """A polytope expected to be simple has a vertex on too many hyperplanes."""


class RankDrop(LatticeSumError):
    """A sub-arrangement no longer spans the ambient space."""


class DegenerateExponent(LatticeSumError):
    """An exponent vector annihilates an edge direction of a polytope."""
