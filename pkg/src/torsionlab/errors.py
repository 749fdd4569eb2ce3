"""Shared error taxonomy.

Every domain error raised by this package derives from TorsionLabError so the
CLI can map "domain error" to exit code 1 while genuine usage errors stay on
the argparse path (exit code 2).
"""


class TorsionLabError(Exception):
    """Base class for all domain errors raised by torsion-lab."""


class NonzeroRemainder(TorsionLabError):
    """Exact polynomial division left a remainder."""


class NotPrime(TorsionLabError):
    """A compositeness witness was found for a claimed prime modulus."""


class SingularCurve(TorsionLabError):
    """4A^3 + 27B^2 = 0."""


class PointNotOnCurve(TorsionLabError):
    """Affine coordinates do not satisfy the curve equation."""


class ZeroTwist(TorsionLabError):
    """Quadratic twist by D = 0 requested."""


class OrderMismatch(TorsionLabError):
    """A pairing argument is not m-torsion."""


class FieldTooSmall(TorsionLabError):
    """The ambient field lacks a required element (root of unity, sqrt)."""


class BoundExceeded(TorsionLabError):
    """A configured enumeration or torsion bound was exceeded."""


class InexactAssembly(TorsionLabError):
    """Moebius assembly of a primitive division polynomial failed exactness checks."""


class ConditionPNotSatisfied(TorsionLabError):
    """twist_classes called on a curve that does not satisfy the split/root condition."""


class UnsupportedPair(TorsionLabError):
    """(m, n) outside the built-in family table."""


class SingularSpecialization(TorsionLabError):
    """A family specialization landed outside the nonsingular locus."""


class ZeroU(TorsionLabError):
    """Family specialization with u = 0."""


class ParseError(TorsionLabError):
    """Malformed textual input (polynomial, scalar, or registry document)."""


class InsufficientData(TorsionLabError):
    """Not enough rows/points for the requested statistic."""
