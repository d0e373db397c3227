"""Exception types shared across the package.

Two broad families matter to callers: validation failures (malformed or
inconsistent inputs, rejected before any computation) and numeric failures
(a computation that started but cannot produce a meaningful value).  The
command line maps the first family to exit code 2 and the second to 3.
"""

from __future__ import annotations

__all__ = [
    "PovmLabError",
    "ValidationError",
    "DimensionMismatch",
    "NotPositive",
    "Overcomplete",
    "NonCommuting",
    "NodeMismatch",
    "ZeroDenominator",
    "StabilityViolation",
    "UnresolvableScale",
    "GeometryOutOfDomain",
    "EmptyWindow",
    "InvalidAmplitudes",
    "IoFailure",
    "NUMERIC_ERRORS",
]


class PovmLabError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(PovmLabError):
    """An input failed a structural or mathematical precondition."""


class DimensionMismatch(ValidationError):
    """Operands live on spaces of incompatible dimension."""


class NotPositive(ValidationError):
    """An operator expected to be positive semidefinite is not."""


class Overcomplete(ValidationError):
    """Effects sum to more than the identity."""


class NonCommuting(PovmLabError):
    """A product of observables was requested but the factors do not commute.

    Carries the pair of outcome or node labels whose effects fail the
    commutativity gate, plus the offending commutator norm.
    """

    def __init__(self, first, second, norm: float, message: str | None = None):
        self.first = first
        self.second = second
        self.norm = float(norm)
        if message is None:
            message = (
                f"effects for {first!r} and {second!r} do not commute "
                f"(commutator norm {self.norm:.3e})"
            )
        super().__init__(message)


class NodeMismatch(ValidationError):
    """Causal maps were chained across nodes that do not line up."""


class ZeroDenominator(PovmLabError):
    """A conditional value has a vanishing normalizing denominator."""


class StabilityViolation(PovmLabError):
    """Time step rejected by the propagator."""


class UnresolvableScale(ValidationError):
    """Packet width or wavenumber cannot be represented on the grid."""


class GeometryOutOfDomain(ValidationError):
    """Slit geometry or detector layout falls outside the grid."""


class EmptyWindow(ValidationError):
    """A detector window contains no usable bins."""


class InvalidAmplitudes(ValidationError):
    """Branch amplitudes do not form a unit vector."""


class IoFailure(PovmLabError):
    """Reading or writing a result file failed."""


# Families the CLI maps to exit code 3; everything else exits 2.
NUMERIC_ERRORS = (StabilityViolation, ZeroDenominator)
