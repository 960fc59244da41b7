"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all domain errors raised by stratkit."""


class DegreeError(ToolkitError):
    """Polynomial degree does not match the expected value."""


class DegenerateError(ToolkitError):
    """A quantity that must be nonzero (e.g. a multiplicity) vanished."""


class DimensionError(ToolkitError):
    """Vectors or matrices of incompatible dimensions were mixed."""


class CapacityError(ToolkitError):
    """An exhaustive enumeration would exceed the configured cap."""


class NotInYError(ToolkitError):
    """The support point does not lie in the attracting set of the index."""


class PerturbationTooLargeError(ToolkitError):
    """A weight perturbation exceeds the certified refinement radius."""


class InvalidQuotPointError(ToolkitError):
    """Filtration data violates a structural invariant."""


class TwistTooSmallError(ToolkitError):
    """A Hilbert polynomial evaluated nonpositive at the chosen twist."""


class ProfileError(ToolkitError):
    """Sheaf profile layers violate the filtration ordering."""


class ShapeError(ToolkitError):
    """Mismatched number of filtration steps / stability parameters."""


class NotSLError(ToolkitError):
    """Integer weights do not satisfy the trace-zero constraint."""


class NotAdaptedError(ToolkitError):
    """The candidate destabilizing filtration is not weight-ordered."""
