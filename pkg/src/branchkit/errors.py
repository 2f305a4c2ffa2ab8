"""Exception hierarchy shared by all branchkit modules."""


class BranchkitError(Exception):
    """Base class for every error raised by this package."""


class StateInvariantError(BranchkitError):
    """A ket, density matrix, or unitary failed its construction invariants."""


class CapacityError(BranchkitError):
    """A requested construction exceeds the configured maximum dimension."""


class LayoutError(BranchkitError):
    """Subsystem labels or dimensions are inconsistent with a state."""


class PartitionError(BranchkitError):
    """A macrostate partition is incomplete, non-orthogonal, or non-projective."""


class ParameterError(BranchkitError):
    """A scalar parameter is outside its admissible range."""


class ConstructionError(BranchkitError):
    """A requested operator cannot be built from the given states."""


class DegenerateTableError(BranchkitError):
    """Two set-up columns coincide on every display, so branches are not distinct."""


class UnsupportedWeightsError(BranchkitError):
    """Outcome weights are not positive rationals with a bounded common denominator."""


class InsufficientSetupsError(BranchkitError):
    """The credence constraint system is underdetermined."""

    def __init__(self, message: str, unconstrained: tuple[str, ...] = ()):
        super().__init__(message)
        self.unconstrained = unconstrained


class ContradictionError(BranchkitError):
    """The credence constraint system is inconsistent."""

    def __init__(self, message: str, chains: tuple[str, ...] = ()):
        super().__init__(message)
        self.chains = chains


class SupportViolationError(BranchkitError):
    """A remote operation touches factors reserved for the local station."""


class InfeasibilityError(BranchkitError):
    """No unitary pair can map the two states to a common state."""


class DomainError(BranchkitError):
    """A mapping (e.g. a utility function) is missing a required key."""


class ScenarioFormatError(BranchkitError):
    """A scenario file failed schema validation.

    ``location`` names the offending field (dotted path) or line.
    """

    def __init__(self, message: str, location: str = ""):
        super().__init__(message if not location else f"{location}: {message}")
        self.location = location
