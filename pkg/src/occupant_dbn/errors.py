"""Exception hierarchy shared by all modules."""


class OccupantDbnError(Exception):
    """Base class for every error raised by the package."""


# -- network construction -------------------------------------------------


class NetworkError(OccupantDbnError, ValueError):
    """Invalid network definition."""


class CycleError(NetworkError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle in network: " + " -> ".join(self.cycle))


class UnknownParentError(NetworkError):
    pass


class CptShapeError(NetworkError):
    pass


class NormalizationError(NetworkError):
    pass


class DomainError(NetworkError):
    pass


# -- inference ------------------------------------------------------------


class InferenceError(OccupantDbnError, ValueError):
    pass


class IncompleteAssignmentError(InferenceError):
    pass


class UnknownLabelError(InferenceError):
    pass


class UnknownNodeError(InferenceError):
    pass


class ZeroEvidenceError(InferenceError):
    """The evidence has probability zero, so the posterior is undefined."""

    def __init__(self, message, slot=None):
        self.slot = slot
        super().__init__(message if slot is None else f"slot {slot}: {message}")


class TooLargeError(InferenceError):
    pass


class NegativeCountError(InferenceError):
    pass


class EvidenceConflictError(InferenceError):
    pass


# -- physics --------------------------------------------------------------


class PhysicsError(OccupantDbnError, ValueError):
    pass


class InvalidRatioError(PhysicsError):
    pass


class NonPositiveVolumeError(PhysicsError):
    pass


class NegativeDtError(PhysicsError):
    pass


# -- co-simulation --------------------------------------------------------


class UnmappedLabelError(OccupantDbnError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""


class InvalidRunCountError(OccupantDbnError, ValueError):
    pass


# -- scenario files -------------------------------------------------------


class ScenarioError(OccupantDbnError):
    pass


class ParseError(ScenarioError):
    pass


class ValidationError(ScenarioError):
    """Malformed scenario content; ``path`` locates the offending element."""

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")
