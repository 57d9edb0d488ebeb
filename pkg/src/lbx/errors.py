"""Exception hierarchy shared across the package."""


class LbxError(Exception):
    """Base class for every error raised by lbx."""


class GraphError(LbxError):
    pass


class ValidationError(GraphError):
    """A graph violates its model rules. ``violations`` lists every problem found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid graph")


class ImproperColoring(ValidationError):
    pass


class DuplicateIdentifier(ValidationError):
    pass


class MissingOrder(ValidationError):
    pass


class UnknownNode(GraphError):
    pass


class ParseError(GraphError):
    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class NotATree(GraphError):
    pass


class Disconnected(GraphError):
    pass


class NotALoop(GraphError):
    pass


class ColorMismatch(GraphError):
    pass


class InfeasibleLift(GraphError):
    pass


class ModelMismatch(LbxError):
    pass


class ViewTooShallow(LbxError):
    pass


class InvalidOutput(LbxError):
    pass


class InconsistentOutputs(LbxError):
    def __init__(self, eid, weights):
        self.eid = eid
        self.weights = weights
        super().__init__(f"endpoints of edge {eid} report different weights {weights}")


class NoContinuation(LbxError):
    def __init__(self, node, reason):
        self.node = node
        super().__init__(f"propagation stuck at node {node}: {reason}")


class NotTruncatable(LbxError):
    pass


class UnknownAlgorithm(LbxError):
    pass


class PaletteTooSmall(LbxError):
    pass


class GuardrailExceeded(LbxError):
    pass


class InsufficientIdentifiers(LbxError):
    pass


class InternalInvariantBroken(LbxError):
    pass
