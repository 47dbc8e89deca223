"""Exception hierarchy shared by every netident module."""


class NetidentError(Exception):
    """Base class for all errors raised by netident."""


class InvalidGraph(NetidentError):
    """The edge list does not describe a valid network topology."""


class CycleDetected(InvalidGraph):
    """The graph contains a directed cycle."""

    def __init__(self, cycle_nodes):
        self.cycle_nodes = tuple(cycle_nodes)
        super().__init__(f"directed cycle through nodes {list(self.cycle_nodes)}")


class UnknownNode(NetidentError, KeyError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"unknown node {node!r}")

    def __str__(self):
        return self.args[0]


class FunctionSetMismatch(NetidentError):
    """Function keys do not cover exactly the edge set."""


class EvaluationOverflow(NetidentError, ArithmeticError):
    """A network evaluation produced a non-finite value."""


class GenericityUndetermined(NetidentError):
    """Every probe point overflowed, so no rank evidence was collected."""


class InversionUnsupported(NetidentError):
    """The edge function is not a pure odd monomial and cannot be inverted."""


class PatternRejected(NetidentError):
    """An identification pattern does not meet an operation's precondition."""


class PatternSpaceTooLarge(NetidentError):
    """Pattern enumeration was requested on a graph that is too large."""


class WitnessRefused(NetidentError):
    """A witness constructor's precondition does not hold."""
