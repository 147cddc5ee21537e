"""Exception hierarchy for seqswarm."""


class SeqSwarmError(Exception):
    pass


class GraphError(SeqSwarmError, ValueError):
    """Raised when a graph document or StateGraph fails validation."""


class MalformedDocument(GraphError):
    pass


class DanglingEdge(GraphError):
    pass


class UnreachableNode(GraphError):
    pass


class NoExitReachable(GraphError):
    pass


class EmptyGraph(GraphError):
    pass


class DeadEndAbort(SeqSwarmError):
    """A walk got stuck: every successor of a non-exit node was already visited."""


class GraphTooLarge(SeqSwarmError):
    pass


class ZeroPriority(SeqSwarmError, ArithmeticError):
    pass


class EmptyArchive(SeqSwarmError, LookupError):
    pass


class UnsupportedFormat(SeqSwarmError, ValueError):
    pass


class ConfigError(SeqSwarmError, ValueError):
    pass
