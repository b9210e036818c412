"""Exception hierarchy for the flip-graph engine."""


class FlipGraphError(ValueError):
    """Base class for every error raised by this package."""


# construction / validation
class LabelUsedMoreThanTwice(FlipGraphError):
    pass


class NonOrientableGluing(FlipGraphError):
    pass


class Disconnected(FlipGraphError):
    pass


class InfiniteCornerOrbit(FlipGraphError):
    pass


class InfiniteInput(FlipGraphError):
    pass


class NTooSmall(FlipGraphError):
    pass


class UnknownEdge(FlipGraphError, KeyError):
    def __str__(self):
        return ValueError.__str__(self)


# arcs
class Unrealizable(FlipGraphError):
    pass


class NotReduced(FlipGraphError):
    pass


class NotDisjoint(FlipGraphError):
    pass


# flips
class InvalidMove(FlipGraphError):
    pass


class NotFlippable(InvalidMove):
    pass


class QuadrilateralsOverlap(InvalidMove):
    pass


class IncompatibleSurfaces(FlipGraphError):
    pass


class ExceedsCutoff(FlipGraphError):
    pass


class Stuck(FlipGraphError):
    pass


# combing / connectivity
class UnboundedIntersection(FlipGraphError):
    pass


class NotAdjacent(FlipGraphError):
    pass


class BoundViolated(FlipGraphError):
    pass


# infinite models
class UnsupportedDescriptor(FlipGraphError):
    pass


class WindowTooSmall(FlipGraphError):
    pass


class InterfaceMismatch(FlipGraphError):
    pass


class TriSyntaxError(FlipGraphError, SyntaxError):
    """Parse error carrying a 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        SyntaxError.__init__(self, where + message)
        self.line = self.lineno = line
        self.column = self.offset = column

    def __str__(self):
        return self.msg
