"""Exception types shared across the package."""


class CyclicPHError(Exception):
    """Base class for all errors raised by cyclic_ph."""


class InvalidStep(CyclicPHError, ValueError):
    """A filtration step would break one of the cyclic-graph invariants."""

    def __init__(self, message, step_index=None):
        self.step_index = step_index
        if step_index is not None:
            message = f"step {step_index}: {message}"
        super().__init__(message)


class InvalidFiltration(InvalidStep):
    """A filtration could not be replayed from its initial graph."""


class DomainError(CyclicPHError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class NotConvexPosition(CyclicPHError, ValueError):
    """Planar points are not the vertices of a strictly convex polygon."""

    def __init__(self, message, index=None):
        self.index = index
        super().__init__(message)


class NotCyclicError(CyclicPHError, ValueError):
    """Adding the next Rips edge does not yield a cyclic graph."""

    def __init__(self, message, pair=None, scale=None):
        self.pair = pair
        self.scale = scale
        super().__init__(message)


class CapExceeded(CyclicPHError, ValueError):
    """The brute-force oracle was asked to handle too many vertices."""


class InputError(CyclicPHError, ValueError):
    """Malformed input file; carries the 1-based line and column when known."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
