"""Shared exception types."""


class QuantcspError(Exception):
    """Base class for all library errors."""


class MismatchError(QuantcspError):
    """Composition or comparison of arrows/morphisms with incompatible shapes."""


class SizeExceeded(QuantcspError):
    """A materialisation or iteration would exceed its guard limit.

    Callers catching this should fall back to a lazy evaluation path.
    """

    def __init__(self, size, limit):
        super().__init__(f"size {size} exceeds guard limit {limit}")
        self.size = size
        self.limit = limit


class FormatError(QuantcspError):
    """Malformed input file (DIMACS, graph, LP or JSON)."""

    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
        self.line = line
        self.field = field


class NoPreimage(QuantcspError):
    """A crisp relation is not a sublevel set of any relation in the given family."""
