from __future__ import annotations


class EntropicError(Exception):
    """Base class for every error raised by the library."""


class InvalidPoint(EntropicError):
    pass


class InvalidLevel(EntropicError):
    pass


class InvalidIndex(EntropicError):
    pass


class DimError(EntropicError):
    pass


class InvalidM(EntropicError):
    pass


class InvalidData(EntropicError):
    pass


class DegenerateData(EntropicError):
    pass


class ConvergenceError(EntropicError):
    def __init__(self, message: str, grad_norm: float, iterations: int):
        super().__init__(f"{message} (grad_norm={grad_norm:.3e}, iterations={iterations})")
        self.grad_norm = grad_norm
        self.iterations = iterations


class ParseError(EntropicError):
    def __init__(self, message: str, row: int | None = None, column: str | int | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        suffix = f" at {', '.join(where)}" if where else ""
        super().__init__(f"{message}{suffix}")
        self.row = row
        self.column = column
