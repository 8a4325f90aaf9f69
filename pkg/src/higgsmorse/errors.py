"""Error classes shared by the library and mapped to CLI exit codes."""


class HiggsError(Exception):
    exit_code = 1


class ValidationError(HiggsError, ValueError):
    """Bad input: a precondition of an operation does not hold."""
    exit_code = 2


class NumericalError(HiggsError, ArithmeticError):
    """A flow run lost positive-definiteness or its step size underflowed."""
    exit_code = 3


class ConsistencyError(HiggsError, AssertionError):
    """Two independent computations of the same quantity disagree."""
    exit_code = 4
