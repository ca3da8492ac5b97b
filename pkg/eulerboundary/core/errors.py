"""
Exception hierarchy for eulerboundary
"""


class EulerBoundaryError(Exception):
    """Base class for all eulerboundary errors"""


class ParameterError(EulerBoundaryError, ValueError):
    """A parameter lies outside the range an operation accepts"""


class AdjacencyError(ParameterError):
    """Two vertices of the Eulerian graph are not joined by an edge"""


class EnumerationSizeError(ParameterError):
    """Brute-force enumeration requested above the configured bound"""


class PermutationError(ParameterError):
    """Input is not a permutation of 1..n"""


class PathError(ParameterError):
    """Malformed labeled path"""


class InputFormatError(ParameterError):
    """Unparseable array file, rational literal or boundary parameter spec"""


class RankError(EulerBoundaryError, ArithmeticError):
    """Singular linear system in an exact decomposition"""
