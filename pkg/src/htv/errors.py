"""Exception types shared across the package.

The split mirrors how failures surface at the command line: malformed
files, violated structural invariants, and numerical breakdowns are
distinct failure modes with distinct exit codes.
"""


class ParseError(ValueError):
    """A file or argument could not be parsed (CLI exit code 2)."""


class InvariantViolation(ValueError):
    """An input violates a structural invariant (CLI exit code 3).

    Examples: a degenerate simplex, a face shared by three simplices,
    a Schatten order below 1, overlapping Dirac fences.
    """


class NumericalError(ArithmeticError):
    """A computation failed numerically (CLI exit code 4).

    Examples: non-finite samples, a singular interpolation system,
    an SVD that did not converge.
    """
