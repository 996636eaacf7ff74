"""Exception types shared across the package.

The split mirrors the CLI exit codes: bad flag values raise ValueError
(usage), problems with input data raise DataError, and numerical
breakdowns raise NumericError.
"""


class DataError(Exception):
    """Input data is missing, malformed, or inconsistent."""


class NumericError(Exception):
    """A numerical routine failed on otherwise well-formed input."""
