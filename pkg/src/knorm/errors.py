"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: input problems exit 2,
precision problems exit 3, and failed mathematical checks exit 1.
"""


class KnormError(Exception):
    """Base class for all package errors."""


class InputError(KnormError, ValueError):
    """Malformed or inconsistent user input (field specs, profiles, flags)."""


class PrecisionError(KnormError):
    """A decision could not be made at the working precision.

    Raised instead of guessing: zero tests on eroded values, p-th power
    tests below the wild bound, and similar.
    """


class MathCheckError(KnormError):
    """A verified mathematical identity failed on a concrete instance.

    Either an internal inconsistency (a bug) or a genuine violation of a
    checked statement; never silently repaired.
    """


class UnsupportedOperationError(KnormError):
    """Operation outside the decidable fragment (e.g. comparing sums of
    independent symbols for odd p, where the degree-2 identification is
    pinned only up to a scalar)."""
