"""knorm: Galois module structure of mod-p Milnor K-groups of local fields.

Computes k_n of concrete p-adic fields, the norm/restriction/cup maps for a
degree-p Kummer extension, the decomposition of k_nE over the cyclic Galois
group, and the partial Euler-Poincare characteristic identities, all with
built-in verification suites.
"""

__version__ = "0.1.0"

from .errors import (
    InputError,
    KnormError,
    MathCheckError,
    PrecisionError,
    UnsupportedOperationError,
)

__all__ = [
    "InputError",
    "KnormError",
    "MathCheckError",
    "PrecisionError",
    "UnsupportedOperationError",
    "__version__",
]
