"""currdyn: free-group automorphism dynamics on finite-order geodesic currents."""

__version__ = "0.1.0"

from .words import (  # noqa: F401
    Automorphism,
    CyclicWord,
    Generator,
    Word,
    apply,
    apply_cyclic,
    compose,
    conjugacy_equal,
    cyclic_reduce,
    format_automorphism,
    parse_automorphism,
    power_apply,
    reduce,
)
