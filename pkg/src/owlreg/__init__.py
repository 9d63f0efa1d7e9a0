"""owlreg: ordered weighted l1 regularized regression.

Library surface:

- ``core``:     OWL norm, proximal operator, OSCAR/SLOPE weight builders.
- ``solvers``:  Lagrangian and constrained solvers for squared and absolute
                error losses.
- ``datagen``:  seeded correlated Gaussian designs, group-sparse signals,
                l1-bounded noise.
- ``analysis``: cluster detection, clustering sufficient conditions, error
                metrics and theoretical bound calculators.
- ``experiment`` / ``cli``: Monte-Carlo experiment runner and command line.

The proximal kernel runs on a compiled extension when available; see
``owlreg.backend_name()``.
"""

from ._backend import BACKEND
from .core import (
    WeightVector,
    min_gap,
    oscar_weights,
    owl_norm,
    pigou_dalton_transfer,
    prox_owl,
    slope_weights,
)

__version__ = "0.1.0"


def backend_name():
    """Name of the active prox kernel backend: ``"c"`` or ``"python"``."""
    return BACKEND


__all__ = [
    "WeightVector",
    "owl_norm",
    "prox_owl",
    "oscar_weights",
    "slope_weights",
    "min_gap",
    "pigou_dalton_transfer",
    "backend_name",
    "__version__",
]
