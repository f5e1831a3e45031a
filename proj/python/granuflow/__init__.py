"""JKO solver for 1D kinetic granular media (bindings to the C++ core)."""

from ._core import (
    GranuflowError,
    discrete_labels_run,
    run_criterion,
    simulate,
    suite_names,
    wasserstein,
)

__all__ = [
    "GranuflowError",
    "discrete_labels_run",
    "run_criterion",
    "simulate",
    "suite_names",
    "wasserstein",
]
