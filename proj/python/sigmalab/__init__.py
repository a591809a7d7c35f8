"""Python access to the sigmalab numerical core."""

from ._sigmalab import (
    SigmalabError,
    c2s_constant,
    classify,
    critical_exponent,
    fraclap_gaussian,
    kappa,
    kernel_values,
    predict_lifespan,
    run,
)

__all__ = [
    "SigmalabError",
    "c2s_constant",
    "classify",
    "critical_exponent",
    "fraclap_gaussian",
    "kappa",
    "kernel_values",
    "predict_lifespan",
    "run",
]
