"""Python access to the kawarada solver."""

from ._core import (
    Config,
    KawaradaError,
    convergence,
    load_config,
    parse_config,
    run,
    run_benchmark1d,
    stability,
    verify,
)

__all__ = [
    "Config",
    "KawaradaError",
    "convergence",
    "load_config",
    "parse_config",
    "run",
    "run_benchmark1d",
    "stability",
    "verify",
]
