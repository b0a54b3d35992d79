"""Python bindings for the danc simulation and verification core."""

from ._danc import (
    ConfigError,
    DancError,
    Scenario,
    lemma1_suite,
    lemma2_suite,
    simulate,
    sweep,
    sweep_axes,
    verify,
)

__all__ = [
    "ConfigError",
    "DancError",
    "Scenario",
    "lemma1_suite",
    "lemma2_suite",
    "simulate",
    "sweep",
    "sweep_axes",
    "verify",
]
