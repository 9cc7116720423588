"""Heavy-tailed On/Off traffic synthesis and LRD analysis.

The heavy lifting lives in the compiled extension; this package re-exports it.
Rate specifications are either a number (constant rate) or a 3-tuple
``(alpha, k, cutoff)`` for a Bounded Pareto law. Duration laws are
``(alpha, k)`` Pareto pairs.
"""

from amp._core import (
    aggregate_marginal,
    aggregate_trace,
    autocorrelation,
    expected_load,
    generate_events,
    generate_trace,
    hill_tail_index,
    hurst_av,
    hurst_rs,
    hurst_spectral,
    kb_recursion,
    psd_model,
    run_validation,
    single_marginal,
    theoretical_hurst,
)

__all__ = [
    "aggregate_marginal",
    "aggregate_trace",
    "autocorrelation",
    "expected_load",
    "generate_events",
    "generate_trace",
    "hill_tail_index",
    "hurst_av",
    "hurst_rs",
    "hurst_spectral",
    "kb_recursion",
    "psd_model",
    "run_validation",
    "single_marginal",
    "theoretical_hurst",
]

__version__ = "1.0.0"
