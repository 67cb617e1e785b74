"""Bayesian g-computation for survivor average causal effects.

Estimates the effect of a monotone binary exposure on a longitudinal
outcome among individuals who would survive either way, allowing for
time-varying confounding, truncation by death, and non-ignorable
dropout.  Observed-data factors are modeled with sum-of-trees
regressions; untestable assumptions enter through explicit, bounded
sensitivity parameters.

The top-level namespace re-exports the main user-facing workflow: read
or simulate a cohort (`read_cohort_csv`, `generate_cohort`), check it
(`validate_cohort`), estimate the survivor effect (`estimate_sace` with
an `EstimateConfig`), compare against parametric and weighting baselines
(`bpgc_estimate`, `iptw_estimate`), and diagnose fit (`lpml`,
`summarize`, `trace_stats`).  Submodules expose the full machinery.
"""

from __future__ import annotations

from survgc.baselines import GlmConfig, IptwResult, bpgc_estimate, iptw_estimate
from survgc.bart import BartConfig
from survgc.cohort import (
    CohortDataset,
    PatternError,
    ValidationReport,
    admissible_patterns,
    classify_pattern,
    read_cohort_csv,
    read_schema,
    validate_cohort,
    write_cohort_csv,
    write_schema,
)
from survgc.dgp import (
    PRESETS,
    DgpConfig,
    generate_cohort,
    oracle_sace,
    oracle_sace_exact,
    preset,
)
from survgc.diagnostics import LpmlReport, Summary, lpml, summarize, trace_stats
from survgc.gcomp import EstimateConfig, SaceResult, estimate_sace
from survgc.obsmodels import fit_stack, load_stack, save_stack
from survgc.sensitivity import (
    SensitivityBounds,
    SensitivityDraw,
    compute_bounds,
    point_mass,
    sample_sensitivity,
)

__version__ = "0.1.0"

__all__ = [
    "BartConfig",
    "CohortDataset",
    "DgpConfig",
    "EstimateConfig",
    "GlmConfig",
    "IptwResult",
    "LpmlReport",
    "PRESETS",
    "PatternError",
    "SaceResult",
    "SensitivityBounds",
    "SensitivityDraw",
    "Summary",
    "ValidationReport",
    "admissible_patterns",
    "bpgc_estimate",
    "classify_pattern",
    "compute_bounds",
    "estimate_sace",
    "fit_stack",
    "generate_cohort",
    "iptw_estimate",
    "load_stack",
    "lpml",
    "oracle_sace",
    "oracle_sace_exact",
    "point_mass",
    "preset",
    "read_cohort_csv",
    "read_schema",
    "sample_sensitivity",
    "save_stack",
    "summarize",
    "trace_stats",
    "validate_cohort",
    "write_cohort_csv",
    "write_schema",
]
