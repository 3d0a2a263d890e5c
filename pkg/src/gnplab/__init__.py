"""Monte Carlo laboratory for the central limit theorems of the giant
component and the k-core in sparse G(n, c/n)."""

__version__ = "0.1.0"

from ._validation import DegenerateInputError, NumericalError, ParameterError
from .clt import (CLTExperiment, CltTrial, HypothesisRefused, Standardizer, clt_report,
                  mantle_profile, run_clt, variance_scaling)
from .decomposition import (ComponentLabeling, CoreResult, check_event_E, components, kcore,
                            local_kcore, remainder, verify_degenerate_ordering)
from .graph import (CoupledPair, Graph, LocalBall, RngStream, ball, make_coupled_pair,
                    read_edgelist, sample_gnp, write_edgelist)
from .local import (WeightScheme, census, core_local_indicators, giant_local_indicators,
                    truncated_core, truncated_giant, weighted_count)
from .probe import (ClaimViolation, EfronSteinProbe, ProbeConfig, ResampleTrialRecord,
                    compute_D, compute_W, es_bound, resample_trial, run_probe)
from .stats import NormalityReport, normality
from .threshold import f_k, solve_c_hat

__all__ = [
    "CLTExperiment", "ClaimViolation", "CltTrial", "ComponentLabeling", "CoreResult",
    "CoupledPair", "DegenerateInputError", "EfronSteinProbe", "Graph", "HypothesisRefused",
    "LocalBall", "NormalityReport", "NumericalError", "ParameterError", "ProbeConfig",
    "ResampleTrialRecord", "RngStream", "Standardizer", "WeightScheme", "ball", "census",
    "check_event_E", "clt_report", "components", "compute_D", "compute_W",
    "core_local_indicators", "es_bound", "f_k", "giant_local_indicators", "kcore",
    "local_kcore", "make_coupled_pair", "mantle_profile", "normality", "read_edgelist",
    "remainder", "resample_trial", "run_clt", "run_probe", "sample_gnp", "solve_c_hat",
    "truncated_core", "truncated_giant", "variance_scaling", "verify_degenerate_ordering",
    "weighted_count", "write_edgelist",
]
