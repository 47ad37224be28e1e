"""Hitting θ_c minors: exact oracles, reduction rules, protrusions and kernels."""

from .errors import BudgetExceeded, PreconditionError, ThetaError
from .graph import (BoundariedGraph, Instance, MinorModel, Multigraph,
                    RuleApplication, glue, replay)
from .minors import (Flower, exact_hitting_set, exact_hitting_set_td,
                     has_theta_c, is_k1t_free, max_flower, minimal_model)
from .pipeline import (Config, KernelReport, kernelize_k1t, kernelize_thetac,
                       solve, stats, verify)

__version__ = "0.1.0"

__all__ = [
    "BoundariedGraph", "BudgetExceeded", "Config", "Flower", "Instance",
    "KernelReport", "MinorModel", "Multigraph", "PreconditionError",
    "RuleApplication", "ThetaError", "exact_hitting_set", "exact_hitting_set_td",
    "glue", "has_theta_c", "is_k1t_free", "kernelize_k1t", "kernelize_thetac",
    "max_flower", "minimal_model", "replay", "solve", "stats", "verify",
]
