"""Strengthened splitting algorithms for resolvents of sums."""

from .base import (GOLDEN, ConfigError, Monitor, SolverConfig, SumProblem, Trace, TraceRecord,
                   strengthening_split)
from .driver import (Method, forward_backward_base, golden_ratio_base, resolvent_of_sum,
                     tseng_base)
from .forward_backward import (fb_stepsize_bound, fbf_stepsize_bound, solve_sagraal, solve_sfb,
                               solve_sfbf)
from .primal_dual import CompositeTerm, LinearMap, solve_spd
from .resolvent_splitting import (aamr, douglas_rachford_base, dykstra, ryu_base, solve_sdr,
                                  solve_sryu)

__all__ = [
    "GOLDEN", "ConfigError", "Monitor", "SolverConfig", "SumProblem", "Trace", "TraceRecord",
    "strengthening_split", "Method", "forward_backward_base", "golden_ratio_base",
    "resolvent_of_sum", "tseng_base", "fb_stepsize_bound", "fbf_stepsize_bound",
    "solve_sagraal", "solve_sfb", "solve_sfbf", "CompositeTerm", "LinearMap", "solve_spd",
    "aamr", "douglas_rachford_base", "dykstra", "ryu_base", "solve_sdr", "solve_sryu",
]
