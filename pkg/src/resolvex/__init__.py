"""Resolvents of sums of monotone operators via strengthening."""

from .algorithms import (ConfigError, Method, SolverConfig, SumProblem, Trace, resolvent_of_sum,
                         solve_sagraal, solve_sdr, solve_sfb, solve_sfbf, solve_spd, solve_sryu)
from .core import (AssumptionError, ConvergenceError, DivergenceError, MonotoneOperator,
                   ProxFunction, StrengtheningParams, strengthen, strengthened_resolvent)

__version__ = "0.1.0"
