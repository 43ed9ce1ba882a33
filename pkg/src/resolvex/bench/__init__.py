"""Instance generators and harnesses for the three applications and the fractional demo."""

from .fp import FpInstance, l1_over_sq_norm_instance, run_fp_demo
from .matrix import (MatrixInstance, feasibility_residual, gen_matrix_instance, run_aamr_matrix,
                     run_dykstra_matrix, run_matrix_bench, run_sryu_matrix)
from .pde import (PdeInstance, f_blinded, gen_pde_instance, obstacle_active_set,
                  plateau_iteration, rel_l2, run_pde_bench, u_blinded)
from .rof import RofInstance, gen_rof_instance, run_rof_bench, snr
from .sweep import run_sweep, summarize

__all__ = [name for name in dir() if not name.startswith("_")]
