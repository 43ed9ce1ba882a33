"""Concrete operators, projectors and proximity maps."""

from .imaging import (discrete_gradient, divergence, gradient_adjoint, operator_norm_sq,
                      prox_tv_conjugate, rof_objective, rof_saddle_operators, total_variation, tv_dual_ball)
from .matrix import (PrescribedNonneg, feasibility_witness, proj_doubly_stochastic_affine,
                     proj_prescribed_nonneg, proj_psd)
from .operators import (box_indicator, box_normal_cone, doubly_stochastic_normal_cone,
                        identity_operator, l1_norm, l1_subdifferential, linear_operator,
                        nonneg_normal_cone, normal_cone, prescribed_nonneg_normal_cone,
                        psd_normal_cone, quadratic, scaled_shift, zero_function, zero_operator)
from .pde import GridLaplacian, laplacian_resolvent
from .prox import proj_ball, proj_box, proj_hyperplane, proj_nonneg, prox_l1, prox_quadratic

__all__ = [name for name in dir() if not name.startswith("_")]
