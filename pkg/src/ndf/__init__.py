"""Nested spherical t-designs: construction, extension, certification.

A point set is a t-design when equal-weight averages over it integrate
every polynomial of degree <= t exactly. This package measures that
property through a kernel residual with analytic gradients, extends
fixed point sets to designs by projected gradient descent, and ships the
supporting machinery: closed-form point-count bounds, area-regular
partitions of S^2, quadrature, a clamped gradient flow, and empirical
checks of the sampling inequalities that drive the theory.
"""
from .backend import ACTIVE_BACKEND, HAS_NUMBA
from .harmonics import (
    KernelSpec,
    check_sphere_dim,
    clamp_inner,
    degree_dims,
    dim_harmonic,
    dim_space,
    kernel_eval,
    kernel_grad,
    legendre_eval,
    legendre_values,
    legendre_values_and_derivs,
    surface_area,
)
from .residual import (
    Configuration,
    DesignCertificate,
    DesignInconsistencyError,
    certify_design,
    monomial_integral,
    monomial_multi_indices,
    nested_residual,
    oracle_max_deviation,
    residual_gradient,
    weyl_residual,
)
from .classical import CLASSICAL_DESIGNS, classical_design
from .partition import (
    Cell,
    Partition,
    cell_area,
    cell_center,
    cell_diameter,
    equal_area_partition,
    locate,
    partition_norm,
)
from .flow import (
    FlowTrace,
    PolynomialHandle,
    clamp_epsilon,
    eval_poly,
    eval_poly_grad,
    flow_displacement_bound_check,
    flow_field,
    h_clamp,
    integrate_flow,
    normalize_to_boundary,
    poly_gradients,
    poly_values,
    quasi_uniform_points,
    random_boundary_polynomial,
    random_polynomial,
    rk4_order_probe,
    spiral_points,
)
from .mz import (
    Lemma1Result,
    MZReport,
    QuadratureRule,
    lemma1_check,
    mz_gradient_check,
    mz_sweep,
    mz_value_check,
    product_quadrature,
)
from .bounds import (
    BoundsReport,
    LemmaBounds,
    PaperConstants,
    ReplicationPlan,
    bounds_report,
    corollary3_order,
    dgs_lower_bound,
    lemma_bounds,
    proposition1_build,
    proposition1_plan,
    theorem4_points,
)
from .optimizer import (
    ExtendOptions,
    ExtendResult,
    auto_free_count,
    extend_design,
    initialize_points,
)
from .config import ENV_VAR, ConfigError, RunConfig, load_config
from .pointset_io import (
    PointSetData,
    PointSetFormatError,
    read_pointset,
    write_pointset,
)

__version__ = "0.1.0"
