"""rodsym: exact 1D Poisson solves, rearrangements, and symmetrization audits."""

from .errors import (
    CompatibilityError,
    DomainError,
    InternalError,
    ParameterError,
    PreconditionError,
    RodsymError,
)
from .piecewise import (
    Interval,
    PiecewisePoly,
    StepFunction,
    cumulative_moments,
    extrema,
    integrate_product,
    lp_norm,
    poly_add,
    poly_scale,
    poly_sub,
    reflect_even,
    step_constant,
    step_indicator,
    step_product,
    sup_norm_diff,
)
from .rearrange import (
    StarCurve,
    baernstein_check,
    convex_means_check,
    decreasing_rearrangement,
    hardy_littlewood_check,
    poly_star_curve,
    riesz_sobolev_check,
    star_dominates,
    star_function,
    star_function_bruteforce,
    star_margin,
    symmetric_decreasing_rearrangement,
)
from .solver import (
    BoundaryCondition,
    RobinParam,
    direct_integration_oracle,
    dirichlet_solve,
    kernel_fourier_check,
    neumann_convolution_solve,
    neumann_kernel,
    neumann_solve,
    robin_green,
    robin_solve,
)

__version__ = "0.1.0"
