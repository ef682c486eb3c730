"""Minimal distance between an ellipsoid and a quartic surface by canonical duality."""

from .dual import (
    DualPoint,
    SpectralCache,
    dual_diagnostics,
    duality_gap,
    pi_d_gradient,
    pi_d_value,
    spectral_cache,
    x_of_dual,
    xi_hessian_x,
    xi_value,
)
from .errors import (
    ConsistencyError,
    DomainError,
    InputError,
    NumericError,
    SingularityError,
    SurfdistError,
)
from .instances import (
    EXAMPLES,
    ellipsoid_example,
    random_instance,
    sphere_example,
    symmetric_example,
)
from .oracle import brute_force_min, kkt_check, radial_roots, sample_surface_y, sample_surface_z
from .problem import (
    PrimalPoint,
    ProblemInstance,
    check_separation,
    g_value,
    h_value,
    lagrangian,
    load_instance,
    pi_value,
    save_instance,
)
from .solver import (
    Certificate,
    SolverConfig,
    newton_solve,
    perturb_and_solve,
    solve_global,
    verify_lemma1,
)

__version__ = "0.1.0"
