"""Two-stage fixed-point iteration for Lipschitz pseudo-contractions on
compact convex sets, with exact effective moduli and an empirical
verification harness."""

from .bignat import DEFAULT_TAU, DEFAULT_TAU_EXPONENT, BoundNat, sat_pow, tau_from_exponent
from .bounds import (
    AfpBounds,
    ClosednessModuli,
    MetastabilityConstants,
    SquareFejerProfile,
    afp_bounds,
    closedness_moduli,
    combined_bound_sqrt_schedule,
    combined_metastability_bound,
    descent_budget,
    half_descent_index,
    liminf_modulus,
    liminf_modulus_shifted,
    liminf_modulus_sqrt_schedule,
    liminf_modulus_successive,
    metastability_bound,
    metastability_constants,
    shift_index,
    uniform_fejer_modulus,
)
from .checks import (
    MetastabilityQuery,
    check_combined_metastability,
    check_fejer_descent,
    check_lemma_suite,
    check_liminf_modulus,
    check_metastability_bound,
    check_uniform_closedness,
    check_uniform_fejer,
    find_liminf_witness,
    find_metastable_witness,
)
from .counterfn import (
    Affine,
    Compose,
    Const,
    Counterfunction,
    Identity,
    Power,
    Table,
    majorant,
    parse_counterfunction,
    shift,
)
from .geometry import (
    AmbientSet,
    Ball,
    Box,
    ContractViolation,
    contains,
    convex_combination,
    inner,
    norm,
    point,
    project,
    total_boundedness_modulus,
)
from .iteration import (
    InsufficientLength,
    Trajectory,
    check_recurrence,
    dump_csv,
    ishikawa,
    mann,
    shifted_view,
)
from .operators import (
    DomainViolation,
    OperatorSpec,
    apply,
    check_lipschitz,
    check_pseudocontraction,
    check_self_map,
    gallery,
    gallery_by_name,
    get_operator,
    residual,
    residual_sum,
    strict_pc_lipschitz,
)
from .report import CertReport
from .scenario import Scenario, ScenarioError, Tolerances, load_scenario, scenario_from_mapping
from .schedule import (
    WeightSchedule,
    canonical_schedule,
    constant_schedule,
    reciprocal_power_schedule,
    schedule_from_config,
    verify_schedule,
)

__version__ = "0.1.0"
