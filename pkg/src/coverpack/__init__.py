"""coverpack: solvers with checkable guarantees for covering/packing integer programs."""

from coverpack.model import (
    UNBOUNDED,
    CoverpackError,
    CpipInstance,
    FractionalVector,
    InstanceError,
    InstanceMetrics,
    IntegerVector,
    ParseError,
    metrics,
    normalize_width,
    parse_instance,
    serialize_instance,
)
from coverpack.simplex import (
    InfeasibleError,
    LpProblem,
    LpSolution,
    lp_from_instance,
    solve_lp,
    verify_certificate,
)
from coverpack.rounding import (
    RoundingParams,
    bicriteria_round,
    compute_scale_factor,
    derandomized_round,
    granular_round,
    randomized_round,
    solve_cpip_bicriteria,
)
from coverpack.kc import (
    KcSystem,
    PinningPlan,
    find_violated_kc,
    kc_system,
    residual_demand,
    solve_cip_strict,
    solve_lp_kc,
)
from coverpack.oracle import (
    OracleBudget,
    SolveReport,
    brute_force_opt,
    check_kc_validity,
    check_solution,
)
from coverpack.genbench import (
    GeneratorSpec,
    gen_random_cpip,
    gen_set_cover,
    knapsack_gap,
    run_bench,
)

__all__ = [
    "UNBOUNDED",
    "CoverpackError",
    "CpipInstance",
    "FractionalVector",
    "GeneratorSpec",
    "InfeasibleError",
    "InstanceError",
    "InstanceMetrics",
    "IntegerVector",
    "KcSystem",
    "LpProblem",
    "LpSolution",
    "OracleBudget",
    "ParseError",
    "PinningPlan",
    "RoundingParams",
    "SolveReport",
    "bicriteria_round",
    "brute_force_opt",
    "check_kc_validity",
    "check_solution",
    "compute_scale_factor",
    "derandomized_round",
    "find_violated_kc",
    "gen_random_cpip",
    "gen_set_cover",
    "granular_round",
    "kc_system",
    "knapsack_gap",
    "lp_from_instance",
    "metrics",
    "normalize_width",
    "parse_instance",
    "randomized_round",
    "residual_demand",
    "run_bench",
    "serialize_instance",
    "solve_cip_strict",
    "solve_cpip_bicriteria",
    "solve_lp",
    "solve_lp_kc",
    "verify_certificate",
]
