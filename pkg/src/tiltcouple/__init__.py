"""Couplings of tilted scalars, random measures and straddling jumps.

The package simulates joint draws (xi, object) in which a polynomially
weighted, exponentially discounted scalar xi decouples the object: the
product of xi with the object's scalar summary is gamma distributed and
independent of the normalized object. Samplers, the statistical tests that
verify these laws, and a batch CLI live in separate modules; everything is
seed-deterministic through explicit RngStream arguments.
"""

from .errors import (
    NonIntegrable,
    NonMonotoneCDF,
    QuadratureError,
    TiltCoupleError,
    TruncationError,
    UnsupportedFamily,
)
from .rng import RngStream
from .special_fn import (
    CaseTag,
    CumulantModel,
    Family,
    LevyDensityModel,
    NumericCdf,
    StableParams,
    beta_cdf,
    cumulant,
    gamma_cdf,
    levy_exponent,
    levy_exponent_quadrature,
    levy_half_cdf,
    levy_half_density,
    neg_moment,
    stable_density,
)
from .samplers import (
    XiLaw,
    sample_H,
    sample_beta,
    sample_gamma,
    sample_pos_stable,
    sample_tilted_stable,
    sample_xi,
    sample_xi_H_pair,
    xi_law,
)
from .measures import (
    JumpMeasure,
    PartitionState,
    RankedWeights,
    bridge_measure,
    crp_partition,
    diversity_estimate,
    normalize,
    sample_gg_measure,
    stick_breaking_top_weight,
)
from .couplings import (
    MeasureCoupling,
    PdBridgeDraw,
    ScalarCoupling,
    couple_gg_measure,
    couple_gg_measure_batch,
    couple_pd_bridge,
    couple_pd_bridge_batch,
    couple_size_biased,
    couple_size_biased_batch,
    couple_theorem1,
    couple_theorem1_batch,
    factorization_grid_error,
    stable_gamma_algebra_check,
    tilted_scalar_batch,
)
from .excursions import (
    ExcursionCoupling,
    ExcursionTriple,
    case2_weight_report,
    compound_poisson_rate,
    conjugate_excursion_batch,
    couple_excursion,
    couple_excursion_batch,
    duration_density,
    excursion_joint_density,
    excursion_xi_density,
    sample_excursion_direct,
    sample_excursion_direct_batch,
    sample_excursion_path_oracle_batch,
    three_case_model,
)
from .stats import (
    StatReport,
    TestKind,
    independence_test,
    ks_constant,
    ks_one_sample,
    ks_two_sample,
    moment_ci,
)
from .claims import (
    CheckResult,
    ClaimBundle,
    CLAIM_NAMES,
    DEFAULT_SEEDS,
    run_all,
    run_claim,
)

__version__ = "0.1.0"
