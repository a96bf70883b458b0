"""Noisy zero-sum matrix games: saddle-point identification and benchmarks."""

from .errors import (
    BudgetTooSmall,
    BudgetZero,
    EmptyArmSet,
    InvalidCounts,
    InvalidParams,
    MaxRoundsExceeded,
    MidsearchError,
    NoStrictPSNE,
    RejectionLimit,
    SkewViolation,
)
from .game import (
    GameMatrix,
    HardnessStats,
    NoiseModel,
    Psne,
    SamplingOracle,
    empirical_saddle,
    hardness_stats,
    load_instance,
    matrix_from_dict,
    matrix_to_dict,
    psne_exact,
    save_instance,
)
from .instances import (
    AHardParams,
    DuelingInstance,
    dueling_to_game,
    mab_to_game,
    make_a_hard,
    make_random_strict,
)
from .midval import MidValConfig, cmidval, rmidval
from .search import (
    GapSearchResult,
    expected_gap_search_samples,
    find_psne_heuristic,
    find_psne_with_gap,
    stage_schedule,
)
from .verify import (
    MetaResult,
    MetaSchedule,
    OracleArms,
    VerifyConfig,
    best_arm_identify,
    column_arms,
    mab_arms,
    meta_find_psne,
    row_arms_negated,
    verify,
)
from .baselines import (
    BASELINES,
    run_exp3ix_selfplay,
    run_lucb_g,
    run_midsearch,
    run_tsallis_inf_selfplay,
    run_uniform,
)
from .harness import (
    ExperimentConfig,
    ExperimentResult,
    build_instance,
    emit_results,
    run_experiment,
    wilson_ci,
)
from .trajectory import AlgorithmRun

__version__ = "0.1.0"
