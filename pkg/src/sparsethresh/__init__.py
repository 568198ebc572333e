"""Sparsity thresholds, sub-dictionary conditioning, and l1 recovery experiments.

The package splits into small focused modules:

  dictionary     partitioned dictionaries, coherence and spectral statistics
  model          the hybrid support model and coefficient sampling
  threshold      closed-form sparsity conditions and the budget search
  concentration  hollow Gram chain, tail bounds, sigma_min and moment runs
  recovery       basis pursuit, a brute-force l0 oracle, success-rate sweeps
  svg            deterministic plot emitters
  cli            the ``sparsethresh`` command-line driver
"""

from .dictionary import (
    DictionaryFormatError,
    DictionaryStats,
    PartitionedDictionary,
    analyze,
    build_mub,
    build_random_dictionary,
    build_two_onb,
    coherence,
    cross_coherence,
    load_dictionary,
    save_dictionary,
    spectral_norm,
    welch_bound,
)
from .model import (
    MAGNITUDE_LAWS,
    SUPPORT_A_STRATEGIES,
    CoefficientSpec,
    HybridSupportSpec,
    SparseInstance,
    choose_support_a,
    sample_instance,
    sample_support_b,
)
from .threshold import (
    GAMMA_GRID_DEFAULT,
    SPARSITY_CONSTANT,
    ConditionCheck,
    ConditionReport,
    ScalingReport,
    SparsitySearchResult,
    TheoremParams,
    check_arbitrary_block,
    check_random_block,
    check_random_support_threshold,
    check_uniqueness_threshold,
    classical_threshold,
    evaluate_conditions,
    max_sparsity_search,
    scaling_report,
)
from .concentration import (
    HollowGramRecord,
    MomentEstimate,
    SminExperimentResult,
    SubDictionary,
    TailBoundSpec,
    alpha_beta,
    default_u,
    estimate_moment,
    extract_subdictionary,
    hollow_gram_chain,
    run_smin_trials,
    sigma_min,
    tail_probability,
)
from .recovery import (
    BpSolverConfig,
    BruteForceResult,
    PhaseTransitionGrid,
    RecoveryOutcome,
    brute_force_l0,
    recovery_trial,
    run_recovery_sweep,
    solve_bp,
)
from .rng import derive_rng

__version__ = "0.1.0"
