"""Online linear programming simulation toolkit: re-solving (certainty
equivalent) policy, fluid and hindsight benchmarks, degeneracy diagnostics,
and a Monte Carlo regret harness."""

from .distributions import (
    Bounds,
    Discrete,
    GapMultisecretary,
    GeneralizedLinear,
    HolderParams,
    HyperCube,
    MultisecretaryBeta,
    RequestDistribution,
    TwoPointConsumption,
    UnitSquareShifted,
)
from .fluid import (
    DualSolution,
    SolverConfig,
    estimate_growth_exponent,
    fluid_objective,
    fluid_subgradient,
    fluid_value,
    solve_fluid_dual,
)
from .hindsight import (
    Allocation,
    RequestSample,
    empirical_dual_objective,
    empirical_dual_subgradient,
    greedy_m1,
    hindsight_value,
    recover_primal,
    solve_empirical_dual,
    value_induction_check,
)
from .policy import (
    DecompositionReport,
    EpisodeTrace,
    PolicyConfig,
    PolicyKind,
    ce_decision,
    compute_decomposition,
    concentration_probe,
    episode_regret,
    run_episode,
)
from .degeneracy import (
    DegeneracyVerdict,
    DlpSolution,
    degeneracy_verdict,
    dlp_nondegeneracy_check,
    dual_uniqueness_check,
    make_degenerate_inventory,
    solve_dlp,
    strict_cs_check,
)
from .harness import ExperimentConfig, RegretReport, fit_scaling, run_regret_sweep

__version__ = "0.1.0"
