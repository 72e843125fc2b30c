"""Cobb-Douglas revenue modeling with 2x2 factorial design analysis.

The package splits into five parts: closed-form production and profit
maximization over Cobb-Douglas revenue functions (model_core), sign-table
effect estimation and variation allocation for two-level factorial designs
(factorial_doe), elasticity recovery from cost data by plain or constrained
least squares (estimation), the supporting statistics for synthesis and
checking (stats_lab), and a deterministic CLI front end (cli_reporting).
"""

__version__ = "0.1.0"

from .errors import NumericalError, RevdoeError, ValidationError
from .model_core import (
    BudgetSpec,
    CobbDouglasModel,
    FactorBundle,
    ProfitOptimum,
    Regime,
    ReturnsRegime,
    RevenueSurface,
    classify_sum,
    evaluate,
    maximize_production,
    maximize_profit,
    returns_regime,
    revenue_surface,
)
from .factorial_doe import (
    Design22,
    EffectConfidenceIntervals,
    EffectEstimates,
    LevelCoding,
    ReplicatedAnalysis,
    VariationAllocation,
    allocate_variation,
    analyze_replicated,
    code_levels,
    design_from_observations,
    effect_confidence_intervals,
    estimate_effects,
)
from .estimation import (
    CostDataset,
    DesignMatrix,
    FitResult,
    MlrResult,
    QPProblem,
    QPSolution,
    constrained_fit,
    log_linearize,
    mlr,
    ols,
    solve_qp,
)
from .stats_lab import (
    GaussianSpec,
    GofReport,
    InteractionPlot,
    PrfReport,
    chi_square_gof,
    fit_gaussian,
    generate_gaussian,
    interaction_cell_means,
    prf,
)

__all__ = [
    "__version__",
    "RevdoeError",
    "ValidationError",
    "NumericalError",
    "CobbDouglasModel",
    "FactorBundle",
    "BudgetSpec",
    "Regime",
    "ReturnsRegime",
    "ProfitOptimum",
    "RevenueSurface",
    "classify_sum",
    "returns_regime",
    "evaluate",
    "maximize_production",
    "maximize_profit",
    "revenue_surface",
    "Design22",
    "LevelCoding",
    "EffectEstimates",
    "VariationAllocation",
    "ReplicatedAnalysis",
    "EffectConfidenceIntervals",
    "code_levels",
    "design_from_observations",
    "estimate_effects",
    "allocate_variation",
    "analyze_replicated",
    "effect_confidence_intervals",
    "CostDataset",
    "DesignMatrix",
    "FitResult",
    "MlrResult",
    "QPProblem",
    "QPSolution",
    "log_linearize",
    "ols",
    "solve_qp",
    "constrained_fit",
    "mlr",
    "GaussianSpec",
    "GofReport",
    "PrfReport",
    "InteractionPlot",
    "fit_gaussian",
    "generate_gaussian",
    "chi_square_gof",
    "prf",
    "interaction_cell_means",
]
