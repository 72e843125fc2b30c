"""2x2 full-factorial design of experiments.

Factor 1 is the power-and-cooling cost level (coded x_A), factor 2 the
server type by cost band (coded x_B). The module codes raw costs into
(-1, +1) levels, estimates the additive-plus-interaction effects from the
four cells, allocates the total variation into per-factor, interaction
and error parts, and builds t-based confidence intervals for the effects
when the design is replicated.

The effect model is

    y = q0 + qA*x_A + qB*x_B + qAB*x_A*x_B

whose design matrix over the four sign patterns is orthogonal, so the
effects are quarter sign-sums of the cell means and reconstruct those
means exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ValidationError
from .special import student_t_quantile

Cell = tuple[int, int]

CELL_ORDER: tuple[Cell, ...] = ((-1, -1), (1, -1), (-1, 1), (1, 1))


@dataclass(frozen=True)
class LevelCoding:
    """Cost intervals (million USD, inclusive bounds) defining the codes.

    A cost maps to -1 when it falls in the low / type-1 interval and to
    +1 in the high / type-2 interval; anything else is rejected.
    """

    factor1_low: tuple[float, float] = (5.0, 15.0)
    factor1_high: tuple[float, float] = (16.0, 40.0)
    factor2_type1: tuple[float, float] = (45.0, 55.0)
    factor2_type2: tuple[float, float] = (56.0, 65.0)

    def __post_init__(self) -> None:
        for name in ("factor1_low", "factor1_high", "factor2_type1", "factor2_type2"):
            lo, hi = getattr(self, name)
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValidationError(f"{name} interval ({lo}, {hi}) is not ordered")
        for a, b, factor in (
            (self.factor1_low, self.factor1_high, "factor 1"),
            (self.factor2_type1, self.factor2_type2, "factor 2"),
        ):
            if a[1] >= b[0] and b[1] >= a[0]:
                raise ValidationError(f"{factor} intervals overlap")


DEFAULT_CODING = LevelCoding()


@dataclass(frozen=True)
class Design22:
    """Four observation lists keyed by (x_A, x_B), equal replicates each."""

    cells: Mapping[Cell, tuple[float, ...]]

    def __post_init__(self) -> None:
        normalized: dict[Cell, tuple[float, ...]] = {}
        for key in CELL_ORDER:
            if key not in self.cells:
                raise ValidationError(f"design cell {key} is missing")
            obs = tuple(float(v) for v in self.cells[key])
            if not obs:
                raise ValidationError(f"design cell {key} has no observations")
            for v in obs:
                if not math.isfinite(v):
                    raise ValidationError(f"observation {v!r} in cell {key} is not finite")
            normalized[key] = obs
        extra = set(self.cells) - set(CELL_ORDER)
        if extra:
            raise ValidationError(f"unexpected design cells: {sorted(extra)}")
        counts = {len(v) for v in normalized.values()}
        if len(counts) != 1:
            raise ValidationError(f"unequal replicate counts across cells: {sorted(counts)}")
        object.__setattr__(self, "cells", normalized)

    @property
    def replicates(self) -> int:
        return len(self.cells[CELL_ORDER[0]])

    def cell_means(self) -> dict[Cell, float]:
        return {key: sum(obs) / len(obs) for key, obs in self.cells.items()}


@dataclass(frozen=True)
class EffectEstimates:
    q0: float
    qa: float
    qb: float
    qab: float

    def reconstruct(self, x_a: int, x_b: int) -> float:
        return self.q0 + self.qa * x_a + self.qb * x_b + self.qab * x_a * x_b


@dataclass(frozen=True)
class VariationAllocation:
    ssa: float
    ssb: float
    ssab: float
    sse: float
    sst: float
    fraction_a: float
    fraction_b: float
    fraction_ab: float
    fraction_error: float
    degenerate: bool


@dataclass(frozen=True)
class ReplicatedAnalysis:
    allocation: VariationAllocation
    mse: float


@dataclass(frozen=True)
class EffectConfidenceIntervals:
    """Per-effect (lower, upper) bounds in the order q0, qA, qB, qAB."""

    estimates: EffectEstimates
    intervals: tuple[tuple[float, float], ...]
    includes_zero: tuple[bool, bool, bool, bool]
    confidence: float
    dof: int
    mse: float
    effect_std_error: float


def code_levels(
    raw_costs: tuple[float, float], coding: LevelCoding = DEFAULT_CODING
) -> Cell:
    """Map (factor-1 cost, factor-2 cost) to the (+-1, +-1) cell codes."""

    def code_one(cost: float, low: tuple[float, float], high: tuple[float, float], factor: str) -> int:
        if low[0] <= cost <= low[1]:
            return -1
        if high[0] <= cost <= high[1]:
            return 1
        raise ValidationError(
            f"{factor} cost {cost} outside [{low[0]}, {low[1]}] and "
            f"[{high[0]}, {high[1]}]"
        )

    f1, f2 = raw_costs
    x_a = code_one(float(f1), coding.factor1_low, coding.factor1_high, "factor 1")
    x_b = code_one(float(f2), coding.factor2_type1, coding.factor2_type2, "factor 2")
    return (x_a, x_b)


def estimate_effects(design: Design22) -> EffectEstimates:
    """Quarter sign-sums of the cell means (the orthogonal LS solution)."""
    means = design.cell_means()
    q0 = sum(means.values()) / 4.0
    qa = sum(x_a * means[(x_a, x_b)] for x_a, x_b in CELL_ORDER) / 4.0
    qb = sum(x_b * means[(x_a, x_b)] for x_a, x_b in CELL_ORDER) / 4.0
    qab = sum(x_a * x_b * means[(x_a, x_b)] for x_a, x_b in CELL_ORDER) / 4.0
    return EffectEstimates(q0=q0, qa=qa, qb=qb, qab=qab)


def _check_effects_match(effects: EffectEstimates, design: Design22) -> None:
    means = design.cell_means()
    scale = max(1.0, *(abs(m) for m in means.values()))
    for x_a, x_b in CELL_ORDER:
        if abs(effects.reconstruct(x_a, x_b) - means[(x_a, x_b)]) > 1e-9 * scale:
            raise ValidationError(
                "effect estimates do not reconstruct this design's cell means; "
                "they were computed from different data"
            )


def allocate_variation(effects: EffectEstimates, design: Design22) -> VariationAllocation:
    """Split SST into SSA + SSB + SSAB + SSE.

    SST is computed directly as the sum of squared deviations of every
    observation from the grand mean; the factor terms are (2^2)r q_i^2.
    The two routes agreeing is the decomposition identity, left to the
    tests rather than enforced here.
    """
    _check_effects_match(effects, design)
    r = design.replicates
    n_cells = 4
    means = design.cell_means()
    grand = sum(means.values()) / n_cells
    sst = sum(
        (obs - grand) ** 2 for observations in design.cells.values() for obs in observations
    )
    sse = sum(
        (obs - means[key]) ** 2 for key, observations in design.cells.items() for obs in observations
    )
    ssa = n_cells * r * effects.qa**2
    ssb = n_cells * r * effects.qb**2
    ssab = n_cells * r * effects.qab**2
    if sst == 0.0:
        return VariationAllocation(
            ssa=ssa, ssb=ssb, ssab=ssab, sse=sse, sst=sst,
            fraction_a=0.0, fraction_b=0.0, fraction_ab=0.0, fraction_error=0.0,
            degenerate=True,
        )
    return VariationAllocation(
        ssa=ssa, ssb=ssb, ssab=ssab, sse=sse, sst=sst,
        fraction_a=ssa / sst, fraction_b=ssb / sst, fraction_ab=ssab / sst,
        fraction_error=sse / sst,
        degenerate=False,
    )


def analyze_replicated(design: Design22) -> ReplicatedAnalysis:
    """Variation allocation plus the mean squared error SSE / (2^2 (r-1))."""
    r = design.replicates
    if r < 2:
        raise ValidationError(f"replication analysis needs r >= 2, got r = {r}")
    allocation = allocate_variation(estimate_effects(design), design)
    mse = allocation.sse / (4 * (r - 1))
    return ReplicatedAnalysis(allocation=allocation, mse=mse)


def effect_confidence_intervals(
    design: Design22, confidence: float
) -> EffectConfidenceIntervals:
    """t-based intervals q_i -+ t_{(1+C)/2, 4(r-1)} * s_e / sqrt(4r)."""
    if not 0.0 < confidence < 1.0:
        raise ValidationError(f"confidence level must lie in (0, 1), got {confidence}")
    analysis = analyze_replicated(design)
    effects = estimate_effects(design)
    r = design.replicates
    dof = 4 * (r - 1)
    s_qi = math.sqrt(analysis.mse / (4 * r))
    t = student_t_quantile(0.5 * (1.0 + confidence), dof)
    half_width = t * s_qi
    estimates = (effects.q0, effects.qa, effects.qb, effects.qab)
    intervals = tuple((q - half_width, q + half_width) for q in estimates)
    includes_zero = tuple(lo <= 0.0 <= hi for lo, hi in intervals)
    return EffectConfidenceIntervals(
        estimates=effects,
        intervals=intervals,
        includes_zero=includes_zero,  # type: ignore[arg-type]
        confidence=confidence,
        dof=dof,
        mse=analysis.mse,
        effect_std_error=s_qi,
    )


def design_from_observations(
    rows: Sequence[tuple[int, int, float]]
) -> Design22:
    """Build a Design22 from (x_A, x_B, revenue) rows, grouping replicates."""
    cells: dict[Cell, list[float]] = {}
    for x_a, x_b, revenue in rows:
        if x_a not in (-1, 1) or x_b not in (-1, 1):
            raise ValidationError(f"cell codes must be +-1, got ({x_a}, {x_b})")
        cells.setdefault((x_a, x_b), []).append(float(revenue))
    return Design22({key: tuple(v) for key, v in cells.items()})
