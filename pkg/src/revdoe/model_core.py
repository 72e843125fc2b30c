"""Cobb-Douglas revenue model and its closed-form optimizers.

Revenue is modeled as f(x) = scale * prod(x_i ** e_i) over one or more
cost factors (all figures in million USD). The module classifies returns
to scale from the elasticity sum, maximizes production under a budget,
maximizes profit in the decreasing-returns regime, and evaluates revenue
grids over (alpha, beta) with an optional regime filter.

Everything here is a pure function of its arguments; the dataclasses are
frozen and safe to share across threads.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import NumericalError, ValidationError

#: Half-width of the band around an elasticity sum of 1 that still counts
#: as constant returns to scale. Exposed as a parameter everywhere it is
#: used; this is only the default.
CRS_TOLERANCE = 1e-9


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class CobbDouglasModel:
    """Scale constant plus one output elasticity per input factor."""

    scale: float
    elasticities: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "elasticities", tuple(float(e) for e in self.elasticities))
        object.__setattr__(self, "scale", float(self.scale))
        _check_finite("scale", self.scale)
        if self.scale <= 0.0:
            raise ValidationError(f"scale must be positive, got {self.scale}")
        if len(self.elasticities) < 1:
            raise ValidationError("at least one elasticity is required")
        for i, e in enumerate(self.elasticities):
            _check_finite(f"elasticity {i}", e)
            if e < 0.0:
                raise ValidationError(f"elasticity {i} must be non-negative, got {e}")

    @property
    def elasticity_sum(self) -> float:
        return sum(self.elasticities)


@dataclass(frozen=True)
class FactorBundle:
    """Quantities of each input factor, million USD, strictly positive."""

    quantities: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "quantities", tuple(float(q) for q in self.quantities))
        if len(self.quantities) < 1:
            raise ValidationError("a factor bundle needs at least one quantity")
        for i, q in enumerate(self.quantities):
            _check_finite(f"quantity {i}", q)
            if q <= 0.0:
                raise ValidationError(f"quantity {i} must be positive, got {q}")

    def __len__(self) -> int:
        return len(self.quantities)


@dataclass(frozen=True)
class BudgetSpec:
    """Per-unit factor prices and the total budget they must not exceed."""

    unit_costs: tuple[float, ...]
    budget: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "unit_costs", tuple(float(w) for w in self.unit_costs))
        object.__setattr__(self, "budget", float(self.budget))
        for i, w in enumerate(self.unit_costs):
            _check_finite(f"unit cost {i}", w)
            if w <= 0.0:
                raise ValidationError(f"unit cost {i} must be positive, got {w}")
        _check_finite("budget", self.budget)
        if self.budget <= 0.0:
            raise ValidationError(f"budget must be positive, got {self.budget}")


class Regime(enum.Enum):
    IRS = "IRS"
    CRS = "CRS"
    DRS = "DRS"


@dataclass(frozen=True)
class ReturnsRegime:
    regime: Regime
    elasticity_sum: float


@dataclass(frozen=True)
class ProfitOptimum:
    bundle: FactorBundle
    revenue: float
    profit: float


@dataclass(frozen=True)
class RevenueSurface:
    """Grid evaluation of revenue over (alpha, beta) at scale 1.

    cells[i][j] is the revenue at (alphas[i], betas[j]), or None when the
    regime filter excluded that cell. The argmax is over present cells,
    ties broken toward the lowest (i, j).
    """

    alphas: tuple[float, ...]
    betas: tuple[float, ...]
    cells: tuple[tuple[float | None, ...], ...]
    argmax_index: tuple[int, int]
    argmax_alpha: float
    argmax_beta: float
    argmax_revenue: float


def classify_sum(elasticity_sum: float, crs_tolerance: float = CRS_TOLERANCE) -> Regime:
    """Band the elasticity sum into IRS / CRS / DRS.

    The CRS band has width 2*crs_tolerance so grid sums like 0.3 + 0.7
    (which is just below 1.0 in binary floating point) classify by intent
    rather than by representation error.
    """
    if crs_tolerance < 0.0:
        raise ValidationError("crs_tolerance must be non-negative")
    if abs(elasticity_sum - 1.0) <= crs_tolerance:
        return Regime.CRS
    return Regime.IRS if elasticity_sum > 1.0 else Regime.DRS


def returns_regime(
    model: CobbDouglasModel, crs_tolerance: float = CRS_TOLERANCE
) -> ReturnsRegime:
    s = model.elasticity_sum
    return ReturnsRegime(regime=classify_sum(s, crs_tolerance), elasticity_sum=s)


def evaluate(model: CobbDouglasModel, bundle: FactorBundle) -> float:
    """Revenue scale * prod(q_i ** e_i), computed in log space.

    The log-space form keeps increasing-returns grids (elasticity sums
    near 2 on costs in the tens of millions) away from pow overflow.
    """
    if len(bundle) != len(model.elasticities):
        raise ValidationError(
            f"bundle has {len(bundle)} quantities but the model has "
            f"{len(model.elasticities)} elasticities"
        )
    log_rev = math.log(model.scale) + sum(
        e * math.log(q) for e, q in zip(model.elasticities, bundle.quantities)
    )
    try:
        revenue = math.exp(log_rev)
    except OverflowError:
        raise NumericalError(f"revenue overflowed: exp({log_rev})") from None
    if not math.isfinite(revenue):
        raise NumericalError(f"revenue overflowed: exp({log_rev})")
    return revenue


def maximize_production(model: CobbDouglasModel, budget: BudgetSpec) -> FactorBundle:
    """Revenue-maximizing bundle on the budget surface sum(w_i x_i) = m.

    Lagrangian solution: x_i = m * e_i / (w_i * sum(e)). Spending the
    whole budget is optimal because revenue is strictly increasing in
    every factor with positive elasticity.
    """
    if len(budget.unit_costs) != len(model.elasticities):
        raise ValidationError(
            f"budget prices {len(budget.unit_costs)} factors but the model has "
            f"{len(model.elasticities)}"
        )
    for i, e in enumerate(model.elasticities):
        if e == 0.0:
            raise ValidationError(
                f"elasticity {i} is 0: its optimal demand degenerates to a "
                "zero quantity, which is outside the model's domain"
            )
    total = model.elasticity_sum
    quantities = tuple(
        budget.budget * e / (w * total)
        for e, w in zip(model.elasticities, budget.unit_costs)
    )
    return FactorBundle(quantities)


def maximize_profit(
    model: CobbDouglasModel,
    output_price: float,
    unit_costs: Sequence[float],
) -> ProfitOptimum:
    """Interior profit maximum p*f(x) - sum(w_i x_i), requiring DRS.

    Solving the first-order conditions p * e_i * f / x_i = w_i gives

        f* = (scale * prod((p*e_i/w_i) ** e_i)) ** (1/(1 - sum(e)))
        x_i = p * e_i * f* / w_i

    which only exists as an interior optimum when sum(e) < 1.
    """
    _check_finite("output price", output_price)
    if output_price <= 0.0:
        raise ValidationError(f"output price must be positive, got {output_price}")
    costs = tuple(float(w) for w in unit_costs)
    if len(costs) != len(model.elasticities):
        raise ValidationError(
            f"{len(costs)} unit costs for {len(model.elasticities)} factors"
        )
    for i, w in enumerate(costs):
        _check_finite(f"unit cost {i}", w)
        if w <= 0.0:
            raise ValidationError(f"unit cost {i} must be positive, got {w}")
    total = model.elasticity_sum
    if total >= 1.0:
        raise ValidationError(
            f"no interior profit maximum: elasticity sum {total} is not below 1"
        )
    for i, e in enumerate(model.elasticities):
        if e == 0.0:
            raise ValidationError(
                f"elasticity {i} is 0: its profit-maximizing demand is zero, "
                "outside the model's domain"
            )
    log_f = (
        math.log(model.scale)
        + sum(
            e * (math.log(output_price * e) - math.log(w))
            for e, w in zip(model.elasticities, costs)
        )
    ) / (1.0 - total)
    try:
        revenue = math.exp(log_f)
    except OverflowError:
        raise NumericalError(f"profit optimum overflowed: exp({log_f})") from None
    if not math.isfinite(revenue):
        raise NumericalError(f"profit optimum overflowed: exp({log_f})")
    bundle = FactorBundle(
        tuple(
            output_price * e * revenue / w for e, w in zip(model.elasticities, costs)
        )
    )
    spend = sum(w * q for w, q in zip(costs, bundle.quantities))
    return ProfitOptimum(
        bundle=bundle, revenue=revenue, profit=output_price * revenue - spend
    )


def _check_grid(name: str, grid: Sequence[float]) -> tuple[float, ...]:
    values = tuple(float(g) for g in grid)
    if not values:
        raise ValidationError(f"{name} grid is empty")
    for v in values:
        _check_finite(f"{name} grid value", v)
        if v < 0.0:
            raise ValidationError(f"{name} grid value {v} is negative")
    for a, b in zip(values, values[1:]):
        if b <= a:
            raise ValidationError(f"{name} grid must be strictly increasing")
    return values


def revenue_surface(
    costs: FactorBundle,
    alpha_grid: Sequence[float],
    beta_grid: Sequence[float],
    regime_filter: Regime | None = None,
    crs_tolerance: float = CRS_TOLERANCE,
) -> RevenueSurface:
    """Revenue at scale 1 for every (alpha, beta) cell passing the filter."""
    if len(costs) != 2:
        raise ValidationError("revenue_surface needs exactly two cost factors")
    alphas = _check_grid("alpha", alpha_grid)
    betas = _check_grid("beta", beta_grid)
    log_s = math.log(costs.quantities[0])
    log_p = math.log(costs.quantities[1])
    cells: list[tuple[float | None, ...]] = []
    best: tuple[int, int] | None = None
    best_rev = -math.inf
    for i, a in enumerate(alphas):
        row: list[float | None] = []
        for j, b in enumerate(betas):
            if regime_filter is not None and classify_sum(a + b, crs_tolerance) is not regime_filter:
                row.append(None)
                continue
            rev = math.exp(a * log_s + b * log_p)
            row.append(rev)
            if rev > best_rev:
                best_rev = rev
                best = (i, j)
        cells.append(tuple(row))
    if best is None:
        raise ValidationError("all cells filtered out by the regime constraint")
    return RevenueSurface(
        alphas=alphas,
        betas=betas,
        cells=tuple(cells),
        argmax_index=best,
        argmax_alpha=alphas[best[0]],
        argmax_beta=betas[best[1]],
        argmax_revenue=best_rev,
    )
