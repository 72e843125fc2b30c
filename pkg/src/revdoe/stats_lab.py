"""Data synthesis and distribution diagnostics.

Supports the randomized-data workflow: fit a Gaussian to each observed
cost column, generate reproducible synthetic costs from a seed, confirm
distributional agreement with a chi-square goodness-of-fit test, split
the two cost factors' variance into principal components, and lay design
cells out as interaction-plot series.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .factorial_doe import Design22, estimate_effects
from .rng import SplitMix64
from .special import chi_square_quantile, normal_quantile


@dataclass(frozen=True)
class GaussianSpec:
    mean: float
    std_dev: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mean) and math.isfinite(self.std_dev)):
            raise ValidationError("Gaussian parameters must be finite")
        if self.std_dev <= 0.0:
            raise ValidationError(f"std_dev must be positive, got {self.std_dev}")


@dataclass(frozen=True)
class GofReport:
    statistic: float
    dof: int
    significance: float
    critical_value: float
    h0_rejected: bool
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]
    expected_per_bin: float


@dataclass(frozen=True)
class PrfReport:
    """Principal-component split of the two cost factors' variance.

    fractions are eigenvalue shares of the covariance of RANGE-NORMALIZED
    columns (each column divided by its observed max - min), which makes
    the two factors' spreads comparable regardless of their units or
    magnitudes. directions are the orthonormal principal axes of the
    plain (unnormalized) sample covariance, reported in the original cost
    coordinates.
    """

    fractions: tuple[float, float]
    directions: tuple[tuple[float, float], tuple[float, float]]


@dataclass(frozen=True)
class InteractionPlot:
    """Cell means arranged as one series per Factor-2 level.

    Each series is ((x_A=-1, mean), (x_A=+1, mean)). parallel_deviation
    is the absolute difference of the two series' rises, which equals
    4*|qAB|; zero means the series are parallel (no interaction).
    """

    type1_series: tuple[tuple[int, float], tuple[int, float]]
    type2_series: tuple[tuple[int, float], tuple[int, float]]
    parallel_deviation: float


def fit_gaussian(samples: Sequence[float]) -> GaussianSpec:
    """Sample mean and n-1 standard deviation."""
    values = [float(s) for s in samples]
    if len(values) < 2:
        raise ValidationError(f"need at least 2 samples, got {len(values)}")
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    if var == 0.0:
        raise ValidationError("samples have zero variance: degenerate Gaussian")
    return GaussianSpec(mean=mean, std_dev=math.sqrt(var))


def generate_gaussian(spec: GaussianSpec, n: int, seed: int) -> tuple[float, ...]:
    """n deterministic normal deviates from the seeded generator."""
    if n < 1:
        raise ValidationError(f"sample count must be positive, got {n}")
    return tuple(SplitMix64(seed).gaussians(n, spec.mean, spec.std_dev))


def chi_square_gof(
    samples: Sequence[float], spec: GaussianSpec, significance: float
) -> GofReport:
    """Equal-probability-bin chi-square test of samples against spec.

    Bin count is max(5, n // 5) capped at 10; bin edges are the spec's
    quantiles so each bin has expected count n / bins; degrees of freedom
    are bins - 3 (two parameters fitted from data). The null is rejected
    only when the statistic strictly exceeds the critical value.
    """
    if not 0.0 < significance < 1.0:
        raise ValidationError(f"significance must lie in (0, 1), got {significance}")
    values = [float(s) for s in samples]
    n = len(values)
    bins = max(5, min(10, n // 5))
    expected = n / bins
    if expected < 1.0:
        raise ValidationError(
            f"{n} samples spread over {bins} bins leaves expected counts below 1"
        )
    edges = tuple(
        spec.mean + spec.std_dev * normal_quantile(k / bins) for k in range(1, bins)
    )
    counts = [0] * bins
    for v in values:
        counts[bisect_right(edges, v)] += 1
    statistic = sum((c - expected) ** 2 / expected for c in counts)
    dof = bins - 3
    critical = chi_square_quantile(1.0 - significance, dof)
    return GofReport(
        statistic=statistic,
        dof=dof,
        significance=significance,
        critical_value=critical,
        h0_rejected=statistic > critical,
        bin_edges=edges,
        counts=tuple(counts),
        expected_per_bin=expected,
    )


def _covariance(c1: Sequence[float], c2: Sequence[float]) -> tuple[float, float, float]:
    n = len(c1)
    m1 = sum(c1) / n
    m2 = sum(c2) / n
    v1 = sum((a - m1) ** 2 for a in c1) / (n - 1)
    v2 = sum((b - m2) ** 2 for b in c2) / (n - 1)
    cov = sum((a - m1) * (b - m2) for a, b in zip(c1, c2)) / (n - 1)
    return v1, v2, cov


def _eigen_2x2(a: float, b: float, c: float) -> tuple[float, float, tuple[float, float]]:
    """Eigenvalues (descending) and the first eigenvector of [[a, c], [c, b]]."""
    half_diff = 0.5 * (a - b)
    radius = math.hypot(half_diff, c)
    mean = 0.5 * (a + b)
    lam1 = mean + radius
    lam2 = mean - radius
    if c == 0.0:
        v1 = (1.0, 0.0) if a >= b else (0.0, 1.0)
    else:
        # the larger-norm candidate of the two algebraic forms is stabler
        cand_a = (c, lam1 - a)
        cand_b = (lam1 - b, c)
        v1 = cand_a if math.hypot(*cand_a) >= math.hypot(*cand_b) else cand_b
        norm = math.hypot(*v1)
        v1 = (v1[0] / norm, v1[1] / norm)
    if abs(v1[0]) >= abs(v1[1]):
        if v1[0] < 0.0:
            v1 = (-v1[0], -v1[1])
    elif v1[1] < 0.0:
        v1 = (-v1[0], -v1[1])
    return lam1, lam2, v1


def prf(data: Sequence[tuple[float, float]]) -> PrfReport:
    """Principal representative feature split of the two cost columns."""
    rows = [(float(a), float(b)) for a, b in data]
    if len(rows) < 3:
        raise ValidationError(f"need at least 3 rows, got {len(rows)}")
    c1 = [r[0] for r in rows]
    c2 = [r[1] for r in rows]
    v1, v2, cov = _covariance(c1, c2)
    if v1 == 0.0 and v2 == 0.0:
        raise ValidationError("zero covariance matrix: both columns are constant")
    # scale-free variance shares: normalize each column by its range
    r1 = max(c1) - min(c1)
    r2 = max(c2) - min(c2)
    s1 = 1.0 / r1 if r1 > 0.0 else 1.0
    s2 = 1.0 / r2 if r2 > 0.0 else 1.0
    lam1, lam2, _ = _eigen_2x2(v1 * s1 * s1, v2 * s2 * s2, cov * s1 * s2)
    lam2 = max(lam2, 0.0)
    trace = lam1 + lam2
    fractions = (lam1 / trace, lam2 / trace)
    # principal axes of the raw covariance, original coordinates
    _, _, first = _eigen_2x2(v1, v2, cov)
    second = (-first[1], first[0])
    if abs(second[0]) >= abs(second[1]):
        if second[0] < 0.0:
            second = (-second[0], -second[1])
    elif second[1] < 0.0:
        second = (-second[0], -second[1])
    return PrfReport(fractions=fractions, directions=(first, second))


def interaction_cell_means(design: Design22) -> InteractionPlot:
    """Cell means as two plot series, one per Factor-2 level."""
    means = design.cell_means()
    type1 = ((-1, means[(-1, -1)]), (1, means[(1, -1)]))
    type2 = ((-1, means[(-1, 1)]), (1, means[(1, 1)]))
    rise_type1 = type1[1][1] - type1[0][1]
    rise_type2 = type2[1][1] - type2[0][1]
    deviation = abs(rise_type2 - rise_type1)
    return InteractionPlot(
        type1_series=type1, type2_series=type2, parallel_deviation=deviation
    )


def interaction_matches_effects(design: Design22) -> bool:
    """Cross-check: parallel deviation equals 4*|qAB| for this design."""
    plot = interaction_cell_means(design)
    effects = estimate_effects(design)
    scale = max(1.0, *(abs(m) for m in design.cell_means().values()))
    return abs(plot.parallel_deviation - 4.0 * abs(effects.qab)) <= 1e-9 * scale
