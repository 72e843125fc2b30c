"""Command-line front end and deterministic report generation.

Subcommands: doe, fit, maximize, surface, generate, prf, report. Each one
ingests CSV data (or the packaged fixtures, for `report`), runs the
corresponding analysis modules, and emits a JSON report; surface and
interaction sections can additionally be written as plot-ready CSV files.

Determinism contract: identical inputs (files, config, seed) produce
byte-identical output. Reports therefore carry no timestamps, numbers
are serialized with Python's shortest round-trip repr, every input file
is identified by its SHA-256, and all randomness flows from one explicit
seed (the REVDOE_SEED environment variable overrides --seed).

Exit codes: 0 success, 2 validation failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .errors import NumericalError, ValidationError
from . import estimation
from . import factorial_doe as doe
from . import model_core
from . import stats_lab

SCHEMA_VERSION = 1

#: Reference elasticity pairs for the three returns regimes; these are the
#: parameters the bundled example datasets were synthesized from.
REGIME_ELASTICITIES: dict[str, tuple[float, float]] = {
    "IRS": (1.8, 0.1),
    "CRS": (0.9, 0.1),
    "DRS": (0.8, 0.1),
}

FIXTURE_CELLS = ("irs_cells", "crs_cells", "drs_cells_table", "drs_cells_equation")
FIXTURE_DATASETS = ("irs", "crs", "drs")

COMMANDS = ("doe", "fit", "maximize", "surface", "generate", "prf", "report")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run parameters (defaults, then config file, then flags)."""

    data: str | None = None
    regime: str | None = None
    alpha: float | None = None
    beta: float | None = None
    scale: float = 1.0
    unit_costs: tuple[float, ...] = (1.0, 1.0)
    budget: float = 23.5
    price: float = 1.0
    mode: str = "production"
    method: str = "ols"
    log_space: bool = False
    zero_intercept: bool = False
    train_fraction: float = 1.0
    seed: int = 1
    confidence: float = 0.9
    significance: float = 0.05
    costs: tuple[float, float] = (12.5, 11.0)
    alpha_grid: tuple[float, float, float] = (0.1, 0.9, 0.1)
    beta_grid: tuple[float, float, float] = (0.1, 0.9, 0.1)
    out: str | None = None
    format: str = "json"

    def __post_init__(self) -> None:
        if self.regime is not None:
            object.__setattr__(self, "regime", str(self.regime).upper())
            if self.regime not in REGIME_ELASTICITIES:
                raise ValidationError(
                    f"regime must be one of irs, crs, drs; got {self.regime!r}"
                )
        if self.mode not in ("production", "profit"):
            raise ValidationError(f"mode must be production or profit, got {self.mode!r}")
        if self.method not in ("ols", "qp", "mlr"):
            raise ValidationError(f"method must be ols, qp or mlr, got {self.method!r}")
        if self.format not in ("json", "csv"):
            raise ValidationError(f"format must be json or csv, got {self.format!r}")
        if self.data is not None and not self.data:
            raise ValidationError("data path must be non-empty")
        for name in ("alpha_grid", "beta_grid"):
            lo, hi, step = getattr(self, name)
            if step <= 0.0:
                raise ValidationError(f"{name} step must be positive, got {step}")
            if hi < lo:
                raise ValidationError(f"{name} has max {hi} below min {lo}")


# where the report goes must not change what the report says
_ECHO_EXCLUDED = {"out", "format"}


def _config_echo(config: RunConfig) -> dict[str, Any]:
    echo: dict[str, Any] = {}
    for field in fields(RunConfig):
        if field.name in _ECHO_EXCLUDED:
            continue
        value = getattr(config, field.name)
        echo[field.name] = list(value) if isinstance(value, tuple) else value
    return echo


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def parse_cost_csv(text: str, source: str, label: str | None = None) -> estimation.CostDataset:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ValidationError(f"{source}: file is empty")
    header = [h.strip() for h in rows[0]]
    required = ["server_cost", "power_cooling_cost"]
    for column in required:
        if column not in header:
            raise ValidationError(f"{source}: missing column {column}")
    known = set(required) | {"revenue"}
    for column in header:
        if column not in known:
            raise ValidationError(f"{source}: unknown column {column}")
    has_revenue = "revenue" in header
    idx = {name: header.index(name) for name in header}
    parsed: list[tuple[float, float, float | None]] = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(
                f"{source}: row {r} has {len(row)} fields, expected {len(header)}"
            )

        def number(column: str) -> float:
            cell = row[idx[column]].strip()
            try:
                return float(cell)
            except ValueError:
                raise ValidationError(
                    f"{source}: row {r}, column {column}: malformed number {cell!r}"
                ) from None

        revenue = number("revenue") if has_revenue else None
        parsed.append((number("server_cost"), number("power_cooling_cost"), revenue))
    if not parsed:
        raise ValidationError(f"{source}: no data rows")
    return estimation.CostDataset(rows=tuple(parsed), label=label)


def parse_design_csv(text: str, source: str) -> doe.Design22:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [r for r in rows if r and any(cell.strip() for cell in r)]
    if not rows:
        raise ValidationError(f"{source}: file is empty")
    header = [h.strip() for h in rows[0]]
    for column in ("x_A", "x_B", "revenue"):
        if column not in header:
            raise ValidationError(f"{source}: missing column {column}")
    for column in header:
        if column not in ("x_A", "x_B", "revenue"):
            raise ValidationError(f"{source}: unknown column {column}")
    idx = {name: header.index(name) for name in header}
    observations: list[tuple[int, int, float]] = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValidationError(
                f"{source}: row {r} has {len(row)} fields, expected {len(header)}"
            )

        def number(column: str) -> float:
            cell = row[idx[column]].strip()
            try:
                return float(cell)
            except ValueError:
                raise ValidationError(
                    f"{source}: row {r}, column {column}: malformed number {cell!r}"
                ) from None

        x_a = number("x_A")
        x_b = number("x_B")
        if x_a not in (-1.0, 1.0) or x_b not in (-1.0, 1.0):
            raise ValidationError(
                f"{source}: row {r}: cell codes must be -1 or 1, got ({x_a}, {x_b})"
            )
        observations.append((int(x_a), int(x_b), number("revenue")))
    return doe.design_from_observations(observations)


def ingest_csv(path: str | Path, label: str | None = None) -> estimation.CostDataset | doe.Design22:
    """Header-driven parse: design cells or a cost dataset."""
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"no such file: {p}")
    text = p.read_text(encoding="utf-8")
    first_line = text.lstrip("\ufeff").splitlines()[0] if text.strip() else ""
    header = {h.strip() for h in first_line.split(",")}
    if {"x_A", "x_B"} <= header:
        return parse_design_csv(text, str(p))
    return parse_cost_csv(text, str(p), label=label)


def write_cost_dataset_csv(dataset: estimation.CostDataset, path: Path) -> None:
    """Inverse of parse_cost_csv; repr keeps full float precision."""
    has_revenue = any(row[2] is not None for row in dataset.rows)
    lines = ["server_cost,power_cooling_cost" + (",revenue" if has_revenue else "")]
    for server, power, revenue in dataset.rows:
        cells = [repr(server), repr(power)]
        if has_revenue:
            cells.append("" if revenue is None else repr(revenue))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# stage serializers (plain dicts with stable key order)

def _effects_dict(e: doe.EffectEstimates) -> dict[str, float]:
    return {"q0": e.q0, "qA": e.qa, "qB": e.qb, "qAB": e.qab}


def _allocation_dict(a: doe.VariationAllocation) -> dict[str, Any]:
    return {
        "ssa": a.ssa,
        "ssb": a.ssb,
        "ssab": a.ssab,
        "sse": a.sse,
        "sst": a.sst,
        "fraction_a": a.fraction_a,
        "fraction_b": a.fraction_b,
        "fraction_ab": a.fraction_ab,
        "fraction_error": a.fraction_error,
        "degenerate": a.degenerate,
    }


def _interval_dict(ci: doe.EffectConfidenceIntervals) -> dict[str, Any]:
    names = ("q0", "qA", "qB", "qAB")
    return {
        "confidence": ci.confidence,
        "dof": ci.dof,
        "mse": ci.mse,
        "effect_std_error": ci.effect_std_error,
        "intervals": {
            name: {"lower": lo, "upper": hi, "includes_zero": inc}
            for name, (lo, hi), inc in zip(names, ci.intervals, ci.includes_zero)
        },
    }


def _fit_dict(fit: estimation.FitResult) -> dict[str, Any]:
    return {
        "intercept": fit.intercept,
        "elasticities": list(fit.elasticities),
        "roles": list(fit.roles),
        "rss": fit.rss,
        "active_set": list(fit.active_set),
        "diagnostics": {
            "ssy": fit.ssy,
            "ss0": fit.ss0,
            "sst": fit.sst,
            "sse": fit.sse,
            "ssr": fit.ssr,
            "r_squared": fit.r_squared,
            "r_multiple": fit.r_multiple,
            "degenerate_sst": fit.degenerate_sst,
        },
    }


def _interaction_dict(plot: stats_lab.InteractionPlot) -> dict[str, Any]:
    return {
        "type1_series": [list(point) for point in plot.type1_series],
        "type2_series": [list(point) for point in plot.type2_series],
        "parallel_deviation": plot.parallel_deviation,
    }


def _gof_dict(report: stats_lab.GofReport) -> dict[str, Any]:
    return {
        "statistic": report.statistic,
        "dof": report.dof,
        "significance": report.significance,
        "critical_value": report.critical_value,
        "h0_rejected": report.h0_rejected,
        "bin_edges": list(report.bin_edges),
        "counts": list(report.counts),
        "expected_per_bin": report.expected_per_bin,
    }


def _prf_dict(report: stats_lab.PrfReport) -> dict[str, Any]:
    return {
        "fractions": list(report.fractions),
        "directions": [list(d) for d in report.directions],
    }


def _grid_values(spec: tuple[float, float, float]) -> tuple[float, ...]:
    lo, hi, step = spec
    count = int(round((hi - lo) / step)) + 1
    values = tuple(lo + k * step for k in range(count))
    return tuple(v for v in values if v <= hi + 0.5 * step)


def _surface_section(
    costs: tuple[float, float],
    alpha_grid: tuple[float, float, float],
    beta_grid: tuple[float, float, float],
    regime: model_core.Regime | None,
) -> dict[str, Any]:
    bundle = model_core.FactorBundle(costs)
    alphas = _grid_values(alpha_grid)
    betas = _grid_values(beta_grid)
    full = model_core.revenue_surface(bundle, alphas, betas, regime_filter=None)
    filtered = model_core.revenue_surface(bundle, alphas, betas, regime_filter=regime)
    in_regime = sum(
        1 for row in filtered.cells for cell in row if cell is not None
    )
    return {
        "costs": list(costs),
        "regime_filter": regime.value if regime is not None else None,
        "alphas": list(alphas),
        "betas": list(betas),
        "cells": [list(row) for row in filtered.cells],
        "all_revenues": [list(row) for row in full.cells],
        "cell_count": len(alphas) * len(betas),
        "in_regime_cells": in_regime,
        "argmax": {
            "alpha": filtered.argmax_alpha,
            "beta": filtered.argmax_beta,
            "revenue": filtered.argmax_revenue,
            "index": list(filtered.argmax_index),
        },
    }


def emit_plot_data(section: dict[str, Any], kind: str, path: Path) -> None:
    """Write a report section as a plot-ready CSV file."""
    if kind == "surface":
        lines = ["alpha,beta,revenue,in_regime"]
        alphas = section["alphas"]
        betas = section["betas"]
        for i, a in enumerate(alphas):
            for j, b in enumerate(betas):
                revenue = section["all_revenues"][i][j]
                flag = "true" if section["cells"][i][j] is not None else "false"
                lines.append(f"{a!r},{b!r},{revenue!r},{flag}")
    elif kind == "interaction":
        lines = ["factor2_level,x_A,mean_revenue"]
        for name, series in (("type1", section["type1_series"]), ("type2", section["type2_series"])):
            for x_a, mean in series:
                lines.append(f"{name},{x_a},{mean!r}")
    else:
        raise ValidationError(f"no plot emitter for section kind {kind!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# pipelines

def _fixture_bytes(name: str) -> bytes:
    return (resources.files("revdoe") / "fixtures" / f"{name}.csv").read_bytes()


def _model_from_config(config: RunConfig, require: bool = True) -> model_core.CobbDouglasModel | None:
    if config.alpha is not None or config.beta is not None:
        if config.alpha is None or config.beta is None:
            raise ValidationError("--alpha and --beta must be given together")
        return model_core.CobbDouglasModel(config.scale, (config.alpha, config.beta))
    if config.regime is not None:
        return model_core.CobbDouglasModel(config.scale, REGIME_ELASTICITIES[config.regime])
    if require:
        raise ValidationError("a model is needed: pass --alpha/--beta or --regime")
    return None


def _doe_stage(design: doe.Design22, config: RunConfig) -> dict[str, Any]:
    effects = doe.estimate_effects(design)
    allocation = doe.allocate_variation(effects, design)
    stage: dict[str, Any] = {
        "replicates": design.replicates,
        "effects": _effects_dict(effects),
        "allocation": _allocation_dict(allocation),
        "interaction": _interaction_dict(stats_lab.interaction_cell_means(design)),
    }
    if design.replicates >= 2:
        replicated = doe.analyze_replicated(design)
        stage["mse"] = replicated.mse
        stage["confidence_intervals"] = _interval_dict(
            doe.effect_confidence_intervals(design, config.confidence)
        )
    return stage


def _fit_stage(
    dataset: estimation.CostDataset, config: RunConfig, warnings: list[str]
) -> dict[str, Any]:
    if config.method == "ols":
        matrix = (
            estimation.log_linearize(dataset)
            if config.log_space
            else estimation._raw_matrix(dataset, with_intercept=True)
        )
        fit = estimation.ols(matrix)
    elif config.method == "qp":
        # the constrained fit is defined on the log-linearized system
        fit = estimation.constrained_fit(dataset)
    else:
        result = estimation.mlr(
            dataset,
            log_space=config.log_space,
            zero_intercept=config.zero_intercept,
            train_fraction=config.train_fraction,
        )
        stage = {"method": "mlr", "fit": _fit_dict(result.fit)}
        stage["predictions"] = [
            {"row": p.row_index + 1, "predicted": p.predicted, "observed": p.observed}
            for p in result.predictions
        ]
        _warn_regime_mismatch(result.fit, config, warnings)
        return stage
    _warn_regime_mismatch(fit, config, warnings)
    return {"method": config.method, "fit": _fit_dict(fit)}


def _warn_regime_mismatch(
    fit: estimation.FitResult, config: RunConfig, warnings: list[str]
) -> None:
    if config.regime is None:
        return
    fitted = model_core.classify_sum(sum(fit.elasticities)).value
    if fitted != config.regime:
        warnings.append(
            f"declared regime {config.regime} but the fitted elasticity sum "
            f"{sum(fit.elasticities):.6f} classifies as {fitted}"
        )


def _maximize_stage(config: RunConfig) -> dict[str, Any]:
    model = _model_from_config(config)
    assert model is not None
    if config.mode == "production":
        budget = model_core.BudgetSpec(unit_costs=config.unit_costs, budget=config.budget)
        bundle = model_core.maximize_production(model, budget)
        revenue = model_core.evaluate(model, bundle)
        return {
            "mode": "production",
            "scale": model.scale,
            "elasticities": list(model.elasticities),
            "unit_costs": list(budget.unit_costs),
            "budget": budget.budget,
            "bundle": list(bundle.quantities),
            "spend": sum(w * q for w, q in zip(budget.unit_costs, bundle.quantities)),
            "revenue": revenue,
        }
    optimum = model_core.maximize_profit(model, config.price, config.unit_costs)
    return {
        "mode": "profit",
        "scale": model.scale,
        "elasticities": list(model.elasticities),
        "unit_costs": list(config.unit_costs),
        "price": config.price,
        "bundle": list(optimum.bundle.quantities),
        "revenue": optimum.revenue,
        "profit": optimum.profit,
    }


def _generate_stage(
    dataset: estimation.CostDataset, config: RunConfig, warnings: list[str]
) -> dict[str, Any]:
    model = _model_from_config(config)
    assert model is not None
    n = len(dataset)
    server_spec = stats_lab.fit_gaussian([row[0] for row in dataset.rows])
    power_spec = stats_lab.fit_gaussian([row[1] for row in dataset.rows])
    # one derived stream per column keeps the draws independent and replayable
    server_samples = stats_lab.generate_gaussian(server_spec, n, config.seed)
    power_samples = stats_lab.generate_gaussian(power_spec, n, config.seed + 1)
    server_gof = stats_lab.chi_square_gof(server_samples, server_spec, config.significance)
    power_gof = stats_lab.chi_square_gof(power_samples, power_spec, config.significance)
    generated = []
    skipped = 0
    for s, p in zip(server_samples, power_samples):
        if s > 0.0 and p > 0.0:
            revenue = model_core.evaluate(model, model_core.FactorBundle((s, p)))
        else:
            revenue = None
            skipped += 1
        generated.append({"server_cost": s, "power_cooling_cost": p, "revenue": revenue})
    if skipped:
        warnings.append(
            f"{skipped} generated rows had a non-positive cost; revenue left null"
        )
    return {
        "seed": config.seed,
        "n": n,
        "server_gaussian": {"mean": server_spec.mean, "std_dev": server_spec.std_dev},
        "power_gaussian": {"mean": power_spec.mean, "std_dev": power_spec.std_dev},
        "server_gof": _gof_dict(server_gof),
        "power_gof": _gof_dict(power_gof),
        "elasticities": list(model.elasticities),
        "rows": generated,
    }


def _dataset_required(config: RunConfig, command: str) -> tuple[estimation.CostDataset, bytes]:
    if config.data is None:
        raise ValidationError(f"{command} needs --data pointing at a cost CSV")
    raw = Path(config.data).read_bytes() if Path(config.data).is_file() else None
    if raw is None:
        raise ValidationError(f"no such file: {config.data}")
    parsed = ingest_csv(config.data, label=config.regime)
    if not isinstance(parsed, estimation.CostDataset):
        raise ValidationError(
            f"{command} needs a cost dataset CSV (server_cost, power_cooling_cost)"
        )
    return parsed, raw


def run_pipeline(config: RunConfig, command: str) -> dict[str, Any]:
    """Build the full report dict for one subcommand."""
    if command not in COMMANDS:
        raise ValidationError(f"unknown subcommand {command!r}")
    warnings: list[str] = []
    inputs: dict[str, dict[str, str]] = {}
    results: dict[str, Any] = {}

    if command == "doe":
        if config.data is None:
            raise ValidationError("doe needs --data pointing at a design CSV")
        path = Path(config.data)
        if not path.is_file():
            raise ValidationError(f"no such file: {config.data}")
        parsed = ingest_csv(path)
        if not isinstance(parsed, doe.Design22):
            raise ValidationError("doe needs a design CSV with columns x_A, x_B, revenue")
        inputs[path.name] = {"path": str(path), "sha256": _sha256(path.read_bytes())}
        results["doe"] = _doe_stage(parsed, config)
    elif command == "fit":
        dataset, raw = _dataset_required(config, "fit")
        inputs[Path(config.data).name] = {"path": config.data, "sha256": _sha256(raw)}
        results["fit"] = _fit_stage(dataset, config, warnings)
    elif command == "maximize":
        results["maximize"] = _maximize_stage(config)
    elif command == "surface":
        regime = model_core.Regime(config.regime) if config.regime else None
        results["surface"] = _surface_section(
            config.costs, config.alpha_grid, config.beta_grid, regime
        )
    elif command == "generate":
        dataset, raw = _dataset_required(config, "generate")
        inputs[Path(config.data).name] = {"path": config.data, "sha256": _sha256(raw)}
        results["generate"] = _generate_stage(dataset, config, warnings)
    elif command == "prf":
        dataset, raw = _dataset_required(config, "prf")
        inputs[Path(config.data).name] = {"path": config.data, "sha256": _sha256(raw)}
        report = stats_lab.prf([(row[0], row[1]) for row in dataset.rows])
        results["prf"] = _prf_dict(report)
    else:
        results.update(_report_stages(config, inputs, warnings))

    return {
        "schema_version": SCHEMA_VERSION,
        "tool": "revdoe",
        "tool_version": __version__,
        "command": command,
        "config": _config_echo(config),
        "inputs": inputs,
        "warnings": warnings,
        "results": results,
    }


def _report_stages(
    config: RunConfig, inputs: dict[str, dict[str, str]], warnings: list[str]
) -> dict[str, Any]:
    """Every analysis stage, run over the packaged fixtures."""
    if config.data is not None:
        raise ValidationError("report runs on the packaged fixtures; --data is not accepted")
    designs: dict[str, doe.Design22] = {}
    datasets: dict[str, estimation.CostDataset] = {}
    for name in FIXTURE_CELLS:
        raw = _fixture_bytes(name)
        inputs[f"{name}.csv"] = {"path": f"fixtures/{name}.csv", "sha256": _sha256(raw)}
        designs[name] = parse_design_csv(raw.decode("utf-8"), f"fixtures/{name}.csv")
    for short in FIXTURE_DATASETS:
        name = f"{short}_generated"
        raw = _fixture_bytes(name)
        inputs[f"{name}.csv"] = {"path": f"fixtures/{name}.csv", "sha256": _sha256(raw)}
        datasets[short] = parse_cost_csv(
            raw.decode("utf-8"), f"fixtures/{name}.csv", label=short.upper()
        )

    results: dict[str, Any] = {}
    results["doe"] = {name: _doe_stage(design, config) for name, design in designs.items()}

    fits: dict[str, Any] = {}
    model_check: dict[str, Any] = {}
    for short, dataset in datasets.items():
        regime = short.upper()
        log_fit = estimation.ols(estimation.log_linearize(dataset))
        qp_fit = estimation.constrained_fit(dataset)
        mlr_fit = estimation.mlr(dataset, log_space=True, zero_intercept=True,
                                 train_fraction=config.train_fraction)
        fits[short] = {
            "ols": _fit_dict(log_fit),
            "qp": _fit_dict(qp_fit),
            "mlr": _fit_dict(mlr_fit.fit),
        }
        model = model_core.CobbDouglasModel(1.0, REGIME_ELASTICITIES[regime])
        deviation = max(
            abs(model_core.evaluate(model, model_core.FactorBundle((s, p))) - r)
            for s, p, r in dataset.rows
        )
        model_check[short] = {
            "elasticities": list(REGIME_ELASTICITIES[regime]),
            "max_abs_deviation": deviation,
        }
    results["fits"] = fits
    results["model_check"] = model_check

    results["surface"] = {
        "irs": _surface_section(config.costs, (0.1, 1.9, 0.1), (0.1, 1.9, 0.1), model_core.Regime.IRS),
        "crs": _surface_section(config.costs, config.alpha_grid, config.beta_grid, model_core.Regime.CRS),
        "drs": _surface_section(config.costs, config.alpha_grid, config.beta_grid, model_core.Regime.DRS),
    }

    generate: dict[str, Any] = {}
    prf_stage: dict[str, Any] = {}
    for short, dataset in datasets.items():
        stage_config = RunConfig(
            regime=short.upper(), seed=config.seed, significance=config.significance
        )
        generate[short] = _generate_stage(dataset, stage_config, warnings)
        prf_stage[short] = _prf_dict(stats_lab.prf([(r[0], r[1]) for r in dataset.rows]))
    results["generate"] = generate
    results["prf"] = prf_stage

    production: dict[str, Any] = {}
    for short in FIXTURE_DATASETS:
        stage_config = RunConfig(
            regime=short.upper(),
            unit_costs=config.unit_costs,
            budget=config.budget,
            mode="production",
        )
        production[short] = _maximize_stage(stage_config)
    profit_config = RunConfig(
        regime="DRS", unit_costs=config.unit_costs, price=config.price, mode="profit"
    )
    results["maximize"] = {"production": production, "profit": {"drs": _maximize_stage(profit_config)}}
    return results


# ---------------------------------------------------------------------------
# argument handling

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revdoe",
        description="Cobb-Douglas revenue modeling and 2x2 factorial analysis",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--data", help="input CSV path")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="PRNG seed (REVDOE_SEED overrides)")
    parser.add_argument("--alpha", type=float, help="elasticity of the server factor")
    parser.add_argument("--beta", type=float, help="elasticity of the power-cooling factor")
    parser.add_argument("--regime", choices=["irs", "crs", "drs"], help="returns regime label")
    parser.add_argument("--method", choices=["ols", "qp", "mlr"], help="fit method")
    parser.add_argument("--mode", choices=["production", "profit"], help="maximize mode")
    parser.add_argument("--log", action="store_true", default=None,
                        help="fit in log space")
    parser.add_argument("--zero-intercept", action="store_true", default=None,
                        help="drop the intercept column (mlr)")
    parser.add_argument("--confidence", type=float, help="confidence level for effect intervals")
    parser.add_argument("--out", help="output directory")
    parser.add_argument("--format", choices=["json", "csv"], help="output format")
    return parser


_CONFIG_KEYS = {f.name for f in fields(RunConfig)}
_TUPLE_KEYS = {"unit_costs", "costs", "alpha_grid", "beta_grid"}


def resolve_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file, command-line flags and the environment."""
    values: dict[str, Any] = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ValidationError(f"no such config file: {args.config}")
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{args.config}: invalid JSON ({exc})") from None
        if not isinstance(loaded, dict):
            raise ValidationError(f"{args.config}: config must be a JSON object")
        for key, value in loaded.items():
            if key not in _CONFIG_KEYS:
                raise ValidationError(f"{args.config}: unknown config key {key!r}")
            values[key] = tuple(value) if key in _TUPLE_KEYS else value
    flag_map = {
        "data": args.data,
        "seed": args.seed,
        "alpha": args.alpha,
        "beta": args.beta,
        "regime": args.regime,
        "method": args.method,
        "mode": args.mode,
        "log_space": args.log,
        "zero_intercept": args.zero_intercept,
        "confidence": args.confidence,
        "out": args.out,
        "format": args.format,
    }
    for key, value in flag_map.items():
        if value is not None:
            values[key] = value
    env_seed = os.environ.get("REVDOE_SEED")
    if env_seed is not None:
        try:
            values["seed"] = int(env_seed)
        except ValueError:
            raise ValidationError(f"REVDOE_SEED must be an integer, got {env_seed!r}") from None
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ValidationError(f"bad configuration: {exc}") from None


def _write_outputs(report: dict[str, Any], config: RunConfig) -> str:
    payload = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if config.out is None:
        return payload
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(payload, encoding="utf-8")
    if config.format == "csv":
        _write_plot_csvs(report, out_dir)
    return payload


def _write_plot_csvs(report: dict[str, Any], out_dir: Path) -> None:
    results = report["results"]
    if "surface" in results:
        section = results["surface"]
        if "alphas" in section:
            emit_plot_data(section, "surface", out_dir / "surface.csv")
        else:
            for name, sub in section.items():
                emit_plot_data(sub, "surface", out_dir / f"surface_{name}.csv")
    if "doe" in results:
        section = results["doe"]
        if "interaction" in section:
            emit_plot_data(section["interaction"], "interaction", out_dir / "interaction.csv")
        else:
            for name, sub in section.items():
                emit_plot_data(sub["interaction"], "interaction", out_dir / f"interaction_{name}.csv")
    if "generate" in results:
        section = results["generate"]
        per_dataset = section if "rows" not in section else {"data": section}
        for name, sub in per_dataset.items():
            rows = tuple(
                (r["server_cost"], r["power_cooling_cost"], r["revenue"]) for r in sub["rows"]
            )
            try:
                dataset = estimation.CostDataset(rows=rows)
            except ValidationError:
                continue  # non-positive generated cost; the JSON report carries it
            write_cost_dataset_csv(dataset, out_dir / f"generated_{name}.csv")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = resolve_config(args)
        report = run_pipeline(config, args.command)
        payload = _write_outputs(report, config)
    except ValidationError as exc:
        print(f"revdoe: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"revdoe: numerical failure: {exc}", file=sys.stderr)
        return 3
    if config.out is None:
        sys.stdout.write(payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
