"""Seeded Monte Carlo study of the four overlap estimators.

For every grid cell (r, n) the engine draws ``replications`` independent
pairs of exponential samples (means theta1 = r * theta2 and theta2),
computes the four plug-in estimators, and aggregates empirical bias, MSE,
bias/sigma and the Monte Carlo standard error of the bias.

Determinism: each (cell, replication, population) triple gets its own
counter-based substream keyed by the config seed and a 64-bit mix of the
cell's parameter values, so results are bit-identical across runs, thread
counts and grid compositions, and ``run_cell`` reproduces exactly the cell
that ``run_study`` would produce.

``compare_to_reference`` grades a default-grid table against the embedded
reference dataset at tolerance max(0.01, 3 * mc_se) per cell;
``theoretical_vs_empirical`` tabulates the closed-form variance and both
bias approximations against the empirical moments and records which bias
version lands closer.
"""

from __future__ import annotations

import csv
import json
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import estimation, measures
from .distributions import SeededStream, sample_exponential
from .estimation import InsufficientSampleSize
from .measures import COEFFICIENTS
from .reference import (
    EXCLUDED_CELLS,
    REFERENCE_CELLS,
    REFERENCE_R_VALUES,
    REFERENCE_SAMPLE_SIZES,
)

DEFAULT_SEED = 123456789

#: Absolute floor of the reproduction tolerance max(floor, 3 * mc_se).
TOLERANCE_FLOOR = 0.01

#: Required fraction of non-excluded cells within tolerance.
PASS_FRACTION_REQUIRED = 0.90


class ConfigError(ValueError):
    """Invalid simulation configuration."""


class GridMismatch(ValueError):
    """The simulated grid does not match the reference grid."""


@dataclass(frozen=True)
class SimConfig:
    """Study design: grid, replication count, seed and sampling anchors.

    theta2 anchors the scale (theta1 = r * theta2); the coefficients and the
    estimator laws depend only on the ratio.  With ``equal_sample_sizes``
    (the default) every cell uses n1 = n2 = n; otherwise ``unequal_pairs``
    supplies explicit (n1, n2) pairs in place of ``sample_sizes``.
    """

    r_values: tuple[float, ...] = REFERENCE_R_VALUES
    sample_sizes: tuple[int, ...] = REFERENCE_SAMPLE_SIZES
    replications: int = 1000
    seed: int = DEFAULT_SEED
    theta2: float = 1.0
    equal_sample_sizes: bool = True
    unequal_pairs: tuple[tuple[int, int], ...] | None = None
    lambda_uses_corrected_ratio: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "r_values", tuple(float(r) for r in self.r_values))
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if self.unequal_pairs is not None:
            object.__setattr__(self, "unequal_pairs",
                               tuple((int(a), int(b)) for a, b in self.unequal_pairs))
        if self.replications < 2:
            raise ConfigError(f"replications must be >= 2, got {self.replications}")
        if not self.r_values or any(not (math.isfinite(r) and r > 0) for r in self.r_values):
            raise ConfigError("r_values must be nonempty and strictly positive")
        if not (math.isfinite(self.theta2) and self.theta2 > 0):
            raise ConfigError(f"theta2 must be strictly positive, got {self.theta2}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.equal_sample_sizes:
            if not self.sample_sizes or any(n < 3 for n in self.sample_sizes):
                raise ConfigError("sample_sizes must be nonempty with every n >= 3")
        else:
            if not self.unequal_pairs:
                raise ConfigError("unequal_pairs is required when equal_sample_sizes is false")
            if any(n1 < 1 or n2 < 3 for n1, n2 in self.unequal_pairs):
                raise ConfigError("unequal pairs need n1 >= 1 and n2 >= 3")

    def cells(self) -> list[tuple[float, int, int]]:
        if self.equal_sample_sizes:
            pairs = [(n, n) for n in self.sample_sizes]
        else:
            pairs = list(self.unequal_pairs)
        return [(r, n1, n2) for r in self.r_values for n1, n2 in pairs]

    def to_dict(self) -> dict:
        return {
            "r_values": list(self.r_values),
            "sample_sizes": list(self.sample_sizes),
            "replications": self.replications,
            "seed": self.seed,
            "theta2": self.theta2,
            "equal_sample_sizes": self.equal_sample_sizes,
            "unequal_pairs": [list(p) for p in self.unequal_pairs] if self.unequal_pairs else None,
            "lambda_uses_corrected_ratio": self.lambda_uses_corrected_ratio,
        }


@dataclass(frozen=True)
class CellStats:
    """Empirical sampling moments of one estimator in one cell."""

    true_value: float
    mean_estimate: float
    bias: float
    variance: float
    std: float
    mse: float
    ratio_bias_sigma: float
    mc_se: float

    def to_dict(self) -> dict:
        return {
            "true_value": self.true_value,
            "mean_estimate": self.mean_estimate,
            "bias": self.bias,
            "variance": self.variance,
            "std": self.std,
            "mse": self.mse,
            "ratio_bias_sigma": self.ratio_bias_sigma,
            "mc_se": self.mc_se,
        }


@dataclass(frozen=True)
class SimCell:
    r: float
    n1: int
    n2: int
    stats: dict[str, CellStats]

    @property
    def n(self) -> int:
        return self.n1


@dataclass(frozen=True)
class SimulationTable:
    config: SimConfig
    cells: list[SimCell] = field(repr=False)

    def cell(self, r: float, n1: int, n2: int | None = None) -> SimCell:
        n2 = n1 if n2 is None else n2
        for cell in self.cells:
            if math.isclose(cell.r, r, rel_tol=1e-12) and cell.n1 == n1 and cell.n2 == n2:
                return cell
        raise KeyError(f"no cell (r={r}, n1={n1}, n2={n2}) in table")


_MASK64 = 0xFFFFFFFFFFFFFFFF


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def _float_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


def _cell_stream_id(r: float, n1: int, n2: int, replication: int, population: int) -> int:
    """64-bit substream selector mixed from the cell's identifying values."""
    h = 0
    for part in (_float_bits(r), n1, n2, replication, population):
        h = _splitmix64(h ^ (int(part) & _MASK64))
    return h


def _draw_means(cfg: SimConfig, r: float, n1: int, n2: int) -> tuple[np.ndarray, np.ndarray]:
    """Sample means of every replication's two samples, one substream each."""
    theta1 = r * cfg.theta2
    m1 = np.empty(cfg.replications)
    m2 = np.empty(cfg.replications)
    for rep in range(cfg.replications):
        s1 = SeededStream(cfg.seed, _cell_stream_id(r, n1, n2, rep, 0))
        s2 = SeededStream(cfg.seed, _cell_stream_id(r, n1, n2, rep, 1))
        m1[rep] = sample_exponential(s1, theta1, n1).mean()
        m2[rep] = sample_exponential(s2, cfg.theta2, n2).mean()
    return m1, m2


def run_cell(cfg: SimConfig, r: float, n: int, n2: int | None = None) -> SimCell:
    """Simulate one grid cell.

    Sampling uses substreams keyed only by (seed, r, n1, n2, replication,
    population), so the same cell simulated standalone or inside run_study
    yields identical results.
    """
    n1 = int(n)
    n2 = n1 if n2 is None else int(n2)
    if n2 <= 2:
        raise InsufficientSampleSize(f"cells need n2 > 2, got n2={n2}")
    if not (math.isfinite(r) and r > 0):
        raise ConfigError(f"r must be strictly positive, got {r!r}")

    m1, m2 = _draw_means(cfg, r, n1, n2)
    r_hat = m1 / m2
    r_star = r_hat * (n2 - 1.0) / n2
    r_for_kl = r_star if cfg.lambda_uses_corrected_ratio else r_hat

    estimates = {
        "delta": measures.weitzman_delta(r_star),
        "rho": measures.matusita_rho(r_star),
        "lambda": measures.morisita_lambda(r_star),
        "kl_lambda": measures.kl_lambda(r_for_kl),
    }
    truth = measures.overlap_quartet(r).as_dict()

    stats: dict[str, CellStats] = {}
    for key in COEFFICIENTS:
        est = estimates[key]
        true_value = truth[key]
        mean_estimate = float(np.mean(est))
        bias = mean_estimate - true_value
        variance = float(np.mean((est - mean_estimate) ** 2))
        std = math.sqrt(variance)
        mse = float(np.mean((est - true_value) ** 2))
        stats[key] = CellStats(
            true_value=true_value,
            mean_estimate=mean_estimate,
            bias=bias,
            variance=variance,
            std=std,
            mse=mse,
            ratio_bias_sigma=bias / std if std > 0 else math.nan,
            mc_se=std / math.sqrt(cfg.replications),
        )
    return SimCell(r=r, n1=n1, n2=n2, stats=stats)


def run_study(cfg: SimConfig) -> SimulationTable:
    """Simulate every cell of the configured grid."""
    cells = [run_cell(cfg, r, n1, n2) for r, n1, n2 in cfg.cells()]
    return SimulationTable(config=cfg, cells=cells)


# ---------------------------------------------------------------------------
# Comparison against the embedded reference dataset
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonEntry:
    r: float
    n: int
    coefficient: str
    metric: str          # "bias" or "mse"
    empirical: float
    reference: float
    abs_diff: float
    tolerance: float
    passed: bool
    excluded: bool

    def to_dict(self) -> dict:
        return {
            "r": self.r, "n": self.n, "coefficient": self.coefficient,
            "metric": self.metric, "empirical": self.empirical,
            "reference": self.reference, "abs_diff": self.abs_diff,
            "tolerance": self.tolerance, "passed": self.passed,
            "excluded": self.excluded,
        }


@dataclass(frozen=True)
class ComparisonReport:
    entries: list[ComparisonEntry] = field(repr=False)
    n_compared: int = 0
    n_passed: int = 0
    n_excluded: int = 0
    pass_fraction: float = 0.0
    overall_pass: bool = False

    def to_dict(self) -> dict:
        return {
            "n_compared": self.n_compared,
            "n_passed": self.n_passed,
            "n_excluded": self.n_excluded,
            "pass_fraction": self.pass_fraction,
            "overall_pass": self.overall_pass,
            "required_fraction": PASS_FRACTION_REQUIRED,
            "entries": [e.to_dict() for e in self.entries],
        }


def _is_reference_grid(cfg: SimConfig) -> bool:
    if not cfg.equal_sample_sizes:
        return False
    if len(cfg.r_values) != len(REFERENCE_R_VALUES):
        return False
    if any(not math.isclose(a, b, rel_tol=1e-12)
           for a, b in zip(sorted(cfg.r_values), REFERENCE_R_VALUES)):
        return False
    return tuple(sorted(cfg.sample_sizes)) == REFERENCE_SAMPLE_SIZES


def compare_to_reference(table: SimulationTable) -> ComparisonReport:
    """Grade a default-grid study against the embedded reference values.

    Per cell, coefficient and metric (bias, mse) the check is
    |empirical - reference| <= max(0.01, 3 * mc_se); excluded cells are
    reported but not graded.  Raises GridMismatch off the reference grid.
    """
    if not _is_reference_grid(table.config):
        raise GridMismatch(
            f"reference comparison needs the grid {REFERENCE_R_VALUES} x "
            f"{REFERENCE_SAMPLE_SIZES} with equal sample sizes")

    entries: list[ComparisonEntry] = []
    n_compared = n_passed = n_excluded = 0
    for cell in table.cells:
        ref_key = next(k for k in REFERENCE_CELLS
                       if math.isclose(k[0], cell.r, rel_tol=1e-12) and k[1] == cell.n1)
        for coeff in COEFFICIENTS:
            stats = cell.stats[coeff]
            ref_bias, ref_mse, _ = REFERENCE_CELLS[ref_key][coeff]
            tolerance = max(TOLERANCE_FLOOR, 3.0 * stats.mc_se)
            for metric, empirical, reference in (
                ("bias", stats.bias, ref_bias),
                ("mse", stats.mse, ref_mse),
            ):
                excluded = (ref_key[0], ref_key[1], coeff, metric) in EXCLUDED_CELLS
                diff = abs(empirical - reference)
                passed = diff <= tolerance
                entries.append(ComparisonEntry(
                    r=cell.r, n=cell.n1, coefficient=coeff, metric=metric,
                    empirical=empirical, reference=reference, abs_diff=diff,
                    tolerance=tolerance, passed=passed, excluded=excluded))
                if excluded:
                    n_excluded += 1
                else:
                    n_compared += 1
                    n_passed += passed

    fraction = n_passed / n_compared if n_compared else 0.0
    return ComparisonReport(entries=entries, n_compared=n_compared,
                            n_passed=n_passed, n_excluded=n_excluded,
                            pass_fraction=fraction,
                            overall_pass=fraction >= PASS_FRACTION_REQUIRED)


# ---------------------------------------------------------------------------
# Theoretical approximations vs empirical moments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TheoryComparisonReport:
    """Closed-form variance and both bias versions against simulation."""

    entries: list[dict] = field(repr=False)
    closer_counts: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"entries": list(self.entries),
                "closer_counts": {k: dict(v) for k, v in self.closer_counts.items()}}


def theoretical_vs_empirical(cfg: SimConfig,
                             table: SimulationTable | None = None) -> TheoryComparisonReport:
    """Tabulate approximation formulas against empirical moments per cell.

    For each coefficient the report records the first-order variance formula,
    the published bias formula, the finite-difference Taylor bias, and which
    bias version is closer to the empirical bias ("formula", "oracle" or
    "tie").  Pass a precomputed table to avoid re-running the study.
    """
    if table is None:
        table = run_study(cfg)
    entries: list[dict] = []
    closer_counts: dict[str, dict[str, int]] = {
        key: {"formula": 0, "oracle": 0, "tie": 0} for key in COEFFICIENTS}
    for cell in table.cells:
        variances = estimation.taylor_variances(cell.r, cell.n1, cell.n2)
        biases = estimation.taylor_biases(cell.r, cell.n1, cell.n2)
        oracle = estimation.taylor_bias_oracle(cell.r, cell.n1, cell.n2)
        for key in COEFFICIENTS:
            stats = cell.stats[key]
            var_th = variances[key]
            var_rel_err = (abs(var_th - stats.variance) / stats.variance
                           if stats.variance > 0 else math.nan)
            d_formula = abs(biases[key] - stats.bias)
            d_oracle = abs(oracle[key] - stats.bias)
            if math.isnan(d_formula) or math.isnan(d_oracle):
                closer = "tie"
            elif math.isclose(d_formula, d_oracle, rel_tol=1e-9, abs_tol=1e-15):
                closer = "tie"
            else:
                closer = "formula" if d_formula < d_oracle else "oracle"
            closer_counts[key][closer] += 1
            entries.append({
                "r": cell.r, "n1": cell.n1, "n2": cell.n2, "coefficient": key,
                "empirical_bias": stats.bias,
                "empirical_variance": stats.variance,
                "mc_se": stats.mc_se,
                "variance_formula": var_th,
                "variance_rel_err": var_rel_err,
                "bias_formula": biases[key],
                "bias_oracle": oracle[key],
                "closer": closer,
            })
    return TheoryComparisonReport(entries=entries, closer_counts=closer_counts)


# ---------------------------------------------------------------------------
# File emission (schema-stable CSV and JSON)
# ---------------------------------------------------------------------------

CELLS_CSV_COLUMNS = ("r", "n", "coefficient", "bias", "mse", "ratio", "mc_se",
                     "reference_bias", "reference_mse", "pass")

FIGURE_FILES = {
    "bias": "bias_vs_r.csv",
    "std": "std_vs_r.csv",
    "mse": "mse_vs_r.csv",
}


def _fmt(value: float) -> str:
    """Full-precision float text; round-trips exactly through float()."""
    return repr(float(value))


def write_cells_csv(table: SimulationTable, comparison: ComparisonReport | None,
                    path: str | Path) -> Path:
    """One row per cell x coefficient, full precision, fixed column order."""
    verdicts: dict[tuple[float, int, str], tuple[float, float, bool]] = {}
    if comparison is not None:
        grouped: dict[tuple[float, int, str], dict[str, ComparisonEntry]] = {}
        for e in comparison.entries:
            grouped.setdefault((e.r, e.n, e.coefficient), {})[e.metric] = e
        for key, metrics in grouped.items():
            graded = [m for m in metrics.values() if not m.excluded]
            verdicts[key] = (
                metrics["bias"].reference,
                metrics["mse"].reference,
                all(m.passed for m in graded),
            )
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CELLS_CSV_COLUMNS)
        for cell in table.cells:
            for coeff in COEFFICIENTS:
                s = cell.stats[coeff]
                ref = verdicts.get((cell.r, cell.n1, coeff))
                writer.writerow([
                    _fmt(cell.r), cell.n1, coeff,
                    _fmt(s.bias), _fmt(s.mse), _fmt(s.ratio_bias_sigma), _fmt(s.mc_se),
                    _fmt(ref[0]) if ref else "",
                    _fmt(ref[1]) if ref else "",
                    ("true" if ref[2] else "false") if ref else "",
                ])
    return path


def write_figure_csvs(table: SimulationTable, out_dir: str | Path) -> list[Path]:
    """Plot-ready series: bias, standard deviation and MSE versus r, per n."""
    out_dir = Path(out_dir)
    paths = []
    for metric, filename in FIGURE_FILES.items():
        path = out_dir / filename
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(("r", "n", "coefficient", metric))
            for cell in table.cells:
                for coeff in COEFFICIENTS:
                    s = cell.stats[coeff]
                    value = {"bias": s.bias, "std": s.std, "mse": s.mse}[metric]
                    writer.writerow([_fmt(cell.r), cell.n1, coeff, _fmt(value)])
        paths.append(path)
    return paths


def write_summary_json(table: SimulationTable, comparison: ComparisonReport | None,
                       theory: TheoryComparisonReport | None,
                       path: str | Path) -> Path:
    path = Path(path)
    payload = {
        "config": table.config.to_dict(),
        "cells": [
            {"r": cell.r, "n1": cell.n1, "n2": cell.n2,
             "stats": {k: v.to_dict() for k, v in cell.stats.items()}}
            for cell in table.cells
        ],
        "reference_comparison": comparison.to_dict() if comparison else None,
        "theory_comparison": theory.to_dict() if theory else None,
    }
    path.write_text(json.dumps(payload, indent=2) + "\n")
    return path
