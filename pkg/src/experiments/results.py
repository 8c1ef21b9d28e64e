"""
Result records and their files.

CSV schema (version 1), one row per checkpoint per statistic:
  experiment, m_or_t, statistic, value, stderr, n_censored, config_hash, seed
UTF-8, LF line endings, fixed column order. The JSON summary holds the same
config_hash and seed. Neither file carries timestamps.
"""

import json
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
CSV_COLUMNS = ["experiment", "m_or_t", "statistic", "value", "stderr", "n_censored", "config_hash", "seed"]

STATUS_OK = "ok"
STATUS_INCONCLUSIVE = "inconclusive"
STATUS_PRE_ASYMPTOTIC = "pre-asymptotic"


@dataclass(frozen=True)
class StatRow:
    experiment: str
    m_or_t: float
    statistic: str
    value: float
    stderr: float = float("nan")
    n_censored: int = 0


@dataclass
class ExperimentResult:
    """Common part of every result: name, status and extra summary entries"""
    experiment: str
    status: str = STATUS_OK
    notes: List[str] = field(default_factory=list)

    def rows(self) -> List[StatRow]:
        raise NotImplementedError

    def summary(self) -> Dict[str, Any]:
        return {"experiment": self.experiment, "status": self.status, "notes": list(self.notes)}


@dataclass
class LogLawResult(ExperimentResult):
    """
    Per-point curves (points x checkpoints) with NaN where censored, plus per-checkpoint
    aggregates. Used for the hitting-time law (checkpoints are target parameters t)
    and the cusp-excursion law (checkpoints are orbit lengths m).
    """
    checkpoints: List[float] = field(default_factory=list)
    curves: Optional[np.ndarray] = None
    censored: Optional[np.ndarray] = None
    aggregates: List[Dict[str, Any]] = field(default_factory=list)
    limit: float = 1.0

    def rows(self) -> List[StatRow]:
        out = []
        for cp, agg in zip(self.checkpoints, self.aggregates):
            n_cens = int(agg.get("n_censored", 0))
            for stat in ("measure", "q05", "q25", "median", "q75", "mean"):
                if stat in agg:
                    err = agg.get(f"{stat}_stderr", float("nan"))
                    out.append(StatRow(self.experiment, cp, stat, agg[stat], err, n_cens))
        return out

    def summary(self) -> Dict[str, Any]:
        data = super().summary()
        data["limit"] = self.limit
        data["checkpoints"] = [
            {"m_or_t": cp, **{k: _plain(v) for k, v in agg.items()}}
            for cp, agg in zip(self.checkpoints, self.aggregates)
        ]
        return data


@dataclass
class SBCResult(ExperimentResult):
    """ratio_curve entries are (m, mean S_m, E_m, mean S_m / E_m); counts is points x checkpoints"""
    ratio_curve: List[Tuple[int, float, float, float]] = field(default_factory=list)
    counts: Optional[np.ndarray] = None
    ratio_stderr: List[float] = field(default_factory=list)
    error_band_violations: int = 0
    band_checks: int = 0
    theoretical_status: str = ""

    @property
    def violation_fraction(self) -> float:
        return self.error_band_violations / self.band_checks if self.band_checks else 0.0

    def rows(self) -> List[StatRow]:
        out = []
        for (m, s_mean, e_m, ratio), err in zip(self.ratio_curve, self.ratio_stderr):
            out.append(StatRow(self.experiment, m, "E_m", e_m))
            out.append(StatRow(self.experiment, m, "mean_S_m", s_mean))
            out.append(StatRow(self.experiment, m, "ratio", ratio, err))
        if self.ratio_curve:
            final_m = self.ratio_curve[-1][0]
            out.append(StatRow(self.experiment, final_m, "band_violations", float(self.error_band_violations)))
            out.append(StatRow(self.experiment, final_m, "band_checks", float(self.band_checks)))
        return out

    def summary(self) -> Dict[str, Any]:
        data = super().summary()
        data.update({
            "final_ratio": self.ratio_curve[-1][3] if self.ratio_curve else None,
            "error_band_violations": self.error_band_violations,
            "band_checks": self.band_checks,
            "violation_fraction": self.violation_fraction,
            "theoretical_status": self.theoretical_status,
        })
        return data


@dataclass
class EAHResult(ExperimentResult):
    checkpoints: List[int] = field(default_factory=list)
    measures: List[float] = field(default_factory=list)
    hit_fraction: List[float] = field(default_factory=list)
    count_ratios: Optional[np.ndarray] = None
    summability_partial_sums: List[float] = field(default_factory=list)
    summable: bool = False
    final_miss_fraction: float = 0.0

    def rows(self) -> List[StatRow]:
        out = []
        n = self.count_ratios.shape[0] if self.count_ratios is not None else 0
        for k, m in enumerate(self.checkpoints):
            frac = self.hit_fraction[k]
            err = math.sqrt(frac * (1.0 - frac) / n) if n else float("nan")
            out.append(StatRow(self.experiment, m, "measure", self.measures[k]))
            out.append(StatRow(self.experiment, m, "hit_fraction", frac, err))
            if self.count_ratios is not None:
                col = self.count_ratios[:, k]
                out.append(StatRow(self.experiment, m, "median_count_ratio", float(np.median(col))))
            out.append(StatRow(self.experiment, m, "summability_partial_sum", self.summability_partial_sums[k]))
        return out

    def summary(self) -> Dict[str, Any]:
        data = super().summary()
        data.update({
            "final_hit_fraction": self.hit_fraction[-1] if self.hit_fraction else None,
            "final_miss_fraction": self.final_miss_fraction,
            "summable": self.summable,
        })
        return data


@dataclass
class MeanErgodicResult(ExperimentResult):
    checkpoints: List[int] = field(default_factory=list)
    l2_norms: List[float] = field(default_factory=list)
    stderrs: List[float] = field(default_factory=list)
    slope: float = float("nan")
    intercept: float = float("nan")

    def rows(self) -> List[StatRow]:
        out = [
            StatRow(self.experiment, m, "l2_deviation", v, e)
            for m, v, e in zip(self.checkpoints, self.l2_norms, self.stderrs)
        ]
        if self.checkpoints:
            out.append(StatRow(self.experiment, self.checkpoints[-1], "fitted_slope", self.slope))
        return out

    def summary(self) -> Dict[str, Any]:
        data = super().summary()
        data.update({"fitted_slope": self.slope, "intercept": self.intercept})
        return data


@dataclass
class MatrixDecayResult(ExperimentResult):
    t_grid: List[int] = field(default_factory=list)
    correlations: List[float] = field(default_factory=list)
    stderrs: List[float] = field(default_factory=list)
    fitted_on: List[int] = field(default_factory=list)
    exponent: Optional[float] = None
    exp_rate: Optional[float] = None
    noise_floor: float = float("nan")

    def rows(self) -> List[StatRow]:
        out = [
            StatRow(self.experiment, t, "correlation", c, e)
            for t, c, e in zip(self.t_grid, self.correlations, self.stderrs)
        ]
        last = self.t_grid[-1] if self.t_grid else 0
        out.append(StatRow(self.experiment, last, "noise_floor", self.noise_floor))
        if self.exponent is not None:
            out.append(StatRow(self.experiment, last, "power_exponent", self.exponent))
            out.append(StatRow(self.experiment, last, "exponential_rate", self.exp_rate))
        return out

    def summary(self) -> Dict[str, Any]:
        data = super().summary()
        data.update({
            "power_exponent": self.exponent,
            "exponential_rate": self.exp_rate,
            "noise_floor": self.noise_floor,
            "fitted_on": list(self.fitted_on),
        })
        return data


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return None if math.isnan(v) else v
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def results_frame(result: ExperimentResult, config_hash: str, seed: int) -> pd.DataFrame:
    records = [
        {
            "experiment": r.experiment,
            "m_or_t": r.m_or_t,
            "statistic": r.statistic,
            "value": r.value,
            "stderr": r.stderr,
            "n_censored": r.n_censored,
            "config_hash": config_hash,
            "seed": seed,
        }
        for r in result.rows()
    ]
    return pd.DataFrame(records, columns=CSV_COLUMNS)


def summary_document(result: ExperimentResult, config_hash: str, seed: int) -> Dict[str, Any]:
    doc = {"schema_version": SCHEMA_VERSION, "config_hash": config_hash, "seed": seed}
    doc.update(result.summary())
    return _sanitize(doc)


def _sanitize(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    value = _plain(obj)
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def dump_json(doc: Dict[str, Any]) -> str:
    return json.dumps(_sanitize(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_results(
    out_dir: str, result: ExperimentResult, config_hash: str, seed: int
) -> List[str]:
    """Write results.csv and summary.json; returns the paths written"""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "results.csv")
    json_path = os.path.join(out_dir, "summary.json")
    frame = results_frame(result, config_hash, seed)
    frame.to_csv(csv_path, index=False, encoding="utf-8", lineterminator="\n", float_format="%.17g")
    with open(json_path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(dump_json(summary_document(result, config_hash, seed)))
    logger.info(f"Wrote {len(frame)} result rows to {csv_path}")
    return [csv_path, json_path]
