"""Finite-sample summaries: censored quantiles, standard errors, log-log fits."""

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from src.errors import ExperimentError


@dataclass(frozen=True)
class Quantile:
    value: float
    censored: bool


def censored_quantile(values: np.ndarray, censored: np.ndarray, q: float) -> Quantile:
    """
    Empirical quantile with right-censored entries ranked above every observation.
    When the quantile lands on a censored entry only its lower bound is known: the
    smallest censoring bound is returned and flagged.
    """
    values = np.asarray(values, dtype=float)
    censored = np.asarray(censored, dtype=bool)
    if values.size == 0:
        raise ExperimentError("Quantile of an empty sample")
    ranked = np.where(censored, np.inf, values)
    value = float(np.quantile(ranked, q, method="inverted_cdf"))
    if math.isinf(value):
        return Quantile(float(np.min(values[censored])), True)
    return Quantile(value, False)


def mean_and_stderr(values: np.ndarray) -> Tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ExperimentError("Mean of an empty sample")
    if values.size == 1:
        return float(values[0]), float("nan")
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(values.size))


def median_stderr(values: np.ndarray) -> float:
    """Large-sample standard error of the median, sqrt(pi/2) sd / sqrt(n)"""
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if values.size < 2:
        return float("nan")
    return math.sqrt(math.pi / 2.0) * float(np.std(values, ddof=1)) / math.sqrt(values.size)


def binomial_stderr(p: float, n: int) -> float:
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def log_log_slope(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """Least-squares (slope, intercept) of log y against log x"""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size < 2 or np.any(xs <= 0) or np.any(ys <= 0):
        raise ExperimentError("Log-log fit needs at least two positive points")
    slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope), float(intercept)


def significant_mask(values: np.ndarray, stderrs: np.ndarray, sigmas: float) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    stderrs = np.asarray(stderrs, dtype=float)
    return np.abs(values) > sigmas * stderrs


def fit_decay(
    ts: Sequence[float], values: Sequence[float], stderrs: Sequence[float], sigmas: float = 3.0
) -> Optional[Tuple[float, float, float, np.ndarray]]:
    """
    Power-law and exponential fits of |value| over the grid points whose signal
    exceeds `sigmas` standard errors. Returns (power exponent, exponential rate,
    noise floor, mask) or None when fewer than two points carry signal.
    """
    ts = np.asarray(ts, dtype=float)
    values = np.asarray(values, dtype=float)
    stderrs = np.asarray(stderrs, dtype=float)
    mask = significant_mask(values, stderrs, sigmas)
    if mask.sum() < 2:
        return None
    slope, _ = log_log_slope(ts[mask], np.abs(values[mask]))
    rate, _ = np.polyfit(ts[mask], np.log(np.abs(values[mask])), 1)
    noise_floor = float(sigmas * np.max(stderrs))
    return -slope, float(rate), noise_floor, mask
