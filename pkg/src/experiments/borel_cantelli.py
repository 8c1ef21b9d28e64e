import logging
import math
from typing import Dict, List, Optional

import numpy as np

from src.errors import ExperimentError
from src.experiments.config import ExperimentConfig
from src.experiments.pool import dyadic_checkpoints, map_points, start_points
from src.experiments.results import STATUS_OK, EAHResult, SBCResult
from src.experiments.stats import mean_and_stderr
from src.modsurface.batch import OrbitBatch
from src.modsurface.targets import TargetFamily

logger = logging.getLogger(__name__)

SBC_THEORETICAL_STATUS = (
    "flow on SL2(Z)\\SL2(R) (locally SO(2,1)): kappa*tau <= 1, so summable decay is not "
    "available and strong Borel-Cantelli is tested empirically only"
)


def sbc_schedule(cfg: ExperimentConfig, target: TargetFamily) -> np.ndarray:
    """mu_m for m = 1..m_max: min(max measure, c/m) or min(max measure, c/sqrt(m))"""
    m = np.arange(1, cfg.m_max + 1, dtype=float)
    raw = cfg.sbc_c / m if cfg.sbc_schedule == "harmonic" else cfg.sbc_c / np.sqrt(m)
    return np.minimum(raw, target.max_measure)


def _thresholds(target: TargetFamily, measures: np.ndarray) -> np.ndarray:
    return np.array([target.threshold(target.t_for_measure(float(mu))) for mu in measures])


def sbc_chunk(cfg: ExperimentConfig, seed: int, indices: range) -> Dict[str, np.ndarray]:
    """S_m = #{1 <= j <= m : x h_j in B_j} at each dyadic checkpoint"""
    flow = cfg.build_flow()
    target = cfg.build_target()
    thresholds = _thresholds(target, sbc_schedule(cfg, target))
    checkpoints = dyadic_checkpoints(cfg.m_max, start_log2=0)
    batch = OrbitBatch.from_points(start_points(seed, indices))
    hits = np.zeros(len(batch), dtype=np.int64)
    out = np.zeros((len(batch), len(checkpoints)), dtype=np.int64)
    k = 0
    for m in range(1, cfg.m_max + 1):
        batch.advance(flow)
        x, y = batch.coords()
        hits += target.score(x, y) > thresholds[m - 1]
        if m == checkpoints[k]:
            out[:, k] = hits
            k += 1
    return {"counts": out}


def run_sbc(cfg: ExperimentConfig, seed: Optional[int] = None, workers: Optional[int] = None) -> SBCResult:
    """
    Ratio S_m / E_m with E_m = sum_{j <= m} mu_j, and the envelope check
    |S_m - E_m| <= C sqrt(E_m) log(E_m)^p at checkpoints with E_m >= e.
    """
    seed = cfg.seed if seed is None else seed
    workers = cfg.workers if workers is None else workers
    target = cfg.build_target()
    if cfg.sbc_c <= 0:
        raise ExperimentError("The sbc schedule is identically zero; sum of measures converges")
    schedule = sbc_schedule(cfg, target)
    expected_total = math.fsum(schedule)
    if expected_total < cfg.sbc_min_expected:
        raise ExperimentError(
            f"Sum of target measures is only {expected_total:.4g} at m = {cfg.m_max} "
            f"(need >= {cfg.sbc_min_expected}): with a convergent sum almost every orbit "
            "eventually misses the targets, so there is no ratio to test"
        )
    checkpoints = dyadic_checkpoints(cfg.m_max, start_log2=0)
    logger.info(f"sBC: {cfg.n_points} points, {cfg.sbc_schedule} schedule, E = {expected_total:.4g}")
    counts = map_points(sbc_chunk, cfg.n_points, cfg.chunk_size, workers, cfg, seed)["counts"]

    curve = []
    errors: List[float] = []
    violations = 0
    checks = 0
    for k, m in enumerate(checkpoints):
        e_m = math.fsum(schedule[:m])
        s = counts[:, k].astype(float)
        ratio_mean, ratio_err = mean_and_stderr(s / e_m)
        curve.append((m, float(s.mean()), e_m, ratio_mean))
        errors.append(ratio_err)
        if e_m >= math.e:
            envelope = cfg.sbc_band_c * math.sqrt(e_m) * math.log(e_m) ** cfg.sbc_log_power
            violations += int(np.sum(np.abs(s - e_m) > envelope))
            checks += s.size
    result = SBCResult(
        experiment="sbc",
        status=STATUS_OK,
        ratio_curve=curve,
        counts=counts,
        ratio_stderr=errors,
        error_band_violations=violations,
        band_checks=checks,
        theoretical_status=SBC_THEORETICAL_STATUS,
    )
    if violations:
        logger.warning(f"sBC envelope violated at {violations} of {checks} point-checkpoints")
    return result


def eah_measures(cfg: ExperimentConfig, target: TargetFamily, checkpoints: List[int]) -> np.ndarray:
    return np.array([min(target.max_measure, cfg.eah_c * m ** (-cfg.eah_eta)) for m in checkpoints])


def eah_chunk(cfg: ExperimentConfig, seed: int, indices: range) -> Dict[str, np.ndarray]:
    """#{1 <= j <= m : x h_j in B_m} for every checkpoint m"""
    flow = cfg.build_flow()
    target = cfg.build_target()
    checkpoints = dyadic_checkpoints(cfg.m_max)
    thresholds = _thresholds(target, eah_measures(cfg, target, checkpoints))
    batch = OrbitBatch.from_points(start_points(seed, indices))
    counts = np.zeros((len(batch), len(checkpoints)), dtype=np.int64)
    first_open = 0
    for j in range(1, cfg.m_max + 1):
        while checkpoints[first_open] < j:
            first_open += 1
        batch.advance(flow)
        x, y = batch.coords()
        score = target.score(x, y)
        counts[:, first_open:] += score[:, None] > thresholds[None, first_open:]
    return {"counts": counts}


def run_eah(
    cfg: ExperimentConfig, seed: Optional[int] = None, workers: Optional[int] = None
) -> EAHResult:
    """
    Eventually-always-hitting along mu(B_m) = c m^-eta at dyadic checkpoints, with the
    partial sums of 1/(2^j mu(B_{2^j})) whose convergence (eta < 1) decides full measure.
    """
    seed = cfg.seed if seed is None else seed
    workers = cfg.workers if workers is None else workers
    if cfg.eah_c <= 0 or cfg.eah_eta < 0:
        raise ExperimentError("The eah schedule needs c > 0 and eta >= 0")
    target = cfg.build_target()
    checkpoints = dyadic_checkpoints(cfg.m_max)
    measures = eah_measures(cfg, target, checkpoints)
    logger.info(f"EAH: {cfg.n_points} points, eta = {cfg.eah_eta}, {len(checkpoints)} checkpoints")
    counts = map_points(eah_chunk, cfg.n_points, cfg.chunk_size, workers, cfg, seed)["counts"]

    expected = np.array(checkpoints, dtype=float) * measures
    ratios = counts / expected[None, :]
    hit_fraction = [float(np.mean(counts[:, k] >= 1)) for k in range(len(checkpoints))]
    partial_sums = []
    total = 0.0
    for m, e in zip(checkpoints, expected):
        if m & (m - 1) == 0:
            total += 1.0 / e
        partial_sums.append(total)
    return EAHResult(
        experiment="eah",
        status=STATUS_OK,
        checkpoints=checkpoints,
        measures=[float(mu) for mu in measures],
        hit_fraction=hit_fraction,
        count_ratios=ratios,
        summability_partial_sums=partial_sums,
        summable=cfg.eah_eta < 1.0,
        final_miss_fraction=1.0 - hit_fraction[-1],
    )
