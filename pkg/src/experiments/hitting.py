import logging
import math
from typing import Dict, List, Optional

import numpy as np

from src.errors import ExperimentError
from src.experiments.config import ExperimentConfig
from src.experiments.pool import map_points, start_points
from src.experiments.results import (
    STATUS_INCONCLUSIVE,
    STATUS_OK,
    STATUS_PRE_ASYMPTOTIC,
    LogLawResult,
)
from src.experiments.stats import censored_quantile, mean_and_stderr, median_stderr
from src.modsurface.batch import OrbitBatch
from src.modsurface.targets import CuspTarget

logger = logging.getLogger(__name__)

# first checkpoint of the cusp excursion law; shorter runs are pre-asymptotic
LOGLAW_FIRST_CHECKPOINT = 1000
MAX_HITTING_MEASURE = 0.5


def hitting_time_chunk(cfg: ExperimentConfig, seed: int, indices: range) -> Dict[str, np.ndarray]:
    """tau^i for every point and every target measure; 0 marks an exhausted budget"""
    flow = cfg.build_flow()
    target = cfg.build_target()
    thresholds = np.array([target.threshold(target.t_for_measure(mu)) for mu in cfg.measures])
    batch = OrbitBatch.from_points(start_points(seed, indices))
    n = len(batch)
    counts = np.zeros((n, thresholds.size), dtype=np.int64)
    first = np.zeros((n, thresholds.size), dtype=np.int64)
    pending = first.size
    for m in range(1, cfg.m_max + 1):
        batch.advance(flow)
        x, y = batch.coords()
        inside = target.score(x, y)[:, None] > thresholds[None, :]
        counts += inside
        newly = inside & (counts == cfg.hit_index) & (first == 0)
        if newly.any():
            first[newly] = m
            pending -= int(newly.sum())
            if pending == 0:
                break
    return {"tau": first}


def _aggregate(values: np.ndarray, censored: np.ndarray) -> Dict[str, float]:
    agg: Dict[str, float] = {"n_censored": int(censored.sum())}
    for name, q in (("q05", 0.05), ("q25", 0.25), ("median", 0.5), ("q75", 0.75)):
        quantile = censored_quantile(values, censored, q)
        agg[name] = quantile.value
        agg[f"{name}_censored"] = quantile.censored
    agg["median_stderr"] = median_stderr(values[~censored])
    if not censored.any():
        agg["mean"], agg["mean_stderr"] = mean_and_stderr(values)
    return agg


def run_hitting_time_law(
    cfg: ExperimentConfig, seed: Optional[int] = None, workers: Optional[int] = None
) -> LogLawResult:
    """
    log tau^i_{B_t}(x) / (-log mu(B_t)) over Haar points, one checkpoint per target
    measure. Exhausted budgets are right-censored at log(m_max) / (-log mu).
    """
    seed = cfg.seed if seed is None else seed
    workers = cfg.workers if workers is None else workers
    for mu in cfg.measures:
        if not 0 < mu < MAX_HITTING_MEASURE:
            raise ExperimentError(
                f"Target measure {mu} rejected: the hitting-time ratio needs mu(B_t) < 1/2"
            )
    target = cfg.build_target()
    ts = [target.t_for_measure(mu) for mu in cfg.measures]
    logger.info(f"Hitting-time law: {cfg.n_points} points, {len(ts)} targets, budget {cfg.m_max}")
    tau = map_points(hitting_time_chunk, cfg.n_points, cfg.chunk_size, workers, cfg, seed)["tau"]

    censored = tau == 0
    curves = np.full(tau.shape, np.nan)
    aggregates: List[Dict[str, float]] = []
    status = STATUS_OK
    notes = []
    for k, mu in enumerate(cfg.measures):
        scale = -math.log(mu)
        ratios = np.where(censored[:, k], math.log(cfg.m_max) / scale, np.log(np.maximum(tau[:, k], 1)) / scale)
        curves[~censored[:, k], k] = ratios[~censored[:, k]]
        agg = _aggregate(ratios, censored[:, k])
        agg["measure"] = mu
        if censored[:, k].all():
            agg["inconclusive"] = True
            status = STATUS_INCONCLUSIVE
            notes.append(f"every point exhausted the budget at mu = {mu:g}")
            logger.warning(f"All {cfg.n_points} points exceeded the budget at mu = {mu:g}")
        elif censored[:, k].mean() > 0.5:
            logger.warning(f"More than half of the points are censored at mu = {mu:g}")
        aggregates.append(agg)
    return LogLawResult(
        experiment="hitting_time",
        status=status,
        notes=notes,
        checkpoints=ts,
        curves=curves,
        censored=censored,
        aggregates=aggregates,
        limit=1.0,
    )


def loglaw_checkpoints(m_max: int) -> List[int]:
    points = []
    m = LOGLAW_FIRST_CHECKPOINT
    while m <= m_max:
        points.append(m)
        m *= 10
    if not points or points[-1] != m_max:
        points.append(m_max)
    return points


def cusp_loglaw_chunk(cfg: ExperimentConfig, seed: int, indices: range) -> Dict[str, np.ndarray]:
    """Running max of d(x h_m) / log m at each checkpoint"""
    flow = cfg.build_flow()
    checkpoints = loglaw_checkpoints(cfg.m_max)
    burn_in = max(2, cfg.loglaw_burn_in) if cfg.loglaw_burn_in <= cfg.m_max else 2
    batch = OrbitBatch.from_points(start_points(seed, indices))
    running = np.zeros(len(batch))
    out = np.zeros((len(batch), len(checkpoints)))
    k = 0
    for m in range(1, cfg.m_max + 1):
        batch.advance(flow)
        if m >= burn_in:
            ratio = np.maximum(np.log(batch.heights()), 0.0) * (1.0 / math.log(m))
            running = np.maximum(running, ratio)
        if m == checkpoints[k]:
            out[:, k] = running
            k += 1
    return {"running_max": out}


def run_cusp_loglaw(
    cfg: ExperimentConfig, seed: Optional[int] = None, workers: Optional[int] = None
) -> LogLawResult:
    seed = cfg.seed if seed is None else seed
    workers = cfg.workers if workers is None else workers
    target = cfg.build_target()
    if not isinstance(target, CuspTarget):
        raise ExperimentError("The cusp excursion law needs the cusp target family")
    checkpoints = loglaw_checkpoints(cfg.m_max)
    logger.info(f"Cusp log law: {cfg.n_points} points up to m = {cfg.m_max}")
    running = map_points(cusp_loglaw_chunk, cfg.n_points, cfg.chunk_size, workers, cfg, seed)["running_max"]
    no_censoring = np.zeros(running.shape[0], dtype=bool)
    aggregates = [_aggregate(running[:, k], no_censoring) for k in range(len(checkpoints))]
    status = STATUS_OK
    notes = []
    if cfg.m_max < LOGLAW_FIRST_CHECKPOINT:
        status = STATUS_PRE_ASYMPTOTIC
        notes.append(f"m_max = {cfg.m_max} is below the first checkpoint {LOGLAW_FIRST_CHECKPOINT}")
        logger.warning(f"Cusp log law run is pre-asymptotic (m_max = {cfg.m_max})")
    return LogLawResult(
        experiment="cusp_loglaw",
        status=status,
        notes=notes,
        checkpoints=checkpoints,
        curves=running,
        censored=np.zeros(running.shape, dtype=bool),
        aggregates=aggregates,
        limit=1.0 / target.varkappa,
    )
