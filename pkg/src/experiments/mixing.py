import logging
import math
from typing import Dict, Optional

import numpy as np

from src.errors import ExperimentError
from src.experiments.config import ExperimentConfig
from src.experiments.pool import map_points, start_points
from src.experiments.results import STATUS_INCONCLUSIVE, STATUS_OK, MatrixDecayResult, MeanErgodicResult
from src.experiments.stats import fit_decay, log_log_slope, mean_and_stderr
from src.modsurface.batch import OrbitBatch
from src.modsurface.targets import TargetFamily

logger = logging.getLogger(__name__)

MAX_DECAY_TIME = 1000


def _indicator_threshold(target: TargetFamily, mu: float, key: str) -> float:
    if not 0 < mu < 1:
        raise ExperimentError(f"Test indicator with measure {mu} is constant; '{key}' must lie in (0, 1)")
    if mu > target.max_measure:
        raise ExperimentError(f"'{key}' = {mu} exceeds the largest target measure {target.max_measure:.6g}")
    return target.threshold(target.t_for_measure(mu))


def mean_ergodic_checkpoints(cfg: ExperimentConfig):
    points = [2 ** k for k in range(cfg.me_min_log2, cfg.me_max_log2 + 1) if 2 ** k <= cfg.m_max]
    if len(points) < 2:
        raise ExperimentError(
            f"m_max = {cfg.m_max} leaves fewer than two checkpoints 2^{cfg.me_min_log2}..2^{cfg.me_max_log2}"
        )
    return points


def mean_ergodic_chunk(cfg: ExperimentConfig, seed: int, indices: range) -> Dict[str, np.ndarray]:
    """(beta_m(f)(x) - mu(f))^2 with beta_m(f)(x) = (1/m) sum_{j=1}^m f(x h_j)"""
    flow = cfg.build_flow()
    target = cfg.build_target()
    threshold = _indicator_threshold(target, cfg.me_measure, "me_measure")
    checkpoints = mean_ergodic_checkpoints(cfg)
    batch = OrbitBatch.from_points(start_points(seed, indices))
    sums = np.zeros(len(batch))
    out = np.zeros((len(batch), len(checkpoints)))
    k = 0
    for m in range(1, checkpoints[-1] + 1):
        batch.advance(flow)
        x, y = batch.coords()
        sums += target.score(x, y) > threshold
        if m == checkpoints[k]:
            out[:, k] = (sums / m - cfg.me_measure) ** 2
            k += 1
    return {"dev2": out}


def run_mean_ergodic(
    cfg: ExperimentConfig, seed: Optional[int] = None, workers: Optional[int] = None
) -> MeanErgodicResult:
    """L^2 norm of beta_m(f) - mu(f) over Haar points and its log-log slope in m"""
    seed = cfg.seed if seed is None else seed
    workers = cfg.workers if workers is None else workers
    _indicator_threshold(cfg.build_target(), cfg.me_measure, "me_measure")
    checkpoints = mean_ergodic_checkpoints(cfg)
    logger.info(f"Mean ergodic rate: {cfg.n_points} points, m = {checkpoints[0]}..{checkpoints[-1]}")
    dev2 = map_points(mean_ergodic_chunk, cfg.n_points, cfg.chunk_size, workers, cfg, seed)["dev2"]
    norms, errors = [], []
    for k in range(len(checkpoints)):
        mean, err = mean_and_stderr(dev2[:, k])
        norm = math.sqrt(mean)
        norms.append(norm)
        errors.append(err / (2.0 * norm) if norm > 0 else float("nan"))
    status, notes = STATUS_OK, []
    if min(norms) <= 0:
        return MeanErgodicResult(
            experiment="mean_ergodic", status=STATUS_INCONCLUSIVE,
            notes=["zero empirical deviation at some checkpoint"],
            checkpoints=checkpoints, l2_norms=norms, stderrs=errors,
        )
    slope, intercept = log_log_slope(checkpoints, norms)
    return MeanErgodicResult(
        experiment="mean_ergodic",
        status=status,
        notes=notes,
        checkpoints=checkpoints,
        l2_norms=norms,
        stderrs=errors,
        slope=slope,
        intercept=intercept,
    )


def matrix_decay_chunk(cfg: ExperimentConfig, seed: int, indices: range) -> Dict[str, np.ndarray]:
    """phi(x h_t) psi(x) with phi = psi = 1_B - mu(B), at every grid time"""
    flow = cfg.build_flow()
    target = cfg.build_target()
    mu = cfg.decay_measure
    threshold = _indicator_threshold(target, mu, "decay_measure")
    batch = OrbitBatch.from_points(start_points(seed, indices))
    x, y = batch.coords()
    psi = (target.score(x, y) > threshold) - mu
    out = np.zeros((len(batch), len(cfg.t_grid)))
    k = 0
    for t in range(1, cfg.t_grid[-1] + 1):
        batch.advance(flow)
        if t == cfg.t_grid[k]:
            x, y = batch.coords()
            out[:, k] = ((target.score(x, y) > threshold) - mu) * psi
            k += 1
    return {"products": out}


def run_matrix_decay(
    cfg: ExperimentConfig, seed: Optional[int] = None, workers: Optional[int] = None
) -> MatrixDecayResult:
    """
    Monte Carlo correlations <phi(. h_t), psi> with power-law and exponential fits
    over the grid points whose signal exceeds noise_sigmas standard errors.
    """
    seed = cfg.seed if seed is None else seed
    workers = cfg.workers if workers is None else workers
    if cfg.t_grid[0] < 1 or cfg.t_grid[-1] > MAX_DECAY_TIME:
        raise ExperimentError(f"t_grid must lie in [1, {MAX_DECAY_TIME}]")
    _indicator_threshold(cfg.build_target(), cfg.decay_measure, "decay_measure")
    logger.info(f"Matrix decay: {cfg.n_points} points, t up to {cfg.t_grid[-1]}")
    products = map_points(matrix_decay_chunk, cfg.n_points, cfg.chunk_size, workers, cfg, seed)["products"]
    correlations, errors = [], []
    for k in range(len(cfg.t_grid)):
        mean, err = mean_and_stderr(products[:, k])
        correlations.append(mean)
        errors.append(err)
    fit = fit_decay(cfg.t_grid, correlations, errors, cfg.noise_sigmas)
    noise_floor = cfg.noise_sigmas * float(np.max(errors))
    if fit is None:
        logger.warning(f"Correlation signal below the noise floor {noise_floor:.3g} on the whole grid")
        return MatrixDecayResult(
            experiment="matrix_decay",
            status=STATUS_INCONCLUSIVE,
            notes=[f"signal below {cfg.noise_sigmas} standard errors at all but at most one grid point"],
            t_grid=list(cfg.t_grid),
            correlations=correlations,
            stderrs=errors,
            noise_floor=noise_floor,
        )
    exponent, rate, noise_floor, mask = fit
    return MatrixDecayResult(
        experiment="matrix_decay",
        status=STATUS_OK,
        t_grid=list(cfg.t_grid),
        correlations=correlations,
        stderrs=errors,
        fitted_on=[t for t, keep in zip(cfg.t_grid, mask) if keep],
        exponent=exponent,
        exp_rate=rate,
        noise_floor=noise_floor,
    )
