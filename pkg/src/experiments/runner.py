import logging
from typing import Callable, Dict, Optional

from src.experiments.borel_cantelli import run_eah, run_sbc
from src.experiments.config import ExperimentConfig
from src.experiments.hitting import run_cusp_loglaw, run_hitting_time_law
from src.experiments.mixing import run_matrix_decay, run_mean_ergodic
from src.experiments.results import ExperimentResult

logger = logging.getLogger(__name__)

RUNNERS: Dict[str, Callable[..., ExperimentResult]] = {
    "hitting_time": run_hitting_time_law,
    "cusp_loglaw": run_cusp_loglaw,
    "sbc": run_sbc,
    "eah": run_eah,
    "mean_ergodic": run_mean_ergodic,
    "matrix_decay": run_matrix_decay,
}


def run_experiment(
    cfg: ExperimentConfig, seed: Optional[int] = None, workers: Optional[int] = None
) -> ExperimentResult:
    runner = RUNNERS[cfg.experiment]
    logger.info(f"Running experiment '{cfg.experiment}'")
    result = runner(cfg, seed=seed, workers=workers)
    logger.info(f"Experiment '{cfg.experiment}' finished with status {result.status}")
    return result
