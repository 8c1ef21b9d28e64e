from src.experiments.borel_cantelli import run_eah, run_sbc
from src.experiments.config import ExperimentConfig, config_from_mapping, load_config, resolve_seed
from src.experiments.hitting import run_cusp_loglaw, run_hitting_time_law
from src.experiments.mixing import run_matrix_decay, run_mean_ergodic
from src.experiments.results import (
    EAHResult,
    ExperimentResult,
    LogLawResult,
    MatrixDecayResult,
    MeanErgodicResult,
    SBCResult,
    write_results,
)
from src.experiments.runner import run_experiment
