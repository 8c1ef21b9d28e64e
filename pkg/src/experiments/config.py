"""
Experiment configuration: a flat `key = value` file (or a JSON object).

  # comments and blank lines are ignored
  experiment = hitting_time
  flow = horocycle
  measures = 1e-2, 1e-3, 1e-4

Unknown keys and missing required keys are errors naming the key.
"""

import hashlib
import json
import logging
import os
from dataclasses import MISSING, dataclass, field, fields, replace
from typing import Any, Callable, Dict, List, Optional, Tuple

from src.errors import ConfigError, HomflowError
from src.liealg.algebra import AlgebraElement
from src.modsurface.flows import CUSTOM, FLOW_SPEC_KINDS, FlowSpec
from src.modsurface.targets import BallTarget, CuspTarget, TargetFamily

logger = logging.getLogger(__name__)

EXPERIMENTS = ("hitting_time", "cusp_loglaw", "sbc", "eah", "mean_ergodic", "matrix_decay")
TARGET_KINDS = ("cusp", "ball")
SBC_SCHEDULES = ("harmonic", "sqrt")
SEED_ENV = "HOMFLOW_SEED"
REQUIRED = object()


def _int(raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        value = float(raw)
        if not value.is_integer():
            raise ValueError(f"expected an integer, got {raw}")
        return int(value)


def _float_list(raw: str) -> Tuple[float, ...]:
    return tuple(float(v) for v in raw.split(",") if v.strip())


def _int_list(raw: str) -> Tuple[int, ...]:
    return tuple(_int(v) for v in raw.split(",") if v.strip())


def _key(help_text: str, parse: Callable[[str], Any], default: Any = REQUIRED):
    meta = {"help": help_text, "parse": parse}
    if default is REQUIRED:
        return field(metadata=meta)
    return field(default=default, metadata=meta)


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = _key(f"experiment to run: {', '.join(EXPERIMENTS)}", str)
    n_points: int = _key("number of Haar-random starting points", _int)
    m_max: int = _key("orbit budget (number of flow steps)", _int)
    flow: str = _key(f"flow kind: {', '.join(FLOW_SPEC_KINDS)}", str, "horocycle")
    flow_step: float = _key("time per flow step", float, 1.0)
    generator: str = _key("JSON 2x2 generator for custom flows", str, "")
    target: str = _key("target family: cusp or ball", str, "cusp")
    ball_center: Tuple[float, ...] = _key("ball centre as x, y", _float_list, (0.0, 2.0))
    ball_radius: float = _key("ball radius at t = 0", float, 0.2)
    measures: Tuple[float, ...] = _key("target measures for hitting_time, decreasing", _float_list, (1e-2, 1e-3, 1e-4))
    hit_index: int = _key("hit index i of the hitting time", _int, 1)
    loglaw_burn_in: int = _key("first step counted by cusp_loglaw", _int, 100)
    sbc_schedule: str = _key("sbc measure schedule: harmonic (c/m) or sqrt (c/sqrt m)", str, "harmonic")
    sbc_c: float = _key("constant c of the sbc schedule", float, 1.0)
    sbc_band_c: float = _key("constant C of the error band C sqrt(E) log(E)^p", float, 10.0)
    sbc_log_power: float = _key("log power p of the error band", float, 2.0)
    sbc_min_expected: float = _key("smallest E_m at the horizon accepted as divergent", float, 10.0)
    eah_eta: float = _key("eah schedule exponent: mu(B_m) = c m^-eta", float, 0.5)
    eah_c: float = _key("eah schedule constant c", float, 1.0)
    me_measure: float = _key("measure of the mean ergodic test indicator", float, 0.1)
    me_min_log2: int = _key("first mean ergodic checkpoint 2^k", _int, 4)
    me_max_log2: int = _key("last mean ergodic checkpoint 2^k", _int, 16)
    decay_measure: float = _key("measure of the matrix-coefficient test indicator", float, 0.1)
    t_grid: Tuple[int, ...] = _key(
        "flow times for matrix_decay", _int_list, (1, 2, 4, 8, 16, 32, 64, 128, 256, 512)
    )
    noise_sigmas: float = _key("signal threshold in standard errors for decay fits", float, 3.0)
    seed: int = _key("root seed; overridden by --seed and HOMFLOW_SEED", _int, 0)
    workers: int = _key("worker processes", _int, 1)
    chunk_size: int = _key("points per work unit", _int, 64)
    out: str = _key("output directory", str, "results")
    source_hash: str = field(default="", compare=False, metadata={"internal": True})

    def __post_init__(self):
        problems = []
        if self.experiment not in EXPERIMENTS:
            problems.append(("experiment", f"unknown experiment '{self.experiment}'"))
        if self.flow not in FLOW_SPEC_KINDS:
            problems.append(("flow", f"unknown flow '{self.flow}'"))
        if self.flow == CUSTOM and not self.generator:
            problems.append(("generator", "custom flows need a generator"))
        if self.target not in TARGET_KINDS:
            problems.append(("target", f"unknown target '{self.target}'"))
        if self.sbc_schedule not in SBC_SCHEDULES:
            problems.append(("sbc_schedule", f"unknown schedule '{self.sbc_schedule}'"))
        if len(self.ball_center) != 2:
            problems.append(("ball_center", "expected two numbers x, y"))
        for key in ("n_points", "m_max", "hit_index", "workers", "chunk_size"):
            if getattr(self, key) < 1:
                problems.append((key, "must be >= 1"))
        if self.seed < 0 or self.seed >= 2 ** 64:
            problems.append(("seed", "must be a 64-bit unsigned integer"))
        if any(b >= a for a, b in zip(self.measures, self.measures[1:])) or not self.measures:
            problems.append(("measures", "must be a nonempty strictly decreasing list"))
        if any(b <= a for a, b in zip(self.t_grid, self.t_grid[1:])) or not self.t_grid:
            problems.append(("t_grid", "must be a nonempty strictly increasing list"))
        if self.me_min_log2 > self.me_max_log2:
            problems.append(("me_min_log2", "must not exceed me_max_log2"))
        if problems:
            key, message = problems[0]
            raise ConfigError(f"Invalid value for '{key}': {message}", key=key)

    def build_flow(self) -> FlowSpec:
        try:
            if self.flow == CUSTOM:
                return FlowSpec.custom(AlgebraElement.from_json(json.loads(self.generator)), self.flow_step)
            return FlowSpec(self.flow, self.flow_step)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Generator is not valid JSON: {str(e)}", key="generator")

    def build_target(self) -> TargetFamily:
        if self.target == "cusp":
            return CuspTarget()
        return BallTarget(complex(*self.ball_center), self.ball_radius)

    def content_hash(self) -> str:
        """Hash of the config file the run was loaded from, else of the canonical JSON"""
        if self.source_hash:
            return self.source_hash
        return hashlib.sha256(canonical_json(self).encode("utf-8")).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in config_fields()}


def config_fields() -> List:
    return [f for f in fields(ExperimentConfig) if not f.metadata.get("internal")]


def canonical_json(cfg: ExperimentConfig) -> str:
    return json.dumps(cfg.to_dict(), sort_keys=True, separators=(",", ":"))


def describe_keys() -> str:
    lines = []
    for f in config_fields():
        default = "(required)" if f.default is MISSING else repr(f.default)
        lines.append(f"  {f.name:<18} {f.metadata['help']} [default: {default}]")
    return "\n".join(lines)


def parse_key_values(text: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"Line {number}: expected 'key = value', got '{raw.strip()}'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in values:
            raise ConfigError(f"Line {number}: duplicate key '{key}'", key=key)
        values[key] = value
    return values


def config_from_mapping(values: Dict[str, Any], source_hash: str = "") -> ExperimentConfig:
    known = {f.name: f for f in config_fields()}
    for key in values:
        if key not in known:
            raise ConfigError(f"Unknown configuration key '{key}'", key=key)
    kwargs: Dict[str, Any] = {}
    for name, f in known.items():
        if name not in values:
            if f.default is MISSING:
                raise ConfigError(f"Missing required configuration key '{name}'", key=name)
            continue
        raw = values[name]
        try:
            if isinstance(raw, str):
                kwargs[name] = f.metadata["parse"](raw)
            elif name == "generator":
                kwargs[name] = json.dumps(raw)
            elif isinstance(raw, list):
                kwargs[name] = f.metadata["parse"](",".join(str(v) for v in raw))
            else:
                kwargs[name] = f.metadata["parse"](str(raw))
        except ValueError as e:
            raise ConfigError(f"Cannot parse value of '{name}': {str(e)}", key=name)
    try:
        return ExperimentConfig(source_hash=source_hash, **kwargs)
    except ConfigError:
        raise
    except HomflowError as e:
        raise ConfigError(str(e))


def load_config(path: str) -> ExperimentConfig:
    """Raises OSError when unreadable, ConfigError when malformed"""
    with open(path, "rb") as handle:
        data = handle.read()
    digest = hashlib.sha256(data).hexdigest()
    text = data.decode("utf-8")
    if text.lstrip().startswith("{"):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Malformed JSON config: {str(e)}")
        if not isinstance(values, dict):
            raise ConfigError("JSON config must be an object")
    else:
        values = parse_key_values(text)
    cfg = config_from_mapping(values, source_hash=digest)
    logger.info(f"Loaded config {path} (sha256 {digest[:12]})")
    return cfg


def resolve_seed(cfg: ExperimentConfig, cli_seed: Optional[int] = None) -> int:
    """--seed, then HOMFLOW_SEED, then the config's seed key"""
    if cli_seed is not None:
        seed = cli_seed
    elif os.environ.get(SEED_ENV):
        env = os.environ[SEED_ENV]
        try:
            seed = int(env)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got '{env}'", key="seed")
    else:
        return cfg.seed
    if not 0 <= seed < 2 ** 64:
        raise ConfigError(f"Seed must be a 64-bit unsigned integer, got {seed}", key="seed")
    return seed


def with_overrides(cfg: ExperimentConfig, **overrides: Any) -> ExperimentConfig:
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
