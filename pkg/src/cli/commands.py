"""
homflow command line.

  homflow rootsys --type F --rank 4 --show cascade,xi,dominance
  homflow analyze-flow --matrix '[[0,1,0],[0,0,1],[0,0,0]]'
  homflow classify --spec group.json
  homflow simulate --config configs/loglaw_horocycle.cfg --seed 7
  homflow report --run results/loglaw

stdout carries JSON (or the text report); logs go to stderr.
Exit codes: 0 success, 64 usage, 65 configuration or data error, 74 I/O error,
130 interrupted. classify exits 0/1/2 for yes/no/conditional.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src import __version__
from src.cli.manifest import RunManifest
from src.errors import HomflowError, RootSystemError
from src.experiments.config import SEED_ENV, describe_keys, load_config, resolve_seed, with_overrides
from src.experiments.results import dump_json, write_results
from src.experiments.runner import run_experiment
from src.liealg.algebra import DEFAULT_TOL, AlgebraElement, ad_matrix, nilpotency_degree
from src.liealg.flows import QUASI_DIAGONALIZABLE, QUASI_UNIPOTENT, classify_flow, fit_growth_slope, lambda1_profile
from src.reports.summarizer import ResultSummarizer
from src.rootsys.orthogonal import (
    dominates_on_chamber,
    good_type,
    highest_root_cascade,
    kostant_cascade,
    random_strong_orth_system,
    rho_of,
    xi,
)
from src.rootsys.root_system import build_root_system, highest_root
from src.sdclassify.classifier import classify_semisimple
from src.sdclassify.spec_io import group_spec_from_json, verdict_to_json
from src.storage.results_store import ResultsStore

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 64
EXIT_DATAERR = 65
EXIT_IOERR = 74
EXIT_INTERRUPTED = 130

SHOW_CHOICES = ("roots", "cascade", "literal_cascade", "xi", "lambda1", "dominance", "good_type")
DEFAULT_T_GRID = "1,2,4,8,16,32"


class HomflowArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with 64 instead of argparse's 2"""

    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(doc: Dict[str, Any], args: argparse.Namespace, name: str) -> None:
    text = dump_json(doc)
    sys.stdout.write(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, name)
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        logger.info(f"Wrote {path}")


def _read_json(path: str) -> Any:
    """'-' reads stdin; raises OSError when unreadable, ValueError when malformed"""
    if path == "-":
        return json.load(sys.stdin)
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def _float_list(raw: str) -> List[float]:
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{raw}'")


def _show_list(raw: str) -> List[str]:
    items = [v.strip() for v in raw.split(",") if v.strip()]
    unknown = [v for v in items if v not in SHOW_CHOICES]
    if unknown or not items:
        raise argparse.ArgumentTypeError(f"unknown --show item(s) {unknown}; choose from {', '.join(SHOW_CHOICES)}")
    return items


def cmd_rootsys(args: argparse.Namespace) -> int:
    try:
        rs = build_root_system(args.type, args.rank)
    except RootSystemError as e:
        sys.stderr.write(f"homflow rootsys: error: {str(e)}\n")
        return EXIT_USAGE

    doc: Dict[str, Any] = {"type": rs.type_label, "rank": rs.rank, "positive_root_count": len(rs.positive_roots)}
    q = kostant_cascade(rs)
    for item in args.show:
        if item == "roots":
            doc["roots"] = [list(r.coeffs) for r in rs.positive_roots]
        elif item == "cascade":
            doc["cascade"] = [list(r.coeffs) for r in q.sorted_roots()]
        elif item == "literal_cascade":
            doc["literal_cascade"] = [list(r.coeffs) for r in highest_root_cascade(rs).sorted_roots()]
        elif item == "xi":
            doc["xi"] = xi(rs).to_json()
        elif item == "lambda1":
            doc["lambda1"] = list(highest_root(rs).coeffs)
        elif item == "dominance":
            doc["dominance"] = dominates_on_chamber(xi(rs), highest_root(rs))
        elif item == "good_type":
            doc["good_type"] = good_type(rs.type_label, rs.rank)

    if args.random_checks:
        seed = _cli_seed(args)
        rng = np.random.default_rng(seed)
        rho_q = rho_of(q)
        violations = sum(
            1 for _ in range(args.random_checks)
            if not dominates_on_chamber(rho_q, rho_of(random_strong_orth_system(rs, rng)))
        )
        doc["random_checks"] = {"samples": args.random_checks, "seed": seed, "violations": violations}
        if violations:
            logger.warning(f"{violations} random strongly orthogonal systems are not dominated by Q({rs.label})")

    _emit(doc, args, "rootsys.json")
    return EXIT_OK


def cmd_analyze_flow(args: argparse.Namespace) -> int:
    try:
        raw = json.loads(args.matrix) if args.matrix is not None else _read_json(args.matrix_file)
    except ValueError as e:
        sys.stderr.write(f"homflow analyze-flow: error: matrix is not valid JSON: {str(e)}\n")
        return EXIT_DATAERR
    x = AlgebraElement.from_json(raw)
    descriptor = classify_flow(x, args.tol)
    split = descriptor.split
    doc: Dict[str, Any] = {
        "flow": descriptor.to_json(),
        "jordan": {
            "nil": split.nil.tolist(),
            "hyp": split.hyp.tolist(),
            "ell": split.ell.tolist(),
            "reconstruction_error": split.reconstruction_error(x.entries),
            "max_commutator": split.max_commutator(),
        },
    }
    if np.any(split.nil):
        doc["nil_ad_degree"] = nilpotency_degree(ad_matrix(AlgebraElement(split.nil)), args.tol)

    if descriptor.unbounded:
        profile = lambda1_profile(x, args.t_grid, workers=args.workers or 1)
        scale = "log" if descriptor.kind == QUASI_UNIPOTENT else "linear"
        slope, intercept = fit_growth_slope(profile, scale)
        doc["profile"] = [[t, v] for t, v in profile]
        doc["fit"] = {"scale": scale, "slope": slope, "intercept": intercept}
        if descriptor.kind == QUASI_DIAGONALIZABLE:
            doc["fit"]["growth_rate"] = slope

    _emit(doc, args, "flow.json")
    return EXIT_OK


def cmd_classify(args: argparse.Namespace) -> int:
    try:
        data = _read_json(args.spec)
    except ValueError as e:
        sys.stderr.write(f"homflow classify: error: {args.spec} is not valid JSON: {str(e)}\n")
        return EXIT_DATAERR
    spec = group_spec_from_json(data, args.tol)
    verdict = classify_semisimple(spec)
    logger.info(f"Verdict {verdict.is_sd} ({verdict.exponent})")
    _emit(verdict_to_json(verdict), args, "verdict.json")
    return verdict.exit_code


def cmd_simulate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    cfg = with_overrides(cfg, workers=args.workers, out=args.out)
    seed = resolve_seed(cfg, args.seed)
    manifest = RunManifest(config_hash=cfg.content_hash(), seed=seed, experiment=cfg.experiment)
    manifest.write(cfg.out)
    try:
        result = run_experiment(cfg, seed=seed, workers=cfg.workers)
        outputs = write_results(cfg.out, result, cfg.content_hash(), seed)
    except KeyboardInterrupt:
        logger.warning("Interrupted; the run manifest is marked incomplete")
        manifest.finish([], complete=False)
        manifest.write(cfg.out)
        return EXIT_INTERRUPTED
    except BaseException:
        manifest.finish([], complete=False)
        manifest.write(cfg.out)
        raise
    manifest.finish(outputs)
    manifest.write(cfg.out)
    sys.stdout.write(dump_json({
        "experiment": cfg.experiment,
        "status": result.status,
        "out": cfg.out,
        "outputs": manifest.outputs,
        "config_hash": manifest.config_hash,
        "seed": seed,
    }))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    store = ResultsStore(".")
    df = store.load_results(args.run)
    summary = store.get_run_summary(args.run)
    manifest = store.get_run_manifest(args.run)
    summarizer = ResultSummarizer()
    report = summarizer.build_report(df, summary, manifest)
    if args.format == "text":
        text = summarizer.format_report(report)
        sys.stdout.write(text)
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8", newline="\n") as handle:
                handle.write(text)
    else:
        _emit(report, args, "report.json")
    return EXIT_OK


def _cli_seed(args: argparse.Namespace) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    return int(env) if env else 0


def build_parser() -> HomflowArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help=f"random seed (falls back to ${SEED_ENV}, then the config)")
    common.add_argument("--workers", type=int, default=None, help="worker processes for sample-point parallelism")
    common.add_argument("--out", default=None, help="output directory")
    common.add_argument(
        "--log-level", default="WARNING", choices=("DEBUG", "INFO", "WARNING", "ERROR"), help="stderr log level"
    )

    parser = HomflowArgumentParser(
        prog="homflow",
        description="Shrinking-target properties of one-parameter flows on homogeneous spaces.",
    )
    parser.add_argument("--version", action="version", version=f"homflow {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser("rootsys", parents=[common], help="inspect a root system and its cascade")
    p.add_argument("--type", required=True, help="Cartan type A-G")
    p.add_argument("--rank", required=True, type=int)
    p.add_argument("--show", type=_show_list, default=["cascade", "xi", "dominance"],
                   help=f"comma-separated items from {', '.join(SHOW_CHOICES)}")
    p.add_argument("--random-checks", type=int, default=0,
                   help="compare the maximal system against this many random strongly orthogonal systems")
    p.set_defaults(func=cmd_rootsys)

    p = subparsers.add_parser("analyze-flow", parents=[common], help="classify exp(tX) for X in sl_n")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--matrix", help="JSON array of rows")
    source.add_argument("--matrix-file", help="JSON file holding the matrix ('-' for stdin)")
    p.add_argument("--t-grid", type=_float_list, default=_float_list(DEFAULT_T_GRID), help="times for the growth profile")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_analyze_flow)

    p = subparsers.add_parser("classify", parents=[common], help="decide shrinking-target decay of a flow")
    p.add_argument("--spec", required=True, help="group specification JSON ('-' for stdin)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.set_defaults(func=cmd_classify)

    p = subparsers.add_parser(
        "simulate",
        parents=[common],
        help="run a Monte Carlo experiment on the modular surface",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="configuration keys:\n" + describe_keys(),
    )
    p.add_argument("--config", required=True, help="key = value or JSON experiment config")
    p.set_defaults(func=cmd_simulate)

    p = subparsers.add_parser("report", parents=[common], help="summarise the results of a run")
    p.add_argument("--run", required=True, help="run directory written by simulate")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return EXIT_INTERRUPTED
    except HomflowError as e:
        key = getattr(e, "key", None)
        prefix = f"[{key}] " if key else ""
        sys.stderr.write(f"homflow {args.command}: error: {prefix}{str(e)}\n")
        return EXIT_DATAERR
    except OSError as e:
        sys.stderr.write(f"homflow {args.command}: I/O error: {str(e)}\n")
        return EXIT_IOERR


if __name__ == "__main__":
    raise SystemExit(main())
