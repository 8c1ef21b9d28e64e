import json
import os

import pytest

from src.cli import commands
from src.cli.commands import main
from src.cli.manifest import RunManifest, read_manifest
from src.errors import ConfigError

EAH_CONFIG = """\
experiment = eah
n_points = 8
m_max = 64
chunk_size = 4
"""

SL3_GOOD = {"factors": [{"type": "A", "rank": 2, "flow": {"matrix": [[0, 1, 0], [0, 0, 1], [0, 0, 0]]}}]}
SL3_BAD = {"factors": [{"type": "A", "rank": 2, "flow": {"matrix": [[0, 0, 1], [0, 0, 0], [0, 0, 0]]}}]}
SO31_UNKNOWN = {"factors": [{"family": "SO", "d": 3, "flow": {"kind": "quasi_unipotent", "l": 2}}]}


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_json(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


@pytest.fixture
def eah_config(tmp_path):
    path = tmp_path / "eah.cfg"
    path.write_text(EAH_CONFIG, encoding="utf-8")
    return str(path)


def test_rootsys_f4(capsys):
    code, out, _ = run(capsys, "rootsys", "--type", "F", "--rank", "4")
    doc = json.loads(out)
    assert code == 0
    assert doc["positive_root_count"] == 24
    assert doc["dominance"] is True
    assert set(doc) == {"type", "rank", "positive_root_count", "cascade", "xi", "dominance"}


def test_rootsys_show_items(capsys):
    code, out, _ = run(capsys, "rootsys", "--type", "A", "--rank", "2", "--show", "roots,lambda1,good_type")
    doc = json.loads(out)
    assert code == 0
    assert doc["roots"] == [[1, 0], [0, 1], [1, 1]]
    assert doc["lambda1"] == [1, 1]
    assert doc["good_type"] is False


def test_rootsys_random_checks(capsys, tmp_path):
    out_dir = tmp_path / "rs"
    code, out, _ = run(capsys, "rootsys", "--type", "D", "--rank", "5", "--random-checks", "50",
                       "--seed", "3", "--out", str(out_dir))
    doc = json.loads(out)
    assert code == 0
    assert doc["random_checks"] == {"samples": 50, "seed": 3, "violations": 0}
    assert json.loads((out_dir / "rootsys.json").read_text()) == doc


def test_rootsys_invalid_pair_is_usage_error(capsys):
    code, out, err = run(capsys, "rootsys", "--type", "E", "--rank", "5")
    assert code == 64
    assert out == ""
    assert "E" in err


@pytest.mark.parametrize("argv", [
    [],
    ["rootsys", "--type", "A"],
    ["rootsys", "--type", "A", "--rank", "2", "--show", "everything"],
    ["analyze-flow"],
    ["analyze-flow", "--matrix", "[[0]]", "--t-grid", "1,x"],
])
def test_usage_errors_exit_64(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 64


def test_workers_must_be_positive(capsys, eah_config):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--config", eah_config, "--workers", "0"])
    assert info.value.code == 64


def test_analyze_flow_principal_nilpotent(capsys):
    code, out, _ = run(capsys, "analyze-flow", "--matrix", "[[0,1,0],[0,0,1],[0,0,0]]")
    doc = json.loads(out)
    assert code == 0
    assert doc["flow"]["kind"] == "quasi_unipotent"
    assert doc["flow"]["l"] == 4
    assert doc["nil_ad_degree"] == 4
    assert doc["fit"]["scale"] == "log"
    assert len(doc["profile"]) == 6
    assert doc["jordan"]["reconstruction_error"] < 1e-9


def test_analyze_flow_diagonal_reports_growth_rate(capsys):
    code, out, _ = run(capsys, "analyze-flow", "--matrix", "[[1,0],[0,-1]]", "--t-grid", "1,2,3,4")
    doc = json.loads(out)
    assert code == 0
    assert doc["flow"]["kind"] == "quasi_diagonalizable"
    assert doc["fit"]["growth_rate"] == pytest.approx(2.0, rel=1e-6)
    assert "nil_ad_degree" not in doc


def test_analyze_flow_bounded_has_no_profile(capsys):
    code, out, _ = run(capsys, "analyze-flow", "--matrix", "[[0,1],[-1,0]]")
    doc = json.loads(out)
    assert code == 0
    assert doc["flow"]["kind"] == "bounded"
    assert "profile" not in doc


@pytest.mark.parametrize("matrix", ["[[0,1],[0,", "[[1,0],[0,1]]", "[[1,2,3]]"])
def test_analyze_flow_bad_input_exit_65(capsys, matrix):
    code, out, err = run(capsys, "analyze-flow", "--matrix", matrix)
    assert code == 65
    assert out == ""
    assert "error" in err


def test_analyze_flow_from_file(capsys, tmp_path):
    path = write_json(tmp_path, "x.json", {"matrix": [[0, 0, 1], [0, 0, 0], [0, 0, 0]]})
    code, out, _ = run(capsys, "analyze-flow", "--matrix-file", path)
    assert code == 0
    assert json.loads(out)["flow"]["l"] == 2


@pytest.mark.parametrize("spec,code,is_sd", [
    (SL3_GOOD, 0, "yes"),
    (SL3_BAD, 1, "no"),
    (SO31_UNKNOWN, 2, "conditional"),
])
def test_classify_exit_codes(capsys, tmp_path, spec, code, is_sd):
    out_dir = tmp_path / "verdict"
    got, out, _ = run(capsys, "classify", "--spec", write_json(tmp_path, "spec.json", spec), "--out", str(out_dir))
    doc = json.loads(out)
    assert got == code
    assert doc["is_sd"] == is_sd
    assert (out_dir / "verdict.json").exists()


def test_classify_good_sl3_exponent(capsys, tmp_path):
    _, out, _ = run(capsys, "classify", "--spec", write_json(tmp_path, "spec.json", SL3_GOOD))
    assert json.loads(out)["exponent"] == "2(1-ε)"


def test_classify_errors(capsys, tmp_path):
    assert run(capsys, "classify", "--spec", str(tmp_path / "absent.json"))[0] == 74
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "classify", "--spec", str(bad))[0] == 65
    invalid = write_json(tmp_path, "invalid.json", {"factors": [{"type": "A", "rank": 1, "flow": {"kind": "bounded"}}]})
    assert run(capsys, "classify", "--spec", invalid)[0] == 65
    tau_too_large = write_json(tmp_path, "tau.json", {"factors": [
        {"family": "SU", "d": 2, "tau": "7", "flow": {"kind": "quasi_unipotent", "l": 2}},
    ]})
    code, _, err = run(capsys, "classify", "--spec", tau_too_large)
    assert code == 65
    assert "exceeds rho" in err


def test_simulate_writes_results_and_manifest(capsys, tmp_path, eah_config):
    out_dir = tmp_path / "run"
    code, out, _ = run(capsys, "simulate", "--config", eah_config, "--seed", "5", "--out", str(out_dir))
    doc = json.loads(out)
    assert code == 0
    assert doc["experiment"] == "eah"
    assert doc["seed"] == 5
    assert doc["outputs"] == ["results.csv", "summary.json"]
    manifest = read_manifest(str(out_dir))
    assert manifest.complete
    assert manifest.finished is not None
    assert manifest.config_hash == doc["config_hash"]
    for name in ("results.csv", "summary.json"):
        assert "started" not in (out_dir / name).read_text(encoding="utf-8")


def test_simulate_is_reproducible(capsys, tmp_path, eah_config):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "simulate", "--config", eah_config, "--seed", "9", "--out", str(a))[0] == 0
    assert run(capsys, "simulate", "--config", eah_config, "--seed", "9", "--out", str(b), "--workers", "2")[0] == 0
    for name in ("results.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_simulate_seed_from_environment(capsys, tmp_path, eah_config, monkeypatch):
    monkeypatch.setenv("HOMFLOW_SEED", "21")
    _, out, _ = run(capsys, "simulate", "--config", eah_config, "--out", str(tmp_path / "env"))
    assert json.loads(out)["seed"] == 21


def test_simulate_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("experiment = eah\nn_points = 4\nm_max = 8\ncolour = red\n")
    code, _, err = run(capsys, "simulate", "--config", str(bad))
    assert code == 65
    assert "[colour]" in err
    assert run(capsys, "simulate", "--config", str(tmp_path / "absent.cfg"))[0] == 74


def test_simulate_failure_leaves_incomplete_manifest(capsys, tmp_path):
    cfg = tmp_path / "sbc.cfg"
    cfg.write_text("experiment = sbc\nn_points = 4\nm_max = 16\n")
    out_dir = tmp_path / "sbc"
    code, _, err = run(capsys, "simulate", "--config", str(cfg), "--out", str(out_dir))
    assert code == 65
    assert "convergent" in err
    manifest = read_manifest(str(out_dir))
    assert not manifest.complete
    assert manifest.outputs == []


def test_simulate_interrupt_exits_130(capsys, tmp_path, eah_config, monkeypatch):
    def interrupted(*args, **kwargs):
        raise KeyboardInterrupt

    monkeypatch.setattr(commands, "run_experiment", interrupted)
    out_dir = tmp_path / "interrupted"
    assert run(capsys, "simulate", "--config", eah_config, "--out", str(out_dir))[0] == 130
    assert not read_manifest(str(out_dir)).complete


def test_simulate_help_lists_configuration_keys(capsys):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--help"])
    assert info.value.code == 0
    out = capsys.readouterr().out
    for key in ("experiment", "sbc_min_expected", "t_grid", "chunk_size"):
        assert key in out


def test_report_json_and_text(capsys, tmp_path, eah_config):
    run_dir = tmp_path / "run"
    run(capsys, "simulate", "--config", eah_config, "--out", str(run_dir))
    code, out, _ = run(capsys, "report", "--run", str(run_dir))
    doc = json.loads(out)
    assert code == 0
    assert doc["manifest"]["complete"] is True
    assert doc["summary"]["experiment"] == "eah"
    assert "hit_fraction" in doc["results"]["statistics"]
    code, out, _ = run(capsys, "report", "--run", str(run_dir), "--format", "text", "--out", str(tmp_path / "rep"))
    assert code == 0
    assert out.startswith("EXPERIMENT: eah\n")
    assert (tmp_path / "rep" / "report.txt").read_text(encoding="utf-8") == out


def test_report_missing_run_is_io_error(capsys, tmp_path):
    assert run(capsys, "report", "--run", str(tmp_path / "nothing"))[0] == 74


def test_manifest_round_trip(tmp_path):
    manifest = RunManifest(config_hash="abc", seed=1, experiment="sbc")
    manifest.finish([str(tmp_path / "summary.json"), str(tmp_path / "results.csv")])
    manifest.write(str(tmp_path))
    again = read_manifest(str(tmp_path))
    assert again == manifest
    assert again.outputs == ["results.csv", "summary.json"]
    with pytest.raises(ConfigError):
        RunManifest.from_json({"seed": 1})
    (tmp_path / "manifest.json").write_text("{")
    with pytest.raises(ConfigError):
        read_manifest(str(tmp_path))


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert capsys.readouterr().out.startswith("homflow ")
    assert os.path.exists(os.path.join(os.path.dirname(os.path.dirname(__file__)), "homflow.py"))
