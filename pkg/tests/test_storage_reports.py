import json

import numpy as np
import pandas as pd
import pytest

from src.cli.manifest import RunManifest
from src.errors import ConfigError
from src.experiments.results import CSV_COLUMNS
from src.reports.summarizer import ResultSummarizer
from src.storage.results_store import ResultsStore


def result_rows(n_checkpoints=4, statistics=("ratio", "E_m")):
    rows = []
    for stat in statistics:
        for k in range(n_checkpoints):
            m = 2 ** k
            rows.append({
                "experiment": "sbc",
                "m_or_t": m,
                "statistic": stat,
                "value": float(m) if stat == "E_m" else 1.0 + 1.0 / m,
                "stderr": 0.01 if stat == "ratio" else np.nan,
                "n_censored": 0,
                "config_hash": "0123abc",
                "seed": 7,
            })
    return pd.DataFrame(rows, columns=CSV_COLUMNS)


@pytest.fixture
def store(tmp_path):
    root = tmp_path / "results"
    complete = root / "sbc"
    complete.mkdir(parents=True)
    result_rows().to_csv(complete / "results.csv", index=False)
    (complete / "summary.json").write_text(json.dumps({"experiment": "sbc", "status": "ok", "notes": []}))
    manifest = RunManifest(config_hash="0123abc", seed=7, experiment="sbc")
    manifest.finish(["results.csv", "summary.json"])
    manifest.write(str(complete))

    interrupted = root / "nested" / "interrupted"
    interrupted.mkdir(parents=True)
    RunManifest(config_hash="ffff", seed=1, experiment="eah").write(str(interrupted))

    (root / "empty").mkdir()
    return ResultsStore(str(root))


def test_list_runs(store):
    assert store.is_available()
    assert store.list_runs() == ["nested/interrupted", "sbc"]


def test_missing_root(tmp_path):
    store = ResultsStore(str(tmp_path / "nowhere"))
    assert not store.is_available()
    assert store.list_runs() == []


def test_manifests(store):
    assert store.get_run_manifest("sbc")["complete"] is True
    assert store.get_run_manifest("nested/interrupted")["complete"] is False
    assert store.get_run_manifest("empty") == {}


def test_load_results_keeps_hash_as_text(store):
    df = store.load_results("sbc")
    assert list(df.columns) == CSV_COLUMNS
    assert set(df["config_hash"]) == {"0123abc"}
    assert len(df) == 8


def test_load_results_rejects_foreign_tables(store, tmp_path):
    pd.DataFrame({"a": [1]}).to_csv(tmp_path / "results" / "empty" / "results.csv", index=False)
    with pytest.raises(ConfigError, match="lacks result columns"):
        store.load_results("empty")


def test_schema(store):
    schema = {col["name"]: col for col in store.get_results_schema("sbc")}
    assert schema["statistic"]["distinct"] == 2
    assert schema["stderr"]["nulls"] == 4


def test_query_results_filters(store):
    ok, df = store.query_results("sbc", statistic="ratio", m_range=(2, 4))
    assert ok
    assert df["m_or_t"].tolist() == [2, 4]
    assert set(df["statistic"]) == {"ratio"}


def test_query_results_reports_errors(store):
    ok, message = store.query_results("nested/interrupted")
    assert not ok
    assert "results.csv" in message


def test_summary_file(store):
    assert store.get_run_summary("sbc")["status"] == "ok"
    with pytest.raises(OSError):
        store.get_run_summary("nested/interrupted")


def test_small_report_carries_full_table():
    summarizer = ResultSummarizer()
    report = summarizer.build_report(result_rows(), {"experiment": "sbc", "status": "ok"}, {})
    results = report["results"]
    assert not results["is_summarized"]
    assert len(results["full_data"]) == 8
    ratio = results["statistics"]["ratio"]
    assert ratio["checkpoints"] == 4
    assert ratio["m_or_t"] == [1, 8]
    assert ratio["max"] == 2.0
    assert ratio["last"] == 1.125
    assert results["full_data"][4]["stderr"] is None


def test_large_report_is_sampled():
    summarizer = ResultSummarizer(max_rows_for_full_context=10, sample_size=3)
    df = result_rows(n_checkpoints=20)
    first = summarizer.build_report(df)["results"]
    second = summarizer.build_report(df)["results"]
    assert first["is_summarized"]
    assert first["full_data"] is None
    assert len(first["sample_data"]["first_rows"]) == 3
    assert len(first["sample_data"]["middle_sample"]) == 3
    assert first["sample_data"] == second["sample_data"]


def test_empty_table():
    report = ResultSummarizer().build_report(pd.DataFrame(columns=CSV_COLUMNS))
    assert report["results"]["row_count"] == 0
    assert report["results"]["statistics"] == {}


def test_statistic_without_finite_values():
    df = result_rows(statistics=("ratio",))
    df["value"] = np.nan
    stats = ResultSummarizer().build_report(df)["results"]["statistics"]["ratio"]
    assert stats["note"] == "no finite values"


def test_text_report():
    summarizer = ResultSummarizer()
    summary = {"experiment": "sbc", "status": "ok", "notes": ["short run"], "final_ratio": 1.02}
    manifest = {"config_hash": "0123abc", "seed": 7, "complete": True}
    ok, text = summarizer.summarize_run(result_rows(), summary, manifest)
    assert ok
    assert text.startswith("EXPERIMENT: sbc\nSTATUS: ok\n")
    assert "SEED: 7" in text
    assert "NOTE: short run" in text
    assert "- ratio (4 checkpoints, m_or_t 1..8)" in text
    assert "- final_ratio: 1.02" in text


def test_summarize_run_rejects_non_frames():
    ok, message = ResultSummarizer().summarize_run("not a frame")
    assert not ok
    assert "DataFrame" in message
