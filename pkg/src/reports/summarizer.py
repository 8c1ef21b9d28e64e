import json
import logging
import math
import traceback
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
import streamlit as st

logger = logging.getLogger(__name__)


class ResultSummarizer:
    """
    Turns a run's result table and summary document into a compact report:
    per-statistic summary statistics, a sample of rows for large tables and
    a plain-text rendering.
    """

    def __init__(self, max_rows_for_full_context: int = 100, sample_size: int = 5):
        self.max_rows_for_full_context = max_rows_for_full_context
        self.sample_size = sample_size

    def _prepare_result(self, df: pd.DataFrame) -> Dict[str, Any]:
        """
        Summary statistics per statistic name; the full table when small,
        first/middle/last rows otherwise.
        """
        row_count = len(df)
        result = {
            "row_count": row_count,
            "columns": list(df.columns),
            "is_summarized": False,
            "statistics": {},
            "sample_data": None,
            "full_data": None,
        }
        if row_count == 0:
            return result

        for name, group in df.groupby("statistic", sort=True):
            values = group["value"].astype(float)
            finite = values[np.isfinite(values)]
            stats: Dict[str, Any] = {
                "checkpoints": int(len(group)),
                "m_or_t": [_number(group["m_or_t"].min()), _number(group["m_or_t"].max())],
                "n_censored": int(group["n_censored"].max()) if "n_censored" in group else 0,
            }
            if len(finite):
                stats.update({
                    "min": float(finite.min()),
                    "max": float(finite.max()),
                    "mean": float(finite.mean()),
                    "median": float(finite.median()),
                    "last": float(values.iloc[-1]) if np.isfinite(values.iloc[-1]) else None,
                })
            else:
                stats["note"] = "no finite values"
            result["statistics"][str(name)] = stats

        if row_count <= self.max_rows_for_full_context:
            result["full_data"] = _records(df)
            return result

        logger.info(f"Sampling rows of a large result table ({row_count} rows)")
        result["is_summarized"] = True
        middle = df.iloc[self.sample_size:-self.sample_size]
        middle_sample = []
        if len(middle) > 0:
            # fixed random_state keeps reports reproducible
            middle_sample = _records(middle.sample(min(self.sample_size, len(middle)), random_state=0).sort_index())
        result["sample_data"] = {
            "first_rows": _records(df.head(self.sample_size)),
            "middle_sample": middle_sample,
            "last_rows": _records(df.tail(self.sample_size)),
        }
        return result

    def build_report(
        self, df: pd.DataFrame, summary: Optional[Dict[str, Any]] = None, manifest: Optional[Dict[str, Any]] = None
    ) -> Dict[str, Any]:
        report = {
            "manifest": manifest or {},
            "summary": summary or {},
            "results": self._prepare_result(df),
        }
        logger.info(f"Built report over {report['results']['row_count']} result rows")
        return report

    def format_report(self, report: Dict[str, Any]) -> str:
        """Plain-text rendering of build_report's output"""
        summary = report.get("summary", {})
        manifest = report.get("manifest", {})
        results = report["results"]
        text = f"EXPERIMENT: {summary.get('experiment', manifest.get('experiment', 'unknown'))}\n"
        text += f"STATUS: {summary.get('status', 'unknown')}\n"
        if manifest:
            text += f"CONFIG HASH: {manifest.get('config_hash')}\n"
            text += f"SEED: {manifest.get('seed')}\n"
            text += f"COMPLETE: {manifest.get('complete')}\n"
        for note in summary.get("notes", []):
            text += f"NOTE: {note}\n"
        text += f"\nRESULT ROWS: {results['row_count']}\n"

        if results["statistics"]:
            text += "\nSTATISTICS:\n"
            for name, stats in results["statistics"].items():
                text += f"- {name} ({stats['checkpoints']} checkpoints, m_or_t {stats['m_or_t'][0]}..{stats['m_or_t'][1]})\n"
                for key in ("min", "max", "mean", "median", "last"):
                    if key in stats and stats[key] is not None:
                        text += f"  - {key}: {stats[key]:.6g}\n"
                if stats.get("n_censored"):
                    text += f"  - censored: {stats['n_censored']}\n"
                if "note" in stats:
                    text += f"  - {stats['note']}\n"

        extra = {k: v for k, v in summary.items() if k not in ("experiment", "status", "notes", "config_hash", "seed", "schema_version")}
        if extra:
            text += "\nSUMMARY:\n"
            for key in sorted(extra):
                text += f"- {key}: {json.dumps(extra[key], sort_keys=True)[:500]}\n"
        return text

    def summarize_run(
        self, df: pd.DataFrame, summary: Optional[Dict[str, Any]] = None, manifest: Optional[Dict[str, Any]] = None
    ) -> Tuple[bool, str]:
        """(True, text report) or (False, error message)"""
        try:
            if not isinstance(df, pd.DataFrame):
                return False, f"Expected DataFrame for results, got {type(df)}."
            return True, self.format_report(self.build_report(df, summary, manifest))
        except Exception as e:
            logger.error(f"Error in summarize_run: {str(e)}")
            logger.error(traceback.format_exc())
            return False, f"Error generating report: {str(e)}"


def _number(value: Any) -> Any:
    value = float(value)
    return int(value) if value.is_integer() else value


def _records(df: pd.DataFrame) -> List[Dict[str, Any]]:
    records = df.replace({np.nan: None}).to_dict(orient="records")
    for record in records:
        for key, value in record.items():
            if isinstance(value, float) and not math.isfinite(value):
                record[key] = str(value)
            elif not (value is None or isinstance(value, (str, int, float, bool))):
                record[key] = value.item() if hasattr(value, "item") else str(value)
    return records


def get_result_summarizer() -> ResultSummarizer:
    """Get or create the result summarizer singleton"""
    if "result_summarizer" not in st.session_state:
        logger.info("Creating new ResultSummarizer instance")
        st.session_state.result_summarizer = ResultSummarizer()
    return st.session_state.result_summarizer
