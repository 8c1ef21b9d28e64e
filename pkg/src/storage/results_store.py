import json
import logging
import os
import traceback
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
import streamlit as st

from src.cli.manifest import MANIFEST_NAME, read_manifest
from src.errors import ConfigError, HomflowError
from src.experiments.results import CSV_COLUMNS

logger = logging.getLogger(__name__)

RESULTS_CSV = "results.csv"
SUMMARY_JSON = "summary.json"


class ResultsStore:
    """Read-only access to run directories written by `homflow simulate`"""

    def __init__(self, root: Optional[str] = None):
        self.root = root or "results"

    def run_path(self, run: str) -> str:
        return run if os.path.isabs(run) else os.path.join(self.root, run)

    def is_available(self) -> bool:
        return os.path.isdir(self.root)

    def list_runs(self) -> List[str]:
        """Run directories below the root holding a manifest or a results file, sorted by name"""
        if not self.is_available():
            logger.warning(f"Results root {self.root} does not exist")
            return []
        runs = []
        for dirpath, _, filenames in os.walk(self.root):
            if MANIFEST_NAME in filenames or RESULTS_CSV in filenames:
                runs.append(os.path.relpath(dirpath, self.root))
        return sorted(runs)

    def get_run_manifest(self, run: str) -> Dict[str, Any]:
        path = self.run_path(run)
        if not os.path.exists(os.path.join(path, MANIFEST_NAME)):
            return {}
        return read_manifest(path).to_json()

    def get_run_summary(self, run: str) -> Dict[str, Any]:
        path = os.path.join(self.run_path(run), SUMMARY_JSON)
        with open(path, encoding="utf-8") as handle:
            try:
                return json.load(handle)
            except json.JSONDecodeError as e:
                raise ConfigError(f"Malformed summary file {path}: {str(e)}")

    def load_results(self, run: str) -> pd.DataFrame:
        """Raises OSError when the file is missing, ConfigError when its columns are wrong"""
        path = os.path.join(self.run_path(run), RESULTS_CSV)
        df = pd.read_csv(path, encoding="utf-8", dtype={"config_hash": str})
        missing = [c for c in CSV_COLUMNS if c not in df.columns]
        if missing:
            raise ConfigError(f"{path} lacks result columns {missing}")
        logger.info(f"Loaded {len(df)} result rows from {path}")
        return df[CSV_COLUMNS]

    def get_results_schema(self, run: str) -> List[Dict[str, Any]]:
        """Column name, dtype, null count and distinct count of a run's results"""
        df = self.load_results(run)
        columns = []
        for col in df.columns:
            columns.append({
                "name": col,
                "type": str(df[col].dtype),
                "nulls": int(df[col].isna().sum()),
                "distinct": int(df[col].nunique(dropna=True)),
            })
        return columns

    def query_results(
        self, run: str, statistic: Optional[str] = None, m_range: Optional[Tuple[float, float]] = None
    ) -> Tuple[bool, Any]:
        """Filtered results of one run as (True, DataFrame) or (False, message)"""
        try:
            df = self.load_results(run)
            if statistic:
                df = df[df["statistic"] == statistic]
            if m_range is not None:
                lo, hi = m_range
                df = df[(df["m_or_t"] >= lo) & (df["m_or_t"] <= hi)]
            return True, df.reset_index(drop=True)
        except (OSError, HomflowError, ValueError) as e:
            logger.error(f"Error loading results of run {run}: {str(e)}")
            return False, str(e)
        except Exception as e:
            logger.error(traceback.format_exc())
            return False, f"Unexpected error reading run {run}: {str(e)}"


def get_results_store() -> ResultsStore:
    """Get or create the results store singleton"""
    if "results_store" not in st.session_state:
        root = st.secrets.get("homflow", {}).get("results_root", "results") if _has_secrets() else "results"
        st.session_state.results_store = ResultsStore(root)
    return st.session_state.results_store


def _has_secrets() -> bool:
    try:
        return "homflow" in st.secrets
    except Exception:
        # no secrets.toml present
        return False
