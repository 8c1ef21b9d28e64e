import logging
import os
import traceback
from typing import Any, Dict, Tuple

import plotly.express as px
import streamlit as st

from src.cli.manifest import RunManifest
from src.errors import HomflowError
from src.experiments.config import EXPERIMENTS, config_from_mapping
from src.experiments.results import results_frame, write_results
from src.experiments.runner import run_experiment

logger = logging.getLogger(__name__)

# small budgets so that a run finishes while the page waits
DEFAULTS = {
    "n_points": 200,
    "m_max": 2000,
    "seed": 0,
}

if "simulation_result" not in st.session_state:
    st.session_state.simulation_result = None


def dashboard_defaults() -> Dict[str, Any]:
    defaults = dict(DEFAULTS)
    try:
        defaults.update(st.secrets.get("homflow", {}).get("simulation", {}))
    except Exception:
        # no secrets.toml present
        pass
    return defaults


def run_simulation(values: Dict[str, Any], out_dir: str) -> Tuple[bool, Any]:
    """Run one experiment in-process and write its files under out_dir"""
    try:
        cfg = config_from_mapping({**values, "out": out_dir, "workers": 1})
        manifest = RunManifest(config_hash=cfg.content_hash(), seed=cfg.seed, experiment=cfg.experiment)
        result = run_experiment(cfg, seed=cfg.seed, workers=1)
        outputs = write_results(out_dir, result, cfg.content_hash(), cfg.seed)
        manifest.finish(outputs)
        manifest.write(out_dir)
        return True, {"result": result, "frame": results_frame(result, cfg.content_hash(), cfg.seed)}
    except HomflowError as e:
        logger.error(f"Simulation failed: {str(e)}")
        return False, str(e)
    except Exception as e:
        logger.error(traceback.format_exc())
        return False, f"Unexpected error: {str(e)}"


def simulation_page(results_root: str):
    st.header("Simulation")
    st.markdown("""
    Run a small Monte Carlo experiment on the modular surface. Larger runs belong to
    `homflow simulate`, which uses a worker pool.
    """)
    defaults = dashboard_defaults()

    with st.form("simulation_form"):
        col1, col2, col3 = st.columns(3)
        experiment = col1.selectbox("Experiment", EXPERIMENTS)
        flow = col2.selectbox("Flow", ["horocycle", "geodesic"])
        target = col3.selectbox("Target", ["cusp", "ball"])
        n_points = col1.number_input("Sample points", min_value=1, value=int(defaults["n_points"]))
        m_max = col2.number_input("Orbit length m_max", min_value=1, value=int(defaults["m_max"]))
        seed = col3.number_input("Seed", min_value=0, value=int(defaults["seed"]))
        run_name = st.text_input("Run name", value=f"{experiment}_{flow}")
        submitted = st.form_submit_button("Run", type="primary")

    if submitted:
        values = {
            "experiment": experiment,
            "flow": flow,
            "target": target,
            "n_points": int(n_points),
            "m_max": int(m_max),
            "seed": int(seed),
        }
        with st.spinner("Running experiment..."):
            success, outcome = run_simulation(values, os.path.join(results_root, run_name))
        if success:
            st.session_state.simulation_result = outcome
        else:
            st.session_state.simulation_result = None
            st.error(outcome)

    outcome = st.session_state.simulation_result
    if outcome is None:
        return
    result, frame = outcome["result"], outcome["frame"]
    if result.status == "ok":
        st.success(f"{result.experiment}: status {result.status}")
    else:
        st.warning(f"{result.experiment}: status {result.status}")
    for note in result.notes:
        st.info(note)

    statistic = st.selectbox("Statistic", sorted(frame["statistic"].unique()))
    shown = frame[frame["statistic"] == statistic]
    st.plotly_chart(
        px.line(shown, x="m_or_t", y="value", error_y="stderr", log_x=True, markers=True, title=statistic),
        use_container_width=True,
    )
    st.dataframe(frame, use_container_width=True)
