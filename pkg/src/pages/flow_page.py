import json
import logging
import traceback
from typing import Any, Tuple

import pandas as pd
import plotly.express as px
import streamlit as st

from src.errors import HomflowError
from src.liealg.algebra import AlgebraElement
from src.liealg.flows import QUASI_UNIPOTENT, classify_flow, fit_growth_slope, lambda1_profile
from src.sdclassify.classifier import classify_semisimple
from src.sdclassify.spec_io import group_spec_from_json, verdict_to_json

logger = logging.getLogger(__name__)

EXAMPLE_SPECS = {
    "SL3, good flow": {"factors": [{"type": "A", "rank": 2, "flow": {"matrix": [[0, 1, 0], [0, 0, 1], [0, 0, 0]]}}]},
    "SL3, E13": {"factors": [{"type": "A", "rank": 2, "flow": {"matrix": [[0, 0, 1], [0, 0, 0], [0, 0, 0]]}}]},
    "SO(3,1), unknown gap": {"factors": [{"family": "SO", "d": 3, "flow": {"kind": "quasi_unipotent", "l": 2}}]},
    "F4 x SL3": {"factors": [
        {"type": "F", "rank": 4, "flow": {"kind": "quasi_unipotent", "l": 2}},
        {"type": "A", "rank": 2, "flow": {"kind": "bounded"}},
    ]},
}

if "spec_text" not in st.session_state:
    st.session_state.spec_text = json.dumps(EXAMPLE_SPECS["SL3, good flow"], indent=2)


def analyze_matrix(text: str) -> Tuple[bool, Any]:
    try:
        x = AlgebraElement.from_json(json.loads(text))
        descriptor = classify_flow(x)
        result = {"descriptor": descriptor.to_json(), "profile": None, "fit": None}
        if descriptor.unbounded:
            profile = lambda1_profile(x, [1, 2, 4, 8, 16, 32])
            scale = "log" if descriptor.kind == QUASI_UNIPOTENT else "linear"
            result["profile"] = pd.DataFrame(profile, columns=["t", "lambda1"])
            result["fit"] = (scale,) + fit_growth_slope(profile, scale)
        return True, result
    except (HomflowError, ValueError) as e:
        logger.error(f"Error analyzing matrix: {str(e)}")
        return False, str(e)
    except Exception as e:
        logger.error(traceback.format_exc())
        return False, f"Unexpected error: {str(e)}"


def classify_spec(text: str) -> Tuple[bool, Any]:
    try:
        verdict = classify_semisimple(group_spec_from_json(json.loads(text)))
        return True, verdict_to_json(verdict)
    except (HomflowError, ValueError) as e:
        logger.error(f"Error classifying spec: {str(e)}")
        return False, str(e)
    except Exception as e:
        logger.error(traceback.format_exc())
        return False, f"Unexpected error: {str(e)}"


def flow_page():
    st.header("Flow classifier")

    st.subheader("Single flow")
    matrix_text = st.text_input("Generator X in sl_n (JSON rows):", value="[[0, 1, 0], [0, 0, 1], [0, 0, 0]]")
    if matrix_text:
        success, result = analyze_matrix(matrix_text)
        if success:
            st.json(result["descriptor"])
            if result["profile"] is not None:
                scale, slope, _ = result["fit"]
                st.plotly_chart(
                    px.line(result["profile"], x="t", y="lambda1", log_x=scale == "log", markers=True,
                            title=f"Growth of exp(t ad X): fitted {scale} slope {slope:.3f}"),
                    use_container_width=True,
                )
        else:
            st.error(result)

    st.subheader("Group specification")
    col1, col2 = st.columns(2)
    for i, (name, spec) in enumerate(EXAMPLE_SPECS.items()):
        column = col1 if i % 2 == 0 else col2
        if column.button(name, key=f"spec_example_{i}"):
            st.session_state.spec_text = json.dumps(spec, indent=2)
            st.rerun()

    spec_text = st.text_area("GroupSpec JSON:", value=st.session_state.spec_text, height=200)
    if st.button("Classify", type="primary"):
        st.session_state.spec_text = spec_text
        success, verdict = classify_spec(spec_text)
        if not success:
            st.error(verdict)
            return
        message = f"is_sd = {verdict['is_sd']}, exponent {verdict['exponent']}"
        if verdict["is_sd"] == "yes":
            st.success(message)
        elif verdict["is_sd"] == "no":
            st.error(message)
        else:
            st.warning(message)
        for line in verdict["rationale"]:
            st.markdown(f"- {line}")
