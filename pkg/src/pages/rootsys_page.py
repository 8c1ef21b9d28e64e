import logging
import traceback
from typing import Any, Tuple

import pandas as pd
import plotly.express as px
import streamlit as st

from src.errors import HomflowError
from src.rootsys.orthogonal import dominates_on_chamber, good_type, highest_root_cascade, kostant_cascade, rho_of, xi
from src.rootsys.root_system import VALID_RANKS, build_root_system, highest_root

logger = logging.getLogger(__name__)


def inspect_root_system(type_label: str, rank: int) -> Tuple[bool, Any]:
    """Positive roots, both cascades, xi and the dominance verdict"""
    try:
        rs = build_root_system(type_label, rank)
        q = kostant_cascade(rs)
        literal = highest_root_cascade(rs)
        roots = pd.DataFrame({
            "root": [str(r) for r in rs.positive_roots],
            "height": [r.height for r in rs.positive_roots],
            "in_cascade": [r in q.roots for r in rs.positive_roots],
        })
        return True, {
            "label": rs.label,
            "roots": roots,
            "cascade": [str(r) for r in q.sorted_roots()],
            "literal_cascade": [str(r) for r in literal.sorted_roots()],
            "literal_is_maximal": rho_of(literal) == rho_of(q),
            "xi": xi(rs).to_json(),
            "lambda1": str(highest_root(rs)),
            "dominance": dominates_on_chamber(xi(rs), highest_root(rs)),
            "good_type": good_type(rs.type_label, rs.rank),
        }
    except HomflowError as e:
        logger.error(f"Error inspecting {type_label}{rank}: {str(e)}")
        return False, str(e)
    except Exception as e:
        logger.error(traceback.format_exc())
        return False, f"Unexpected error: {str(e)}"


def rootsys_page():
    st.header("Root systems")
    st.markdown("""
    Build an irreducible reduced root system, its maximal strongly orthogonal system Q
    and the half-sum xi, and check whether xi dominates the highest root on the Weyl chamber.
    """)

    col1, col2 = st.columns(2)
    type_label = col1.selectbox("Type", list(VALID_RANKS), index=5)
    rank = col2.number_input("Rank", min_value=1, max_value=8, value=4, step=1)
    col2.caption(f"Valid ranks for {type_label}: {VALID_RANKS[type_label]}")

    success, result = inspect_root_system(type_label, int(rank))
    if not success:
        st.error(result)
        return

    if result["dominance"]:
        st.success(f"{result['label']}: xi dominates the highest root, every unbounded flow decays summably")
    else:
        st.warning(f"{result['label']}: xi does not dominate the highest root")

    st.subheader("Maximal strongly orthogonal system")
    st.write(", ".join(result["cascade"]))
    if not result["literal_is_maximal"]:
        st.info("The highest-root cascade is not maximal here: " + ", ".join(result["literal_cascade"]))
    st.write(f"xi = ({', '.join(result['xi'])}), highest root = {result['lambda1']}")

    st.subheader(f"Positive roots ({len(result['roots'])})")
    counts = result["roots"].groupby("height").size().reset_index(name="count")
    st.plotly_chart(px.bar(counts, x="height", y="count", title="Positive roots by height"), use_container_width=True)
    st.dataframe(result["roots"], use_container_width=True)
