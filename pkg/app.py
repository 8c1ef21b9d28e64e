import logging

import streamlit as st

from src import __version__
from src.pages.flow_page import flow_page
from src.pages.results_page import results_page
from src.pages.rootsys_page import rootsys_page
from src.pages.simulation_page import simulation_page
from src.storage.results_store import get_results_store

logging.basicConfig(level=logging.INFO)

# Set page configuration
st.set_page_config(
    page_title="homflow",
    page_icon="🌀",
    layout="wide",
    initial_sidebar_state="expanded"
)


def main():
    st.title("homflow")
    st.markdown("""
    Shrinking targets for one-parameter flows on homogeneous spaces: root-system
    diagnostics, the shrinking-target decay classifier and Monte Carlo experiments
    on the modular surface.
    """)

    store = get_results_store()
    st.sidebar.subheader("Results store")
    if store.is_available():
        st.sidebar.success(f"✅ {store.root}: {len(store.list_runs())} run(s)")
    else:
        st.sidebar.info(f"{store.root} does not exist yet; runs from the Simulation tab will create it.")
    st.sidebar.caption(f"homflow {__version__}")

    tab1, tab2, tab3, tab4 = st.tabs(["Root systems", "Flow classifier", "Simulation", "Results explorer"])

    with tab1:
        rootsys_page()

    with tab2:
        flow_page()

    with tab3:
        simulation_page(store.root)

    with tab4:
        results_page()


if __name__ == "__main__":
    main()
