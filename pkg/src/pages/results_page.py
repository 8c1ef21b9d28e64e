import plotly.express as px
import streamlit as st

from src.reports.summarizer import get_result_summarizer
from src.storage.results_store import get_results_store

if "report_text" not in st.session_state:
    st.session_state.report_text = ""


def set_report_text(text: str):
    st.session_state.report_text = text


def results_page():
    st.header("Results explorer")
    store = get_results_store()

    runs = store.list_runs()
    if not runs:
        st.warning(f"No runs found under {store.root}.")
        return
    st.success(f"Found {len(runs)} run(s) under {store.root}.")

    run = st.selectbox("Select a run:", runs)
    manifest = store.get_run_manifest(run)
    if manifest:
        if not manifest.get("complete"):
            st.warning("This run is incomplete (interrupted or failed).")
        st.json(manifest)

    success, df = store.query_results(run)
    if not success:
        st.error(f"Failed to load results: {df}")
        return

    st.subheader("Schema")
    st.dataframe(store.get_results_schema(run), use_container_width=True)

    statistic = st.selectbox("Statistic:", sorted(df["statistic"].unique()))
    ok, shown = store.query_results(run, statistic=statistic)
    if ok and len(shown):
        st.plotly_chart(
            px.line(shown, x="m_or_t", y="value", error_y="stderr", log_x=True, markers=True, title=statistic),
            use_container_width=True,
        )
        st.dataframe(shown, use_container_width=True)

    st.download_button(
        label="Download results as CSV",
        data=df.to_csv(index=False),
        file_name=f"{run.replace('/', '_')}_results.csv",
        mime="text/csv",
    )

    if st.button("Summarize run"):
        try:
            summary = store.get_run_summary(run)
        except Exception as e:
            summary = {"notes": [f"summary.json unavailable: {str(e)}"]}
        ok, text = get_result_summarizer().summarize_run(df, summary, manifest)
        set_report_text(text if ok else f"Error: {text}")

    if st.session_state.report_text:
        st.subheader("Report")
        st.code(st.session_state.report_text)
