from cgc.core.paths import REPORTS_DIR

BENCH_RUNS = 5
BENCH_PRESETS = ("cgc", "cgc_x")

SUMMARY_MARKDOWN = REPORTS_DIR / "summary.md"
SUMMARY_CSV = REPORTS_DIR / "summary.csv"
SUMMARY_COLUMNS = (
    "dataset",
    "preset",
    "ratio",
    "model",
    "runs",
    "acc_mean",
    "acc_std",
    "condense_ms",
)
