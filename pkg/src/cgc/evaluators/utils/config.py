from cgc.core.paths import REPORTS_DIR

# GCN recipe
DEFAULT_HIDDEN = 256
DEFAULT_LR = 0.01
DEFAULT_WEIGHT_DECAY = 5e-4
DEFAULT_DROPOUT = 0.5
DEFAULT_EPOCHS = 600
DEFAULT_REPEATS = 5
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8
SPARSE_INPUT_DENSITY = 0.1  # Below this, GCN inputs stay in CSR form

# SGC-ridge
DEFAULT_RIDGE = 1e-2

# Reports
REPORT_CSV_COLUMNS = (
    "dataset",
    "preset",
    "ratio",
    "model",
    "acc_mean",
    "acc_std",
    "condense_ms",
    "seed",
)
RESULTS_CSV = REPORTS_DIR / "results.csv"
