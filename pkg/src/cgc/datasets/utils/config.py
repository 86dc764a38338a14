FORMAT_VERSION = 1

# Dataset directory layout
META_FILE = "meta.json"
PROVENANCE_FILE = "provenance.json"
FEATURES_FILE = "features.f32"
ADJ_OFFSETS_FILE = "adj_offsets.u64"
ADJ_INDICES_FILE = "adj_indices.u32"
ADJ_VALUES_FILE = "adj_values.f64"  # Only written for weighted graphs
LABELS_FILE = "labels.u32"
SPLIT_FILES = {
    "train_idx": "train.u32",
    "val_idx": "val.u32",
    "test_idx": "test.u32",
}

# Little-endian fixed-width payloads
FEATURE_DTYPE = "<f4"
OFFSET_DTYPE = "<u8"
INDEX_DTYPE = "<u4"
VALUE_DTYPE = "<f8"

# Planetoid raw files
PLANETOID_PARTS = ("x", "y", "tx", "ty", "allx", "ally", "graph")
PLANETOID_NUM_VAL = 500

# Synthetic block model
SBM_TRAIN_FRACTION = 0.6
SBM_VAL_FRACTION = 0.2
