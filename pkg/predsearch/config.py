import os

LOG_LEVEL = os.getenv("PS_LOG_LEVEL", "INFO")

# Tolerances (standard solver conventions)
FEAS_TOL = float(os.getenv("PS_FEAS_TOL", "1e-6"))
INT_TOL = float(os.getenv("PS_INT_TOL", "1e-6"))
REL_GAP_TOL = float(os.getenv("PS_REL_GAP_TOL", "1e-6"))

# Desk-scale budgets: 10 s per solve, 60 s for the BKS run (full scale was 1,000 s / 3,600 s)
TIME_LIMIT = float(os.getenv("PS_TIME_LIMIT", "10"))
BKS_TIME_LIMIT = float(os.getenv("PS_BKS_TIME_LIMIT", "60"))
POOL_SIZE = int(os.getenv("PS_POOL_SIZE", "100"))

# GNN / training
HIDDEN_DIM = int(os.getenv("PS_HIDDEN_DIM", "64"))
LEARNING_RATE = float(os.getenv("PS_LR", "0.003"))
BATCH_SIZE = int(os.getenv("PS_BATCH_SIZE", "8"))
EPOCHS = int(os.getenv("PS_EPOCHS", "100"))

WORKERS = int(os.getenv("PS_WORKERS", "4"))
MODEL_PATH = os.getenv("PS_MODEL_PATH", "model.json")
SEED = int(os.getenv("PS_SEED", "0"))

# Generator defaults (desk scale)
IS_NODES = int(os.getenv("PS_IS_NODES", "150"))
IS_AFFINITY = int(os.getenv("PS_IS_AFFINITY", "4"))
CA_ITEMS = int(os.getenv("PS_CA_ITEMS", "30"))
CA_BIDS = int(os.getenv("PS_CA_BIDS", "80"))
