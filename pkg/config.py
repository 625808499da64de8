# config.py

import os
from dotenv import load_dotenv

load_dotenv()

# --- Output Settings ---
OUT_DIR = os.getenv("CHISME_OUT_DIR", "./results")
SHOW_PROGRESS = os.getenv("CHISME_SHOW_PROGRESS", "1") not in ("0", "false", "False", "")

# --- Sweep Settings ---
JOBS = int(os.getenv("CHISME_JOBS", "1"))
LOSS_THRESHOLD = float(os.getenv("CHISME_LOSS_THRESHOLD", "0.5"))

# --- Numeric Settings ---
# Block length used by the blockwise similarity / merge kernels.
VECTOR_BLOCK = int(os.getenv("CHISME_VECTOR_BLOCK", "4096"))

# --- Topology Settings ---
TOPOLOGY_RETRIES = int(os.getenv("CHISME_TOPOLOGY_RETRIES", "100"))
DEFAULT_REWIRE_PROB = float(os.getenv("CHISME_REWIRE_PROB", "0.1"))

# --- Test Settings ---
RUN_SLOW = os.getenv("CHISME_RUN_SLOW", "0") == "1"
