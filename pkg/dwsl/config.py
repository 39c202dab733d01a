"""
Configuration settings for the DWSL engine.
"""

import os
from pathlib import Path
from typing import Tuple

from dotenv import load_dotenv

load_dotenv()

# Base directories
ROOT_DIR = Path(__file__).parent.parent
DATA_DIR = Path(os.getenv("DWSL_DATA_DIR", ROOT_DIR / "data"))
DATASETS_DIR = DATA_DIR / "datasets"
RUNS_DIR = Path(os.getenv("DWSL_RUNS_DIR", DATA_DIR / "runs"))

# File formats
DATASET_FORMAT_VERSION = 1
CHECKPOINT_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1

# Algorithm hyperparameters (alpha, beta and max clip shared by DWSL and DWSL-B)
DEFAULT_ALPHA = 1.0
DEFAULT_BETA = 0.05
DEFAULT_CLIP = 10.0
DEFAULT_N_STEP = 1
DWSL_B_TARGET_PERIOD = 20
DWSL_B_POLYAK = 0.05
DEFAULT_EXPECTILE = 0.7

# Optimisation
DEFAULT_LEARNING_RATE = 5e-4
DEFAULT_BATCH_SIZE = 256
DEFAULT_TRAIN_STEPS = 10000
DEFAULT_HIDDEN_SIZES: Tuple[int, ...] = (64, 64)
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8
# Final layer starts near zero so an untrained classifier is close to uniform
FINAL_LAYER_SCALE = 1e-2

# Evaluation
EVAL_EVERY = 2000
EVAL_EPISODES = 100
EVAL_STRATEGY = "all_reachable"

# Behavior policies: Gaussian noise tiers 0.2 / 1 / 2 mapped to epsilon grades
NOISE_TIERS = {"low": 0.2, "medium": 0.5, "high": 0.8}

# Verification oracles
SOLVER_TOLERANCE = 1e-12
SOLVER_MAX_ITERATIONS = 200000
TRUNCATION_EPSILON = 1e-10
ENUMERATION_MAX_ATOMS = 200000
MAX_VERIFY_STATES = 200

# Tolerances reported by the verification suite
FIXED_POINT_TOLERANCE = 1e-12
FINITE_HORIZON_TOLERANCE = 1e-9
PROPOSITION_TOLERANCE = 1e-9
COROLLARY_TOLERANCE = 1e-12
EXTRACTION_TOLERANCE = 1e-6
TABULAR_FIT_TOLERANCE = 1e-12
SOFTMIN_LIMIT_TOLERANCE = 1e-3
SOFTMIN_LIMIT_ALPHA = 1e-3
