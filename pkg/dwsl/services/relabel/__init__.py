"""
Hindsight relabeling and N-step distance binning.
"""

from dwsl.services.relabel.binning import BinningConfig, bin_index
from dwsl.services.relabel.frequencies import action_frequencies
from dwsl.services.relabel.sampler import (
    RelabelBatch,
    RelabeledSample,
    enumerate_all_pairs,
    sample_batch,
    sample_relabeled,
)

__all__ = [
    "BinningConfig",
    "RelabelBatch",
    "RelabeledSample",
    "action_frequencies",
    "bin_index",
    "enumerate_all_pairs",
    "sample_batch",
    "sample_relabeled",
]
