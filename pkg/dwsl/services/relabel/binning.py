"""
N-step distance binning.
"""

from dataclasses import dataclass

import numpy as np

from dwsl.utils.errors import InputDomainError


@dataclass(frozen=True)
class BinningConfig:
    """
    Distances k in [b*N + 1, (b+1)*N] fall into bin b; there are B = T // N bins.

    Attributes:
        n_step: Granularity N
        num_bins: Bin count B
        achieved_as_one: Relabel k as 1 whenever the next state already
            achieves the goal
    """

    n_step: int
    num_bins: int
    achieved_as_one: bool = False

    def __post_init__(self):
        if self.n_step < 1:
            raise InputDomainError(f"n_step must be positive, got {self.n_step}")
        if self.num_bins < 1:
            raise InputDomainError(f"bin count must be positive, got {self.num_bins}")

    @classmethod
    def for_horizon(
        cls, horizon: int, n_step: int = 1, achieved_as_one: bool = False
    ) -> "BinningConfig":
        """B = horizon // N; rejects configurations with no bins."""
        if n_step < 1:
            raise InputDomainError(f"n_step must be positive, got {n_step}")
        num_bins = horizon // n_step
        if num_bins < 1:
            raise InputDomainError(
                f"n_step {n_step} exceeds horizon {horizon}: no distance bins"
            )
        return cls(n_step=n_step, num_bins=num_bins, achieved_as_one=achieved_as_one)

    @property
    def values(self) -> np.ndarray:
        """Normalised representative distance (b + 1) / B of every bin."""
        return (np.arange(self.num_bins) + 1.0) / self.num_bins

    def describe(self) -> dict:
        return {
            "n_step": self.n_step,
            "num_bins": self.num_bins,
            "achieved_as_one": self.achieved_as_one,
        }


def bin_index(k, cfg: BinningConfig):
    """
    Bin of distance k: (k - 1) // N, clamped to B - 1.

    Accepts a scalar or an integer array.
    """
    k_arr = np.asarray(k)
    if np.any(k_arr < 1):
        raise InputDomainError("distances must be at least 1")
    bins = np.minimum((k_arr - 1) // cfg.n_step, cfg.num_bins - 1)
    return int(bins) if bins.ndim == 0 else bins
