"""
Command modules for the DWSL command line interface.
Each module contains a specific command implementation.
"""

from dwsl.cli.commands.eval import eval_command
from dwsl.cli.commands.gen_data import gen_data
from dwsl.cli.commands.stats import stats
from dwsl.cli.commands.train import train
from dwsl.cli.commands.verify import verify

__all__ = ["gen_data", "train", "eval_command", "verify", "stats"]
