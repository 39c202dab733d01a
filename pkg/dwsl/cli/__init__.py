"""
CLI command group for the DWSL engine.
"""

from pathlib import Path
from typing import Optional

import click

from dwsl.cli.commands import eval_command, gen_data, stats, train, verify
from dwsl.utils.logging import setup_logger


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(
        ["TRACE", "DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False
    ),
    default="INFO",
    show_default=True,
    help="Console and file log level.",
)
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Also write logs to this file.",
)
def cli(log_level: str, log_file: Optional[Path]) -> None:
    """Offline goal-conditioned policy learning and verification."""
    setup_logger("dwsl", log_file=log_file, level=log_level)


# Register commands
cli.add_command(gen_data)
cli.add_command(train)
cli.add_command(eval_command)
cli.add_command(verify)
cli.add_command(stats)
