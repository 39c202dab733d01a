"""
Shared option callbacks and error reporting for CLI commands.
"""

import json
from contextlib import contextmanager
from typing import Any, Dict, Iterator, Optional

import click

from dwsl.services.mdp import is_registered, registered_envs
from dwsl.utils.errors import DwslError
from dwsl.utils.logging import logger
from dwsl.utils.records import dumps_record


def validate_env(ctx: click.Context, param: click.Parameter, value: Optional[str]):
    """Reject identifiers missing from the environment registry (exit 2)."""
    if value is not None and not is_registered(value):
        raise click.BadParameter(
            f"unknown environment '{value}'; registered: {', '.join(registered_envs())}"
        )
    return value


@contextmanager
def reported_errors() -> Iterator[None]:
    """Turn runtime DwslErrors into click errors (exit 1)."""
    try:
        yield
    except DwslError as e:
        logger.error(str(e))
        raise click.ClickException(str(e)) from e


def echo_record(record: Dict[str, Any]) -> None:
    click.echo(dumps_record(record))


def echo_json(payload: Any) -> None:
    click.echo(json.dumps(payload, sort_keys=True))
