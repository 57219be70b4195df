import logging

import click
import pydantic

from revs.app.commands import (
    compare,
    generate,
    run,
    trace,
    validate,
)
from revs.errors import (
    DataError,
    DimensionError,
    InstanceTooLargeError,
    ModelBlowUpError,
    RevsError,
    SolverError,
)
from revs.settings import Settings


# --- Application wide settings

# Error type => exit code
# Lookup follows the exception's MRO, so subclasses inherit their base's code.
_EXIT_CODES = {
    DataError: 3,
    DimensionError: 3,
    InstanceTooLargeError: 3,
    pydantic.ValidationError: 3,
    SolverError: 4,
    ModelBlowUpError: 4,
    RevsError: 4,
}

# Command modules
_COMMANDS = [
    generate,
    run,
    compare,
    trace,
    validate,
]

_LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


# --- Application setup

def exit_code(error: BaseException) -> int:
    """Exit code registered for the most specific class of 'error'."""
    for cls in type(error).__mro__:
        if cls in _EXIT_CODES:
            return _EXIT_CODES[cls]
    return 1


class _Group(click.Group):

    """Command group reporting package errors with their exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (RevsError, pydantic.ValidationError) as ex:
            click.echo(f"error: {ex}", err = True)
            ctx.exit(exit_code(ex))


def _setup_logging(level):
    logging.basicConfig(level = level, format = _LOG_FORMAT)


def _setup_commands(group, commands):
    """Attach subcommands to the group."""
    for item in commands:
        group.add_command(item.command())


def _setup():
    """Application initialization, including commands."""

    @click.group(cls = _Group)
    @click.option("-v", "--verbose", count = True, help = "-v for INFO, -vv for DEBUG.")
    @click.pass_context
    def cli(ctx, verbose):
        """Reliability-aware EV charge scheduling."""
        settings = Settings()
        if verbose:
            level = logging.DEBUG if verbose > 1 else logging.INFO
        else:
            level = settings.log_level.upper()
        _setup_logging(level)
        ctx.obj = settings

    _setup_commands(cli, _COMMANDS)
    return cli


cli = _setup()


# --- Application entry point

def application():
    """Top-level entry point invoked by the 'revs' script."""
    cli(prog_name = "revs")
