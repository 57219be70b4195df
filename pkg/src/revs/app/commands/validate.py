from pathlib import Path
from typing import Callable, List, Tuple

import click

from revs.errors import DataError, RevsError
from revs.models.scenario import HOURS_PER_DAY, EvDefaults
from revs.network import check_tree, read_network
from revs.residence import check_spec, load_profiles, load_tariff
from revs.scenarios import load_config


class _Skipped(Exception):
    pass


def _checks(network_path, profiles_path, tariff_path, ev: EvDefaults, start_hour):
    """(name, check) pairs; a check raises a package error on failure."""
    loaded = {}

    def needs_network():
        if "network" not in loaded:
            raise _Skipped()
        return loaded["network"]

    def network():
        loaded["network"] = read_network(network_path)

    def tree():
        check_tree(needs_network())

    def profiles():
        load_profiles(profiles_path, needs_network(), HOURS_PER_DAY)

    def tariff():
        load_tariff(tariff_path, HOURS_PER_DAY)

    def ev_spec():
        try:
            spec = ev.to_spec(start_hour, HOURS_PER_DAY)
        except ValueError as ex:
            raise DataError(str(ex)) from ex
        check_spec(spec, HOURS_PER_DAY)

    checks: List[Tuple[str, Callable[[], None]]] = [
        ("network file", network),
        ("tree rooted at substation", tree),
        ("profile coverage", profiles),
        ("tariff", tariff),
        ("EV feasibility", ev_spec),
    ]
    return checks


# --- Command

@click.command(
    "validate",
    short_help = "Check an input bundle",
)
@click.option("--config", "path", type = click.Path(dir_okay = False, path_type = Path))
@click.option("--network", type = click.Path(dir_okay = False, path_type = Path))
@click.option("--profiles", type = click.Path(dir_okay = False, path_type = Path))
@click.option("--tariff", type = click.Path(dir_okay = False, path_type = Path))
@click.pass_context
def validate(ctx, path, network, profiles, tariff):
    """Print PASS or FAIL for each structural check of the inputs.

    Files come from --config (or REVS_CONFIG) unless given as flags.
    Exits with 3 when any check fails.
    """
    ev, start_hour = EvDefaults(), 16
    path = path or ctx.obj.config
    if path is not None:
        config = load_config(path)
        network = network or config.network
        profiles = profiles or config.profiles
        tariff = tariff or config.tariff
        ev, start_hour = config.ev, config.horizon_start_hour
    if network is None or profiles is None:
        raise click.UsageError("pass --config, or --network and --profiles")

    failures = 0
    for name, check in _checks(network, profiles, tariff, ev, start_hour):
        try:
            check()
        except _Skipped:
            click.echo(f"SKIP {name}")
        except RevsError as ex:
            failures += 1
            click.echo(f"FAIL {name}: {ex}")
        else:
            click.echo(f"PASS {name}")
    if failures:
        ctx.exit(3)


def command():
    return validate
