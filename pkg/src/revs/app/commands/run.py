import logging
from pathlib import Path

import click

from revs.models.enumerations import RunMode
from revs.scenarios import (
    ResultStore,
    canonical_text,
    load_config,
    load_scenario,
    run_sweep,
    write_report,
)
from revs.utils import RunIds

from .common import config_path, seed_list


logger = logging.getLogger(__name__)


# --- Command

@click.command(
    "run",
    short_help = "Compare individual and distributed scheduling",
)
@click.option("--config", "path", type = click.Path(dir_okay = False, path_type = Path))
@click.option("--mode", type = click.Choice([mode.value for mode in RunMode]))
@click.option(
    "--adoption", type = click.FloatRange(0.0, 1.0), multiple = True,
    help = "Adoption fraction; repeat for a sweep. Overrides the config.",
)
@click.option("--seed", type = int, help = "First seed.")
@click.option("--seeds", "count", type = click.IntRange(min = 1), help = "Number of seeds from --seed.")
@click.option("--out", type = click.Path(file_okay = False, path_type = Path))
@click.option(
    "--jobs", type = click.IntRange(min = 1),
    help = "Seeds run concurrently; also the worker count of each distributed run.",
)
@click.pass_context
def run(ctx, path, mode, adoption, seed, count, out, jobs):
    """Run every adoption level and seed of a scenario and write the report.

    Exits with 4 when a distributed run did not converge or a seed failed.
    """
    config = load_config(
        config_path(ctx, path),
        mode = mode,
        adoption_fractions = list(adoption) or None,
    )
    seeds = seed_list(seed, count, config.seeds)
    config = config.copy(update = {"seeds": seeds})
    if out is not None:
        config = config.copy(update = {"output": out})
    scenario = load_scenario(config)
    if jobs is not None:
        admm = scenario.admm.copy(update = {"parallel": True, "jobs": jobs})
        scenario = scenario.copy(update = {"admm": admm})
    store = ResultStore()
    reports = run_sweep(scenario, config.adoption_fractions, store = store, jobs = jobs)
    run_id = RunIds.config_id(canonical_text(config))
    write_report(
        reports, scenario.network, config.output, run_id, config.horizon_start_hour, store = store,
    )
    click.echo(f"run id: {run_id}")
    click.echo(f"report: {config.output}")

    problems = 0
    for report in reports:
        for failed in report.failures():
            problems += 1
            click.echo(
                f"FAILED adoption {report.adoption_fraction:g} seed {failed.seed} "
                f"{failed.mode.value}: {failed.error}",
                err = True,
            )
        for pending in report.unconverged():
            problems += 1
            click.echo(
                f"NOT CONVERGED adoption {report.adoption_fraction:g} seed {pending.seed} "
                f"after {pending.iterations} iterations",
                err = True,
            )
    if problems:
        ctx.exit(4)


def command():
    return run
