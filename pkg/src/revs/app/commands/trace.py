from pathlib import Path

import click

from revs.coordination import run_admm
from revs.scenarios import load_config, load_scenario, sample_adopters

from .common import config_path


# --- Command

@click.command(
    "trace",
    short_help = "Export the iteration trace of one ADMM run",
)
@click.option("--config", "path", type = click.Path(dir_okay = False, path_type = Path))
@click.option(
    "--adoption", type = click.FloatRange(0.0, 1.0),
    help = "Adoption fraction, the config's first one by default.",
)
@click.option("--seed", type = int, required = True)
@click.option(
    "--out", type = click.Path(dir_okay = False, path_type = Path),
    default = Path("trace.csv"), show_default = True,
)
@click.pass_context
def trace(ctx, path, adoption, seed, out):
    """Run the distributed scheduler once and write iter,primal_residual,dual_residual,total_cost.

    Exits with 4 when ADMM did not converge.
    """
    config = load_config(config_path(ctx, path))
    scenario = load_scenario(config, adoption_fraction = adoption, seeds = [seed])
    adopters = sample_adopters(scenario.community, scenario.adoption_fraction, seed)
    result = run_admm(
        scenario.network,
        scenario.profiles,
        {node: scenario.ev for node in adopters},
        scenario.tariff,
        config = scenario.admm,
        limits = scenario.limits,
    )
    result.trace.to_frame().to_csv(out, index = False, float_format = "%.10g")
    click.echo(f"adopters: {len(adopters)}")
    click.echo(f"iterations: {result.iterations}")
    click.echo(f"converged: {'yes' if result.converged else 'no'}")
    click.echo(f"voltages within limits: {'yes' if result.voltage_ok else 'no'}")
    click.echo(f"trace: {out}")
    if not result.converged:
        ctx.exit(4)


def command():
    return trace
