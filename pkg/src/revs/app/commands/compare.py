from pathlib import Path

import click

from revs.models.coordination import AdmmConfig
from revs.scenarios import run_deviation_study


# --- Command

@click.command(
    "compare",
    short_help = "Distributed versus centralized cost on small instances",
)
@click.option("--instances", type = click.IntRange(min = 1), default = 20, show_default = True)
@click.option("--adopters", type = click.IntRange(min = 1), default = 2, show_default = True)
@click.option(
    "--homes", type = click.IntRange(min = 1), default = 2, show_default = True,
    help = "Residences per instance.",
)
@click.option(
    "--kappa", type = click.FloatRange(min = 0.0, min_open = True), default = 1.0,
    show_default = True,
)
@click.option("--max-iters", type = click.IntRange(min = 1), default = 500, show_default = True)
@click.option("--seed", type = int, required = True, help = "Seed of the first instance.")
@click.option(
    "--out", type = click.Path(dir_okay = False, path_type = Path), help = "CSV of deviations.",
)
def compare(instances, adopters, homes, kappa, max_iters, seed, out):
    """Per-adopter bill deviation of ADMM from exhaustive centralized search.

    Deviations above 5% are listed; above 20% they are flagged.
    """
    table = run_deviation_study(
        instances,
        seed,
        adopters = adopters,
        admm = AdmmConfig(kappa = kappa, max_iters = max_iters),
        homes_per_feeder = homes,
        homes_per_transformer = homes,
    )
    if out is not None:
        table.to_csv(out, index = False, float_format = "%.8f")
    if table.empty:
        click.echo("no instance had a feasible centralized schedule")
        return
    within = float((table["deviation_pct"] <= 5.0).mean())
    click.echo(f"instances compared: {table['instance'].nunique()}")
    click.echo(f"residences within 5%: {within:.1%}")
    for row in table[table["deviation_pct"] > 5.0].itertuples(index = False):
        flag = " FLAG" if row.deviation_pct > 20.0 else ""
        click.echo(
            f"instance {row.instance} node {row.node}: "
            f"{row.deviation_pct:.2f}%{flag}"
        )


def command():
    return compare
