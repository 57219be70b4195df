from pathlib import Path

import click
import yaml

from revs.models.scenario import GeneratorParams
from revs.network import write_network
from revs.residence.loads import write_profiles
from revs.scenarios import generate_network, write_communities


# --- Command

@click.command(
    "generate",
    short_help = "Generate a synthetic network bundle",
)
@click.option("--feeders", type = click.IntRange(min = 1), default = 1, show_default = True)
@click.option(
    "--homes", type = click.IntRange(min = 1), default = 30, show_default = True,
    help = "Residences per feeder.",
)
@click.option(
    "--homes-per-transformer", type = click.IntRange(min = 1), default = 5, show_default = True,
)
@click.option(
    "--depth", type = click.IntRange(min = 1), default = 4, show_default = True,
    help = "Trunk nodes per feeder.",
)
@click.option(
    "--headroom", type = click.FloatRange(min = 0.0, min_open = True), default = 2.0,
    show_default = True, help = "Line capacity over peak base-load flow.",
)
@click.option("--seed", type = int, required = True)
@click.option(
    "--out", type = click.Path(file_okay = False, path_type = Path),
    default = Path("scenario"), show_default = True,
)
def generate(feeders, homes, homes_per_transformer, depth, headroom, seed, out):
    """Write network.csv, profiles.csv, communities.csv and scenario.yaml.

    The scenario config references the other three files and lists SEED as
    its only seed.
    """
    params = GeneratorParams(
        feeders = feeders,
        homes_per_feeder = homes,
        homes_per_transformer = homes_per_transformer,
        depth = depth,
        headroom = headroom,
        seed = seed,
    )
    generated = generate_network(params)
    out.mkdir(parents = True, exist_ok = True)
    write_network(generated.network, out / "network.csv")
    write_profiles(generated.profiles, out / "profiles.csv")
    write_communities(generated.communities, out / "communities.csv")
    config = {
        "network": "network.csv",
        "profiles": "profiles.csv",
        "communities": "communities.csv",
        "seeds": [seed],
    }
    (out / "scenario.yaml").write_text(yaml.safe_dump(config, sort_keys = True))
    network = generated.network
    click.echo(f"nodes: {network.size + 1}")
    click.echo(f"edges: {len(network.edges)}")
    click.echo(f"residences: {len(network.residences())}")
    click.echo(f"communities: {len(generated.communities)}")
    click.echo(f"written to: {out}")


def command():
    return generate
