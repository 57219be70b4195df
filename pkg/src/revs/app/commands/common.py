"""Option handling shared by commands."""

from pathlib import Path
from typing import List, Optional, Sequence

import click


def config_path(ctx: click.Context, path: Optional[Path]) -> Path:
    """'--config' if given, else the REVS_CONFIG setting."""
    path = path or ctx.obj.config
    if path is None:
        raise click.UsageError("no scenario config: pass --config or set REVS_CONFIG")
    return Path(path)


def seed_list(seed: Optional[int], count: Optional[int], configured: Sequence[int]) -> List[int]:
    """Seeds from flags, falling back to the config.

    '--seed S --seeds N' gives S, S+1, ..., S+N-1.
    """
    if seed is None:
        if count is not None:
            raise click.UsageError("--seeds needs a base --seed")
        if not configured:
            raise click.UsageError("no seeds: pass --seed or list 'seeds' in the config")
        return list(configured)
    return [seed + offset for offset in range(count or 1)]
