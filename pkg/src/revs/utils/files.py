"""Reading tabular text inputs."""

import io
from pathlib import Path

import pandas as pd

from revs.errors import DataError


def read_text(source) -> str:
    """Text of a path or an open text stream.

    Raises:
        DataError: The path does not exist or cannot be read.
    """
    if hasattr(source, "read"):
        return source.read()
    path = Path(source)
    try:
        return path.read_text()
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    except OSError as ex:
        raise DataError(f"cannot read {path}: {ex}") from ex


def read_table(text: str, name: str, **opts) -> pd.DataFrame:
    """Parse CSV text with a header row, skipping '#' comment lines."""
    try:
        table = pd.read_csv(io.StringIO(text), comment = "#", skipinitialspace = True, **opts)
    except (ValueError, pd.errors.ParserError, pd.errors.EmptyDataError) as ex:
        raise DataError(f"cannot parse {name}: {ex}") from ex
    table.columns = [str(column).strip() for column in table.columns]
    return table


def require_columns(table: pd.DataFrame, columns, name: str):
    missing = [column for column in columns if column not in table.columns]
    if missing:
        raise DataError(f"{name} is missing columns: {', '.join(missing)}")


def source_name(source) -> str:
    return getattr(source, "name", None) or str(source)
