"""Reader for the flat CSV tables written by the flow pipeline.

Every table starts with ``# key=value`` header lines, then one row of
column names, then numeric rows.  The reader keeps the header verbatim
as strings and turns each column into a float array.
"""

from pathlib import Path

import numpy as np

__all__ = ["Table", "TableError", "read_table", "sample_path"]


class TableError(Exception):
    """Raised when a table file cannot be used for plotting."""


class Table:
    """Header metadata plus named float columns of equal length."""

    def __init__(self, meta, columns):
        self.meta = meta
        self.columns = columns

    def __len__(self):
        if not self.columns:
            return 0
        return len(next(iter(self.columns.values())))

    def __getitem__(self, name):
        return self.columns[name]

    @property
    def mode(self):
        """Analysis frame recorded in the header, ``global`` if absent."""
        return self.meta.get("mode", "global")

    @property
    def t_plus(self):
        """Concentration time from the header, NaN when not recorded."""
        try:
            return float(self.meta.get("t_plus", "nan"))
        except ValueError:
            return float("nan")


def read_table(path, required=()):
    """Load one CSV table and check the columns the caller needs.

    Parameters
    ----------
    path : str or Path
        File to read.
    required : sequence of str
        Column names that must be present.

    Returns
    -------
    Table

    Raises
    ------
    TableError
        If the file has no data rows, a row fails to parse, or a
        required column is absent.  The message names every missing
        column.
    """
    meta = {}
    names = None
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].strip().partition("=")
                if sep:
                    meta[key.strip()] = value.strip()
                continue
            cells = [c.strip() for c in line.split(",")]
            if names is None:
                names = cells
                continue
            if len(cells) != len(names):
                raise TableError(f"{path}: line {lineno} has {len(cells)} cells, "
                                 f"expected {len(names)}")
            try:
                rows.append([float(c) for c in cells])
            except ValueError as exc:
                raise TableError(f"{path}: line {lineno}: {exc}") from exc
    if names is None or not rows:
        raise TableError(f"{path}: no data rows")
    missing = [c for c in required if c not in names]
    if missing:
        raise TableError(f"{path}: missing columns: {', '.join(missing)}")
    data = np.asarray(rows, dtype=float)
    columns = {name: data[:, j] for j, name in enumerate(names)}
    return Table(meta, columns)


def sample_path(name):
    """Path of one of the bundled example tables."""
    return Path(__file__).resolve().parent / "samples" / name
