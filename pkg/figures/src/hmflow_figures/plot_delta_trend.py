"""Track the configuration-distance bound as a run plays out.

Tables whose header says ``mode=blow-up`` are drawn against the
remaining time ``T_+ - t`` on a reversed log axis, so approaching the
concentration time reads left to right.  Global tables are drawn
against ``t`` on a log axis.  The Spearman correlation of the bound
with time is printed on the figure; a table with a single usable record
gets a point plot and no trend text.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .annotate import rank_correlation, trend_annotation
from .styles import STYLES, apply_style
from .tables import TableError, read_table

REQUIRED = ("t", "d_total")


def build_figure(table):
    """Return the assembled figure and the annotation, None if omitted."""
    t = table["t"]
    d = table["d_total"]
    keep = np.isfinite(d)
    if table.mode == "blow-up":
        t_plus = table.t_plus
        if not np.isfinite(t_plus):
            raise TableError("blow-up table without a finite t_plus header")
        keep &= t < t_plus
    else:
        # log axis, so records at t = 0 cannot be placed
        keep &= t > 0.0
    t = t[keep]
    d = d[keep]
    if t.size == 0:
        raise TableError("no usable records (finite d_total on the time axis)")

    fig, ax = plt.subplots()
    if table.mode == "blow-up":
        x = t_plus - t
        ax.set_xlabel(r"$T_+ - t$")
        frame = "blow-up frame"
    else:
        x = t
        ax.set_xlabel("$t$")
        frame = "global frame"

    annotation = None
    if t.size == 1:
        ax.plot(x, d, "o", color="tab:blue")
    else:
        ax.plot(x, d, "o-", color="tab:blue")
        annotation = trend_annotation("d vs t", rank_correlation(t, d))
        ax.text(0.02, 0.92, annotation, transform=ax.transAxes,
                fontsize="small",
                bbox={"boxstyle": "round", "facecolor": "white", "alpha": 0.8})
    ax.set_xscale("log")
    if table.mode == "blow-up":
        ax.invert_xaxis()
    ax.set_ylabel("distance bound $d$")
    ax.set_title(f"configuration distance ({frame})")
    fig.tight_layout()
    return fig, annotation


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="plot the configuration-distance bound against time")
    parser.add_argument("input", help="delta CSV written by the analysis step")
    parser.add_argument("output",
                        help="image file to write; the suffix picks the format")
    parser.add_argument("--style", choices=sorted(STYLES), default="paper")
    args = parser.parse_args(argv)

    apply_style(args.style)
    try:
        table = read_table(args.input, required=REQUIRED)
        fig, annotation = build_figure(table)
    except (OSError, TableError) as exc:
        print(exc, file=sys.stderr)
        return 2
    fig.savefig(args.output)
    plt.close(fig)
    tail = annotation if annotation is not None else "single record"
    print(f"{args.output}: {tail}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
