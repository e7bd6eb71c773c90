"""Overlay the recorded energy with the dissipation-balance prediction.

Reads a flow series table and draws ``E(t)`` next to
``E(0) - (D(t) - D(0))``, where ``D`` is the cumulative dissipation
column.  When the balance holds the two curves coincide, and the gap at
the final record is printed on the figure.  A decaying run shows two
matching decreasing curves; a run that just sits on a stationary map
shows two flat ones.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .annotate import identity_annotation
from .styles import STYLES, apply_style
from .tables import TableError, read_table

REQUIRED = ("t", "E_total", "dissipation_cum")


def build_figure(table):
    """Return the assembled figure and the annotation drawn on it."""
    t = table["t"]
    energy = table["E_total"]
    diss = table["dissipation_cum"]
    predicted = energy[0] - (diss - diss[0])

    fig, ax = plt.subplots()
    ax.plot(t, energy, color="tab:blue", label="$E(t)$")
    ax.plot(t, predicted, "--", color="tab:orange",
            label=r"$E(0) - \int \Vert T \Vert^2 \, dt$")
    ax.set_xlabel("$t$")
    ax.set_ylabel("energy")
    label = table.meta.get("label")
    ax.set_title("energy identity" + (f" ({label})" if label else ""))
    ax.legend(loc="best")

    annotation = identity_annotation(energy, diss)
    ax.text(0.02, 0.04, annotation, transform=ax.transAxes,
            fontsize="small",
            bbox={"boxstyle": "round", "facecolor": "white", "alpha": 0.8})
    fig.tight_layout()
    return fig, annotation


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="overlay recorded energy with the dissipation balance")
    parser.add_argument("input", help="series CSV written by a simulation run")
    parser.add_argument("output",
                        help="image file to write; the suffix picks the format")
    parser.add_argument("--style", choices=sorted(STYLES), default="paper")
    args = parser.parse_args(argv)

    apply_style(args.style)
    try:
        table = read_table(args.input, required=REQUIRED)
    except (OSError, TableError) as exc:
        print(exc, file=sys.stderr)
        return 2
    fig, annotation = build_figure(table)
    fig.savefig(args.output)
    plt.close(fig)
    print(f"{args.output}: {annotation}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
