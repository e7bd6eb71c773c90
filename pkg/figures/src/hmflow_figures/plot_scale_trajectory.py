"""Follow the widest fitted bubble scale along a run.

For blow-up tables the scale is divided by ``sqrt(T_+ - t)``, so a
collapse at the self-similar rate would show as a flat ratio and a
faster one as a decaying ratio.  Global tables show the scale itself,
which stays on a constant line when the run just sits on a stationary
map.  Records without a fitted bubble (zero or non-finite scale) are
skipped; a table with none at all is refused.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .annotate import rank_correlation, spread_annotation, trend_annotation
from .styles import STYLES, apply_style
from .tables import TableError, read_table

REQUIRED = ("t", "lambda_max")


def build_figure(table):
    """Return the assembled figure and the annotation drawn on it."""
    t = table["t"]
    lam = table["lambda_max"]
    keep = np.isfinite(lam) & (lam > 0.0)
    blow_up = table.mode == "blow-up"
    if blow_up:
        t_plus = table.t_plus
        if not np.isfinite(t_plus):
            raise TableError("blow-up table without a finite t_plus header")
        keep &= t < t_plus
    t = t[keep]
    lam = lam[keep]
    if t.size == 0:
        raise TableError("no records with a fitted bubble scale")

    fig, ax = plt.subplots()
    marker = "o" if t.size == 1 else "o-"
    if blow_up:
        remaining = t_plus - t
        ratio = lam / np.sqrt(remaining)
        ax.plot(remaining, ratio, marker, color="tab:green")
        ax.set_xscale("log")
        ax.invert_xaxis()
        ax.set_xlabel(r"$T_+ - t$")
        ax.set_ylabel(r"$\lambda_{\max} / \sqrt{T_+ - t}$")
        ax.set_title("scale trajectory (blow-up frame)")
        annotation = trend_annotation("ratio vs t", rank_correlation(t, ratio))
    else:
        ax.plot(t, lam, marker, color="tab:green")
        ax.set_xlabel("$t$")
        ax.set_ylabel(r"$\lambda_{\max}$")
        ax.set_title("scale trajectory (global frame)")
        annotation = spread_annotation("scale", lam)
    ax.text(0.02, 0.92, annotation, transform=ax.transAxes,
            fontsize="small",
            bbox={"boxstyle": "round", "facecolor": "white", "alpha": 0.8})
    fig.tight_layout()
    return fig, annotation


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="plot the largest fitted bubble scale against time")
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
    print(f"{args.output}: {annotation}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
