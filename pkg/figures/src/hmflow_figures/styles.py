"""Two fixed looks for the report figures.

``paper`` is compact with small type, ``talk`` is larger for slides.
Every size is pinned so repeated runs write identical files.
"""

import matplotlib

__all__ = ["STYLES", "apply_style"]

STYLES = {
    "paper": {
        "figure.figsize": (6.4, 4.2),
        "figure.dpi": 110.0,
        "savefig.dpi": 150.0,
        "font.size": 9.0,
        "axes.titlesize": 10.0,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "lines.linewidth": 1.4,
        "lines.markersize": 4.0,
        "legend.fontsize": 8.0,
    },
    "talk": {
        "figure.figsize": (9.0, 5.4),
        "figure.dpi": 100.0,
        "savefig.dpi": 120.0,
        "font.size": 13.0,
        "axes.titlesize": 15.0,
        "axes.grid": True,
        "grid.alpha": 0.25,
        "lines.linewidth": 2.2,
        "lines.markersize": 6.0,
        "legend.fontsize": 11.0,
    },
}


def apply_style(name):
    matplotlib.rcParams.update(STYLES[name])
