"""Numeric summaries that end up as text on the figures.

All inputs are columns already read from a table; nothing here goes
back to the PDE side.  The formatting lives in one place so the tests
can pin the exact strings that appear in the images.
"""

import numpy as np

__all__ = [
    "identity_numbers",
    "identity_annotation",
    "rank_correlation",
    "trend_annotation",
    "spread_annotation",
]


def identity_numbers(energy, dissipation):
    """Energy drop and dissipation-balance residual over the records.

    ``drop`` is ``E`` at the first record minus ``E`` at the last, and
    the residual is how far the final energy plus the accumulated
    dissipation sits from the initial energy.
    """
    energy = np.asarray(energy, dtype=float)
    dissipation = np.asarray(dissipation, dtype=float)
    drop = energy[0] - energy[-1]
    residual = abs(energy[-1] + dissipation[-1] - dissipation[0] - energy[0])
    return drop, residual


def identity_annotation(energy, dissipation):
    """One-line residual report, with a percentage when it makes sense."""
    drop, residual = identity_numbers(energy, dissipation)
    text = f"identity residual {residual:.3e}"
    if drop > 0.0 and residual <= drop:
        text += f" ({100.0 * residual / drop:.2f}% of the drop)"
    return text


def _ranks(v):
    # average ranks so tied values share one rank
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=float)
    ranks[order] = np.arange(v.size, dtype=float)
    uniq, inverse, counts = np.unique(v, return_inverse=True, return_counts=True)
    sums = np.zeros(uniq.size)
    np.add.at(sums, inverse, ranks)
    return sums[inverse] / counts[inverse]


def rank_correlation(x, y):
    """Spearman correlation of two columns, NaN if either is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size != y.size:
        raise ValueError("columns differ in length")
    if x.size < 2:
        return float("nan")
    rx, ry = _ranks(x), _ranks(y)
    if rx.std() == 0.0 or ry.std() == 0.0:
        return float("nan")
    return float(np.corrcoef(rx, ry)[0, 1])


def trend_annotation(label, corr):
    """Render a correlation as the text drawn on the trend figures."""
    if np.isnan(corr):
        return f"{label}: no trend (constant or too few records)"
    if corr < -0.5:
        word = "decreasing"
    elif corr > 0.5:
        word = "increasing"
    else:
        word = "no clear trend"
    return f"{label}: rank corr {corr:+.2f} ({word})"


def spread_annotation(label, values):
    """Mean and relative spread of a column, for flat trajectories."""
    values = np.asarray(values, dtype=float)
    mean = values.mean()
    if mean == 0.0:
        return f"{label}: all zero"
    spread = 100.0 * (values.max() - values.min()) / abs(mean)
    return f"{label}: mean {mean:.4g}, spread {spread:.2f}%"
