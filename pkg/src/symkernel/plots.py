"""Figure rendering for the CLI report path.

Everything goes through the Agg backend straight to PNG files; no
display is ever opened. Figures carry fixed metadata so repeated runs
produce identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SAVE_KW = dict(dpi=120, metadata={"Software": "symkernel"})


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)


def plot_curves(path, ts, series, ylabel, title):
    """Log-log curves over the time grid; series is [(label, values)]."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, values in series:
        ax.loglog(ts, values, marker="o", markersize=3.5, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    if len(series) > 1:
        ax.legend()
    _finish(fig, path)


def plot_compare(path, ts, method_values, deviations, title):
    """Curves for every method plus the per-t max relative deviation."""
    fig, (ax0, ax1) = plt.subplots(
        2, 1, figsize=(6.0, 5.5), sharex=True,
        gridspec_kw={"height_ratios": [2, 1]},
    )
    for name, values in method_values.items():
        ax0.loglog(ts, values, marker="o", markersize=3.5, label=name)
    ax0.set_ylabel("diagonal value")
    ax0.set_title(title)
    ax0.grid(True, which="both", alpha=0.3)
    ax0.legend()
    ax1.loglog(ts, deviations, marker="s", markersize=3.5, color="crimson")
    ax1.set_xlabel("t")
    ax1.set_ylabel("max rel. deviation")
    ax1.grid(True, which="both", alpha=0.3)
    _finish(fig, path)


def plot_coefficients(path, ks, traces, title):
    """Stem plot of |tr a_k| against the expansion order k."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    mags = [abs(v) for v in traces]
    ax.stem(ks, mags)
    ax.set_yscale("log")
    ax.set_xlabel("k")
    ax.set_ylabel("|tr a_k|")
    ax.set_title(title)
    ax.grid(True, axis="y", alpha=0.3)
    _finish(fig, path)


def plot_residuals(path, names, values, tol, title):
    """Horizontal bars of identity residuals against the tolerance line."""
    fig, ax = plt.subplots(figsize=(6.5, 0.45 * max(len(names), 4) + 1.2))
    floor = 1e-18
    ax.barh(range(len(names)), [max(v, floor) for v in values], color="steelblue")
    ax.axvline(tol, linestyle="--", color="crimson", label="tolerance")
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=8)
    ax.set_xscale("log")
    ax.set_xlabel("residual")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, axis="x", alpha=0.3)
    _finish(fig, path)


def plot_index(path, ts, graded, integer, title):
    """Graded trace values against t with the integer target line."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(ts, graded, marker="o", markersize=4, label="graded trace")
    ax.axhline(integer, linestyle="--", color="gray", label="nearest integer")
    ax.set_xlabel("t")
    ax.set_ylabel("index estimate")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, alpha=0.3)
    _finish(fig, path)


def plot_spectrum(path, eigenvalues, multiplicities, title, continuum_edge=None):
    """Discrete levels as stems; optional continuum edge as a dashed line."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if eigenvalues:
        ax.stem(eigenvalues, multiplicities)
    if continuum_edge is not None:
        ax.axvline(continuum_edge, linestyle="--", color="gray",
                   label="continuum edge")
        ax.legend()
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("multiplicity / weight")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _finish(fig, path)
