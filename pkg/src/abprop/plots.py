"""Figure rendering for the report paths.

Every figure goes straight to a file through the Agg backend, with the PNG
Date metadata stripped so reruns of the same configuration are
byte-identical.
"""

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "spectrum_figure",
    "kernel_agreement_figure",
    "decay_figure",
    "wavefunction_figure",
]

_SAVE_OPTS = {"dpi": 150, "metadata": {"Date": None}}


def _style():
    plt.rcParams.update(
        {
            "figure.figsize": (6.4, 4.2),
            "axes.grid": True,
            "grid.alpha": 0.3,
            "font.size": 10,
        }
    )


def spectrum_figure(ks, ms, lams, path):
    """Eigenvalue ladder: lambda against angular index, shaded by radial index."""
    _style()
    fig, ax = plt.subplots()
    ms = np.asarray(ms)
    sc = ax.scatter(ks, lams, c=ms, s=22, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="radial index m")
    ax.set_xlabel("angular index k")
    ax.set_ylabel("eigenvalue")
    ax.set_title("spectrum ladder")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def kernel_agreement_figure(labels, deviations, path):
    """Pairwise construction deviations per query, log scale."""
    _style()
    fig, ax = plt.subplots()
    x = np.arange(len(deviations))
    dev = np.maximum(np.asarray(deviations, dtype=float), 1e-18)
    ax.semilogy(x, dev, "o-", ms=3.5)
    ax.set_xlabel("query index")
    ax.set_ylabel("max pairwise deviation (prefactor-scaled)")
    ax.set_title("kernel construction agreement")
    if labels:
        ax.text(0.02, 0.95, labels, transform=ax.transAxes, va="top", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def decay_figure(times, ratios, b0, path):
    """Dispersive ratio against time with the singular times marked."""
    _style()
    fig, ax = plt.subplots()
    ax.plot(times, ratios, "o-")
    tmax = max(times)
    n = 1
    while n * math.pi / b0 < tmax + 0.5:
        ax.axvline(n * math.pi / b0, color="crimson", lw=0.8, ls="--", alpha=0.6)
        n += 1
    ax.set_xlabel("t")
    ax.set_ylabel("sup-norm ratio")
    ax.set_title("dispersive decay ratios")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def wavefunction_figure(r, theta, values, path, title="|u|"):
    """Magnitude heat map on the polar grid (angle horizontal, radius vertical)."""
    _style()
    fig, ax = plt.subplots()
    mag = np.abs(values)
    th_edges = np.concatenate([theta, [theta[0] + 2.0 * math.pi]])
    r_edges = np.concatenate([[0.0], 0.5 * (r[1:] + r[:-1]), [r[-1]]])
    pm = ax.pcolormesh(th_edges, r_edges, mag, shading="auto", cmap="magma")
    fig.colorbar(pm, ax=ax, label=title)
    ax.set_xlabel("theta")
    ax.set_ylabel("r")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
