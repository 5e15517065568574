"""Figure rendering for the CLI report paths (always to files, never shown)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_field(field, path: str, title: str = "") -> str:
    """Heatmaps of phi, phi_x, phi_t over a structured (x, t) sampling."""
    fig, axes = plt.subplots(1, 3, figsize=(13, 4), constrained_layout=True)
    for ax, comp, name in zip(axes, (field.phi, field.phi_x, field.phi_t),
                              ("phi", "phi_x", "phi_t")):
        if field.x.ndim == 2:
            pc = ax.pcolormesh(field.x, field.t, comp, shading="gouraud")
            fig.colorbar(pc, ax=ax)
            ax.set_xlabel("x")
            ax.set_ylabel("t")
        else:
            ax.plot(field.x, comp, lw=0.9)
            ax.set_xlabel("x")
        ax.set_title(name)
    if title:
        fig.suptitle(title)
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path


def plot_decay(reports, path: str) -> str:
    """Energy vs time against the two-sided 1/t envelope."""
    t = np.array([r.t for r in reports])
    e = np.array([r.energy for r in reports])
    lo = np.array([r.lower for r in reports])
    hi = np.array([r.upper for r in reports])
    fig, ax = plt.subplots(figsize=(6, 4), constrained_layout=True)
    ax.loglog(t, e, "o-", ms=3, label="E(t)")
    ax.loglog(t, lo, "--", label="S/((1+L)t)")
    ax.loglog(t, hi, "--", label="S/((1-L)t)")
    ax.set_xlabel("t")
    ax.set_ylabel("energy")
    ax.legend()
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path


def plot_trace(times, values, path: str, label: str = "trace",
               windows: dict | None = None) -> str:
    """A boundary trace (or control) over its time window."""
    fig, ax = plt.subplots(figsize=(7, 3.5), constrained_layout=True)
    ax.plot(times, values, lw=0.9, label=label)
    if windows:
        for name, (lo, hi) in windows.items():
            ax.axvspan(lo, hi, alpha=0.12, label=name)
    ax.set_xlabel("t")
    ax.legend(loc="best", fontsize=8)
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path


def plot_cg_history(residuals, path: str) -> str:
    fig, ax = plt.subplots(figsize=(5, 3.5), constrained_layout=True)
    ax.semilogy(np.arange(1, len(residuals) + 1), residuals, "o-", ms=3)
    ax.set_xlabel("iteration")
    ax.set_ylabel("relative residual")
    fig.savefig(path, dpi=140)
    plt.close(fig)
    return path
