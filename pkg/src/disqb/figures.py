"""Matplotlib rendering of the result curves, written next to the CSVs.

All panels use a log time axis starting at the first positive grid point,
matching how the dynamics is usually read.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .ensemble import EnsembleResult  # noqa: E402

_PANELS = (
    ("ergotropy", r"$\bar{\mathcal{E}}$"),
    ("fidelity", r"$\bar{\mathcal{F}}$"),
    ("power", r"$\bar{P}_0$"),
    ("coherence", r"$\overline{\mathcal{QC}}$"),
)


def _positive(result: EnsembleResult):
    mask = result.t > 0
    return result.t[mask], mask


def save_run_figure(result: EnsembleResult, path: Path, label: str | None = None) -> Path:
    """2x3 panel figure: the four main metrics plus the ergotropy split."""
    t, mask = _positive(result)
    fig, axes = plt.subplots(2, 3, figsize=(12, 6.5), sharex=True)
    flat = axes.ravel()
    for ax, (name, ylabel) in zip(flat, _PANELS):
        mean = result.means[name][mask]
        err = result.stderrs[name][mask]
        ax.plot(t, mean, lw=1.4)
        ax.fill_between(t, mean - err, mean + err, alpha=0.25, lw=0)
        ax.set_xscale("log")
        ax.set_ylabel(ylabel)
        ax.grid(alpha=0.3)
    ax = flat[4]
    for name, style in (("coherent", "-"), ("incoherent", "--")):
        ax.plot(t, result.means[name][mask], style, lw=1.4, label=name)
    ax.set_xscale("log")
    ax.set_ylabel(r"$\bar{\mathcal{E}}_{\mathrm{split}}$")
    ax.legend(frameon=False)
    ax.grid(alpha=0.3)
    flat[5].set_axis_off()
    for ax in axes[-1]:
        ax.set_xlabel(r"$\Omega t$")
    if label:
        fig.suptitle(label)
    fig.tight_layout()
    return _save(fig, path)


def save_sweep_figure(results: dict, path: Path) -> Path:
    """Overlaid ergotropy and power for several disorder strengths."""
    fig, (ax_e, ax_p) = plt.subplots(1, 2, figsize=(10, 4))
    for delta, result in sorted(results.items()):
        t, mask = _positive(result)
        ax_e.plot(t, result.means["ergotropy"][mask], lw=1.4, label=rf"$\delta = {delta:g}$")
        ax_p.plot(t, result.means["power"][mask], lw=1.4, label=rf"$\delta = {delta:g}$")
    for ax, ylabel in ((ax_e, r"$\bar{\mathcal{E}}$"), (ax_p, r"$\bar{P}_0$")):
        ax.set_xscale("log")
        ax.set_xlabel(r"$\Omega t$")
        ax.set_ylabel(ylabel)
        ax.grid(alpha=0.3)
        ax.legend(frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def save_cost_figure(stats_rows, path: Path) -> Path:
    """Normalized interaction and charging costs versus disorder strength."""
    by_model: dict[str, list] = {}
    for row in stats_rows:
        by_model.setdefault(row["model"], []).append(row)
    fig, (ax_i, ax_c) = plt.subplots(1, 2, figsize=(10, 4))
    for model, rows in sorted(by_model.items()):
        rows = sorted(rows, key=lambda r: r["delta"])
        deltas = [r["delta"] for r in rows]
        ax_i.errorbar(
            deltas,
            [r["mean_c_int_norm"] for r in rows],
            yerr=[r["stderr_c_int_norm"] for r in rows],
            marker="o",
            ms=4,
            lw=1.4,
            label=model,
        )
        ax_c.errorbar(
            deltas,
            [r["mean_c_ch_norm"] for r in rows],
            yerr=[r["stderr_c_ch_norm"] for r in rows],
            marker="s",
            ms=4,
            lw=1.4,
            label=model,
        )
    ax_i.set_ylabel(r"$\bar{\mathcal{C}}_{\mathrm{int}}$")
    ax_c.set_ylabel(r"$\bar{\mathcal{C}}_{\mathrm{ch}}$")
    for ax in (ax_i, ax_c):
        ax.set_xlabel(r"$\delta$")
        ax.grid(alpha=0.3)
        ax.legend(frameon=False)
    fig.tight_layout()
    return _save(fig, path)


def _save(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
