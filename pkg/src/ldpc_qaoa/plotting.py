"""Figure rendering for reports; always writes to files, never opens windows."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "svg.hashsalt": "ldpc-qaoa",
}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, bbox_inches="tight", metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_convergence(traces: dict, path, title: str | None = None) -> Path:
    """One panel per noise level: expected energy against optimization step.

    ``traces`` maps a sigma value to its energy sequence.
    """
    with plt.rc_context(STYLE):
        keys = list(traces)
        fig, axes = plt.subplots(1, len(keys), figsize=(3.0 * len(keys), 2.4), squeeze=False)
        for ax, sigma in zip(axes[0], keys):
            e = traces[sigma]
            ax.plot(range(len(e)), e, lw=1.2, color="C0")
            ax.set_title(f"$\\sigma = {sigma:g}$")
            ax.set_xlabel("optimization step")
            ax.grid(alpha=0.3)
        axes[0][0].set_ylabel(r"$\langle H \rangle$")
        if title:
            fig.suptitle(title)
        fig.tight_layout()
        return _save(fig, path)


def plot_success(summary_rows: list[dict], path, title: str | None = None) -> Path:
    """Success probability against sigma, one line per decoder, Wilson bars."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(3.4, 2.6))
        decoders = sorted({r["decoder"] for r in summary_rows})
        for i, dec in enumerate(decoders):
            rows = sorted((r for r in summary_rows if r["decoder"] == dec), key=lambda r: r["sigma"])
            x = [r["sigma"] for r in rows]
            p = [r["success_prob"] for r in rows]
            err = [[pi - r["wilson_low"] for pi, r in zip(p, rows)], [r["wilson_high"] - pi for pi, r in zip(p, rows)]]
            ax.errorbar(x, p, yerr=err, marker="os^"[i % 3], capsize=3, lw=1.2, label=dec.upper())
        ax.set_xlabel(r"noise std $\sigma$")
        ax.set_ylabel("success probability")
        ax.set_ylim(0, 1.05)
        ax.grid(alpha=0.3)
        if decoders:
            ax.legend()
        if title:
            ax.set_title(title)
        fig.tight_layout()
        return _save(fig, path)
