"""Figure rendering for solve and bench outputs.

The command line writes these figures next to its delimited output
files; the functions also work standalone on in-memory reports.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = ["render_convergence", "render_bench_summary"]

_STYLE = {
    "axes.grid": True,
    "grid.alpha": 0.3,
    "figure.autolayout": True,
    "font.size": 9,
}


def render_convergence(report, path, dpi: int = 150):
    """Three-panel convergence figure from a report's iteration log.

    Shows the objective bound against the projected objective, the
    equality residual on a log scale, and the hyperplane count.
    Returns the path, or ``None`` when the log is empty.
    """
    if not report.log:
        return None
    ks = [rec.k for rec in report.log]
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, 3, figsize=(10.5, 3.2))
        axes[0].plot(ks, [rec.gamma for rec in report.log], label="bound", lw=1.4)
        axes[0].plot(
            ks, [rec.zeta for rec in report.log], label="projected", lw=1.4, ls="--"
        )
        axes[0].set_xlabel("iteration")
        axes[0].set_ylabel("objective value")
        axes[0].legend()
        b_dists = [max(rec.b_dist, 1e-17) for rec in report.log]
        axes[1].semilogy(ks, b_dists, lw=1.4, color="tab:red")
        axes[1].set_xlabel("iteration")
        axes[1].set_ylabel("equality residual")
        axes[2].step(
            ks, [rec.cuts_total for rec in report.log], where="post", lw=1.4, color="tab:green"
        )
        axes[2].set_xlabel("iteration")
        axes[2].set_ylabel("hyperplanes")
        fig.suptitle(f"status: {report.status.value}", fontsize=9)
        fig.savefig(path, dpi=dpi, bbox_inches="tight")
        plt.close(fig)
    return path


def render_bench_summary(rows, path, dpi: int = 150):
    """Bar chart of mean iterations and hyperplane growth per cell.

    ``rows`` are the dictionaries the bench command assembles (one per
    grid cell).  Returns the path, or ``None`` for an empty table.
    """
    if not rows:
        return None
    labels = [f"m={r['m']} {r['dims']}" for r in rows]
    xs = range(len(rows))
    with plt.rc_context(_STYLE):
        fig, axes = plt.subplots(1, 2, figsize=(8.5, 3.2))
        axes[0].bar(xs, [r["mean_iterations"] for r in rows], color="tab:blue")
        axes[0].set_xticks(list(xs))
        axes[0].set_xticklabels(labels, rotation=30, ha="right")
        axes[0].set_ylabel("mean iterations")
        width = 0.4
        axes[1].bar(
            [x - width / 2 for x in xs],
            [r["mean_initial_hyperplanes"] for r in rows],
            width,
            label="initial",
            color="tab:gray",
        )
        axes[1].bar(
            [x + width / 2 for x in xs],
            [r["mean_final_hyperplanes"] for r in rows],
            width,
            label="final",
            color="tab:green",
        )
        axes[1].set_xticks(list(xs))
        axes[1].set_xticklabels(labels, rotation=30, ha="right")
        axes[1].set_ylabel("mean hyperplanes")
        axes[1].legend()
        fig.savefig(path, dpi=dpi, bbox_inches="tight")
        plt.close(fig)
    return path
