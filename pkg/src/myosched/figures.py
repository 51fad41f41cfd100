"""Render completed-vs-window-size figures from grid results."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import figure_basename, group_conditions
from .heuristics import format_weight

# fixed metadata keeps PNG output byte-identical across runs
_PNG_METADATA = {"Software": "myosched"}


def render_figures(results, outdir) -> list[Path]:
    """One PNG per (n, proc_range, w) group, next to the emitted CSVs.

    Each replication is drawn as a point, the replication mean as a line,
    mirroring the five-observation scatter plus trend layout.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for (n, proc_range, w), rows in group_conditions(results):
        rows = [r for r in rows if r.error is None]
        if not rows:
            continue
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        ks = [r.k for r in rows]
        for r in rows:
            ax.plot(
                [r.k] * len(r.per_rep),
                [rep.completed for rep in r.per_rep],
                "x",
                color="0.55",
                markersize=5,
            )
        ax.plot(ks, [r.mean_completed for r in rows], "o-", color="C0", label="mean")
        ax.set_xlabel("window size K")
        ax.set_ylabel("completed processes")
        ax.set_xticks(ks)
        ax.set_title(
            f"n={n}, proc {proc_range[0]}..{proc_range[1]}, W={format_weight(w)}",
            fontsize=10,
        )
        ax.legend(loc="best", fontsize=8)
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        path = outdir / f"{figure_basename(n, proc_range, w)}.png"
        fig.savefig(path, dpi=150, metadata=_PNG_METADATA)
        plt.close(fig)
        paths.append(path)
    return paths
