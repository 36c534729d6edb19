"""Render report figures to files next to the delimited output.

Figures are a convenience view of the CSV/JSON reports; the delimited files
remain the canonical, byte-stable surface (PNGs carry no determinism
guarantee).
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import ExperimentResult

__all__ = ["render_rate_figure", "render_density_figure"]


def render_rate_figure(result: ExperimentResult, path: str) -> str:
    """Log-log distance-vs-n curves with their fitted slopes and bounds."""
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for kind in result.config.kinds:
        for k in result.config.k_list:
            rows = [r for r in result.rows if r.kind == kind and r.k == k]
            if not rows:
                continue
            ns = [r.n for r in rows]
            vals = [r.report.value for r in rows]
            (line,) = ax.loglog(ns, vals, "o-", label=f"{kind} k={k}")
            bounds = [(r.n, r.report.bound.total) for r in rows if r.report.bound is not None]
            if bounds:
                ax.loglog(*zip(*bounds), "--", color=line.get_color(), alpha=0.6, label=f"bound k={k}")
    for fit in result.fits:
        xs = [math.exp(p[0]) for p in fit.points]
        ys = [math.exp(fit.intercept + fit.slope * p[0]) for p in fit.points]
        ax.loglog(xs, ys, ":", color="0.4")
        ax.annotate(f"slope {fit.slope:.2f}", (xs[-1], ys[-1]), fontsize=8, color="0.3")
    ax.set_xlabel("n")
    ax.set_ylabel("distance")
    base = result.config.base
    ax.set_title(f"exact vs limit, base={base.g_choice} family={base.family} norming={result.config.norming}")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def render_density_figure(rows: list[tuple[str, float, float]], path: str) -> str:
    """Plot a (label, x, density) table as one curve per label."""
    by_label: dict[str, tuple[list[float], list[float]]] = {}
    for label, x, d in rows:
        xs, ds = by_label.setdefault(label, ([], []))
        xs.append(x)
        ds.append(d)
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    for label, (xs, ds) in by_label.items():
        ax.plot(xs, ds, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel("density")
    ax.set_title("generalized log-Pareto densities")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
