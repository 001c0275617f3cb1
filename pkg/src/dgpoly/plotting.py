"""Figures for the CLI: a digraph with its verdicts, and suite timings.

matplotlib is imported lazily with the Agg backend so the library itself
never needs a display.
"""

from __future__ import annotations

import math


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def _layout(S):
    # vertices on a circle, in vertex order
    n = max(S.size, 1)
    return {v: (math.cos(2 * math.pi * k / n + math.pi / 2), math.sin(2 * math.pi * k / n + math.pi / 2))
            for k, v in enumerate(S.vertices)}


def draw_report(report, path) -> None:
    """Digraph on the left, condition/verdict table on the right."""
    plt = _pyplot()
    S = report.template
    fig, (ax, tx) = plt.subplots(1, 2, figsize=(9, 4.5), gridspec_kw={"width_ratios": [1, 1.2]})
    pos = _layout(S)
    for u, v in S.sorted_edges():
        (x0, y0), (x1, y1) = pos[u], pos[v]
        ax.annotate("", xy=(x1, y1), xytext=(x0, y0),
                    arrowprops=dict(arrowstyle="-|>", color="0.35", shrinkA=9, shrinkB=9, lw=0.8))
    for v, (x, y) in pos.items():
        ax.scatter([x], [y], s=260, color="white", edgecolor="black", zorder=3)
        ax.text(x, y, v, ha="center", va="center", fontsize=7, zorder=4)
    ax.set_xlim(-1.35, 1.35)
    ax.set_ylim(-1.35, 1.35)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title(f"|V|={S.size}, |E|={len(S.edges)}", fontsize=9)

    colours = {"holds": "#cfe8cf", "fails": "#f2c9c9", "unknown_above_bound": "#f3e6bd", "error": "#dddddd"}
    rows = [[r.condition, r.verdict, "" if r.parameter is None else str(r.parameter)] for r in report.results]
    tx.axis("off")
    if rows:
        table = tx.table(cellText=rows, colLabels=["condition", "verdict", "param"], loc="center")
        table.auto_set_font_size(False)
        table.set_fontsize(8)
        for k, r in enumerate(report.results, start=1):
            table[k, 1].set_facecolor(colours.get(r.verdict, "white"))
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def draw_suite(results, path) -> None:
    """Horizontal bar chart of per-criterion runtime, coloured by pass/fail."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 0.35 * len(results) + 1.2))
    labels = [f"{r.id}. {r.name}" for r in results]
    ax.barh(range(len(results)), [r.millis for r in results],
            color=["#5a9e5a" if r.passed else "#c0504d" for r in results])
    ax.set_yticks(range(len(results)))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("milliseconds")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
