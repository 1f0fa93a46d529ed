"""Matplotlib renderings of scenario results, written alongside reports."""

from __future__ import annotations

from pathlib import Path
from typing import Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def render_margin_figure(rows: list[dict], out_path: Union[str, Path]) -> Path:
    """Bar chart of new-special-asset margins, grouped by event."""
    out = Path(out_path)
    labels, margins, colors = [], [], []
    cmap = plt.get_cmap("tab10")
    for i, row in enumerate(rows):
        for asset, margin in zip(row["new_special_assets"], row["margin_mw"]):
            labels.append(f"{asset}\n({row['event']})")
            margins.append(margin)
            colors.append(cmap(i % 10))
    fig, ax = plt.subplots(figsize=(max(6, 1.2 * len(labels) + 2), 4.5))
    if labels:
        ax.bar(range(len(labels)), margins, color=colors)
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, fontsize=8)
        ax.axhline(0.0, color="black", linewidth=0.8)
    else:
        ax.text(0.5, 0.5, "no special assets", ha="center", va="center")
        ax.set_xticks([])
    ax.set_ylabel("transfer margin (MW)")
    ax.set_title("new special assets per event")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out


def render_timing_figure(rows: list[dict], out_path: Union[str, Path]) -> Path:
    """Stacked bars of per-event update/shortlist/re-test wall time."""
    out = Path(out_path)
    events = [r["event"] for r in rows]
    ups = [r.get("ups_s", 0.0) for r in rows]
    sa = [r.get("sa_s", 0.0) for r in rows]
    ft = [r.get("ft_s", 0.0) for r in rows]
    fig, ax = plt.subplots(figsize=(max(6, 1.0 * len(events) + 2), 4.0))
    x = range(len(events))
    ax.bar(x, ups, label="flow update")
    ax.bar(x, sa, bottom=ups, label="shortlisting")
    ax.bar(x, ft, bottom=[a + b for a, b in zip(ups, sa)], label="re-tests")
    ax.set_xticks(list(x))
    ax.set_xticklabels(events, fontsize=8, rotation=20, ha="right")
    ax.set_ylabel("seconds")
    ax.set_title("per-event analysis time")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    plt.close(fig)
    return out
