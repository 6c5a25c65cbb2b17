"""Figures written next to the tabular reports."""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

POS_COLOR = "#4c9a2a"
NEG_COLOR = "#c0392b"

STYLE = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.spines.right": False,
    "axes.spines.top": False,
    "axes.titlesize": 10,
    "legend.frameon": False,
    "svg.hashsalt": "sentiframes",
}

# no timestamps or version strings, so reruns give identical files
_METADATA = {"Software": None}


def _save(fig, path) -> None:
    fig.savefig(path, format="png", dpi=120, metadata=_METADATA)
    plt.close(fig)


def plot_pair_report(ranked: Sequence, direction, path) -> None:
    """Stacked horizontal bars of positive/negative shares per entity pair."""
    from .corpus import Direction

    with plt.rc_context(STYLE):
        height = 1.6 + 0.35 * max(len(ranked), 1)
        fig, ax = plt.subplots(figsize=(7, height))
        labels = [f"{r.stats.source} → {r.stats.target} (n={r.stats.total})" for r in ranked]
        pos = [100 * r.stats.positive / r.stats.total for r in ranked]
        neg = [100 * r.stats.negative / r.stats.total for r in ranked]
        y = list(range(len(ranked)))[::-1]
        ax.barh(y, pos, color=POS_COLOR, label="positive")
        ax.barh(y, neg, left=pos, color=NEG_COLOR, label="negative")
        for yi, r in zip(y, ranked):
            share = r.positive_share if direction is Direction.MOST_POSITIVE else r.negative_share
            ax.text(101, yi, share, va="center", fontsize=8)
        ax.set_yticks(y)
        ax.set_yticklabels(labels)
        ax.set_xlim(0, 112)
        ax.set_xlabel("share of sentences, %")
        title = "Most positive attitudes" if direction is Direction.MOST_POSITIVE \
            else "Most negative attitudes"
        ax.set_title(title)
        if ranked:
            fig.legend(loc="lower center", ncol=2, fontsize=8)
        else:
            ax.text(50, 0, "no pairs", ha="center", va="center")
            ax.set_yticks([])
        fig.tight_layout(rect=(0, 0.45 / height, 1, 1))
        _save(fig, path)


def plot_lexicon_stats(stats, path) -> None:
    """Entry counts per attitude and effect dimension, split by sign."""
    from .frames import Sign

    with plt.rc_context(STYLE):
        fig, (left, right) = plt.subplots(1, 2, figsize=(9, 3.6),
                                          gridspec_kw={"width_ratios": [3, 2]})
        for ax, table, title in ((left, stats.attitudes, "Attitudes"),
                                 (right, stats.effects, "Effects")):
            dims = list(dict.fromkeys(d for d, _ in table))
            x = range(len(dims))
            w = 0.38
            ax.bar([i - w / 2 for i in x], [table[(d, Sign.POS)] for d in dims], w,
                   color=POS_COLOR, label="pos")
            ax.bar([i + w / 2 for i in x], [table[(d, Sign.NEG)] for d in dims], w,
                   color=NEG_COLOR, label="neg")
            ax.set_xticks(list(x))
            ax.set_xticklabels(dims)
            ax.set_title(title)
            ax.set_ylabel("entries")
        left.legend()
        fig.suptitle(f"{stats.unique_entries} unique / {stats.total_entries} total entries",
                     fontsize=9)
        fig.tight_layout()
        _save(fig, path)
