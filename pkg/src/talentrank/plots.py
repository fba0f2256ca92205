"""Figure rendering for the report paths.

The skill map renders as a cluster-colored scatter (noise in gray) and the
score chart as paired skill/work bars in ranking order, both written to
image files next to the delimited exports.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .skillspace import SkillMap2D


def render_skill_map(skill_map: SkillMap2D, path: str | Path, annotate: bool = True) -> Path:
    """Scatter the 2-D skill map, one color per cluster, and save it."""
    path = Path(path)
    fig, ax = plt.subplots(figsize=(9, 7))
    ids = np.asarray(skill_map.cluster_ids)
    coords = np.asarray(skill_map.coords)
    cluster_values = sorted(set(int(c) for c in ids))
    cmap = plt.get_cmap("tab10")
    for cluster in cluster_values:
        mask = ids == cluster
        if cluster == -1:
            ax.scatter(coords[mask, 0], coords[mask, 1], c="lightgray", s=22, label="noise")
        else:
            ax.scatter(coords[mask, 0], coords[mask, 1], color=cmap(cluster % 10), s=26,
                       label=f"cluster {cluster}")
    if annotate and len(skill_map.tokens) <= 120:
        for token, (x, y) in zip(skill_map.tokens, coords):
            ax.annotate(token, (x, y), fontsize=6, alpha=0.75,
                        xytext=(2, 2), textcoords="offset points")
    ax.set_title("Skill map (2-D projection, density clusters)")
    ax.set_xticks([])
    ax.set_yticks([])
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def render_score_chart(entries: list[tuple[str, float, float]], path: str | Path) -> Path:
    """Paired skill/work bars per candidate, preserving the given order."""
    path = Path(path)
    labels = [e[0] for e in entries]
    skills = [e[1] for e in entries]
    work = [e[2] for e in entries]
    x = np.arange(len(entries))
    width = 0.38
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(entries) + 2), 4.5))
    ax.bar(x - width / 2, skills, width, label="skills score", color="#4c72b0")
    ax.bar(x + width / 2, work, width, label="work score", color="#dd8452")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
    ax.set_ylim(0, 105)
    ax.set_ylabel("score")
    ax.set_title("Score chart (ordered by skill score, work breaks ties)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
