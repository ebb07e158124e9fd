"""Intervention-rate statistics and timing CDF."""

from __future__ import annotations

import numpy as np

from .records import SessionLog


def intervention_stats(log: SessionLog, n_bins: int = 20) -> dict:
    """Fraction of intervened steps plus a CDF over normalized episode time."""
    if not log.steps:
        raise ValueError("empty session log")
    total = len(log.steps)
    human = log.intervened_steps()
    fraction = len(human) / total
    lengths = {ep["episode"]: ep["steps"] for ep in log.episodes if not ep.get("discarded")}
    times = [
        s.step / max(lengths.get(s.episode, 1), 1)
        for s in human
        if s.episode in lengths
    ]
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    if times:
        hist, _ = np.histogram(np.clip(times, 0.0, 1.0), bins=edges)
        cdf = np.cumsum(hist) / len(times)
    else:
        cdf = np.zeros(n_bins)
    return {
        "fraction": fraction,
        "n_interventions": len(human),
        "n_steps": total,
        "cdf_edges": edges.tolist(),
        "cdf": cdf.tolist(),
    }
