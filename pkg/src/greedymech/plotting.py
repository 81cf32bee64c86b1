"""Figures written next to CLI reports. Matplotlib runs headless (Agg)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.bbox": "tight",
}


def _save(fig, path) -> Path:
    path = Path(path)
    # pin metadata so identical inputs give identical files
    meta = {"Software": None} if path.suffix == ".png" else {}
    if path.suffix in (".svg", ".pdf"):
        meta = {"Date": None}
    fig.savefig(path, metadata=meta)
    plt.close(fig)
    return path


def ratio_figure(ratios, bound, path, title: str = ""):
    """Histogram of per-instance OPT/ALG with the proven bound marked."""
    vals = [float(r) for r in ratios if r is not None]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 3.2))
        if vals:
            ax.hist(vals, bins=min(30, max(5, len(set(vals)))), color="0.45")
        ax.axvline(float(bound), color="tab:red", linestyle="--", label=f"bound {float(bound):.3f}")
        ax.set_xlabel("OPT / ALG")
        ax.set_ylabel("instances")
        if title:
            ax.set_title(title)
        ax.legend(frameon=False)
        return _save(fig, path)


def trace_figure(inst, trace, path, title: str = ""):
    """One row per agent: its reported window, with the winning slot marked."""
    chosen = {i: ev.slot for ev in trace for i in ev.chosen}
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 0.4 * max(inst.n, 3) + 1))
        for b in inst.bids:
            ax.plot([b.arrival - 0.4, b.departure + 0.4], [b.agent_id] * 2,
                    color="0.7", linewidth=6, solid_capstyle="butt")
            if b.agent_id in chosen:
                ax.plot(chosen[b.agent_id], b.agent_id, "o", color="tab:blue")
            ax.annotate(str(b.value), (b.departure + 0.5, b.agent_id), va="center", fontsize=8)
        ax.set_xticks([s.slot for s in inst.bins])
        ax.set_yticks(range(inst.n))
        ax.set_xlabel("slot")
        ax.set_ylabel("agent")
        ax.invert_yaxis()
        if title:
            ax.set_title(title)
        return _save(fig, path)
