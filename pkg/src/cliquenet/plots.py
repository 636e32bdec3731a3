"""Self-contained SVG plots for sweep results, with theory overlays."""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .sweeps import SweepRecord  # noqa: E402

_LOG_Y = {"accept", "ratio", "retrieval"}


def plot_records(records: Iterable[SweepRecord], path: str) -> None:
    """Render one figure for a sweep's records and save it as SVG."""
    records = list(records)
    if not records:
        raise ValueError("nothing to plot")
    experiment = records[0].experiment
    if experiment == "capacity":
        _plot_capacity(records, path)
        return

    fig, ax = plt.subplots(figsize=(7, 5))
    groups: dict[tuple, list[SweepRecord]] = defaultdict(list)
    for rec in records:
        if rec.protocol in ("", "probes", "stability", "recall"):
            groups[(rec.protocol, rec.c, rec.l)].append(rec)
    for (protocol, c, l), recs in sorted(groups.items(), key=str):
        recs.sort(key=lambda r: (r.m_messages or 0, r.iterations or 0))
        xs = [r.m_messages for r in recs]
        label = " ".join(p for p in (protocol, f"c={c}" if c else "", f"l={l}" if l else "") if p)
        field = "ratio" if experiment == "ratio" else "p_hat"
        ys = [getattr(r, field) for r in recs]
        errs = [r.wilson_half_width for r in recs]
        ax.errorbar(xs, ys, yerr=errs, marker="o", linestyle="-", capsize=3,
                    label=label or experiment)
        tfield = "ratio_theory" if experiment == "ratio" else "theory"
        theory = [getattr(r, tfield) for r in recs]
        if all(t is not None for t in theory):
            ax.plot(xs, theory, linestyle="--", alpha=0.7,
                    label=f"theory {label}".strip())
    if experiment in _LOG_Y:
        ax.set_yscale("log")
    ax.set_xlabel("learnt messages")
    ax.set_ylabel({"density": "density", "accept": "acceptance probability",
                   "ratio": "accepted-over-learnt ratio",
                   "retrieval": "retrieval error",
                   "hopfield_baseline": "error rate"}.get(experiment, "estimate"))
    ax.set_title(experiment)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def _plot_capacity(records: list[SweepRecord], path: str) -> None:
    fig, ax = plt.subplots(figsize=(7, 5))
    for protocol, style in (("clique", "o-"), ("hnn", "s--")):
        recs = [r for r in records if r.protocol == protocol
                and r.memory_bits and r.capacity_bits]
        recs.sort(key=lambda r: r.memory_bits)
        if recs:
            ax.loglog([r.memory_bits for r in recs], [r.capacity_bits for r in recs],
                      style, label=protocol)
    lims = ax.get_xlim()
    ax.loglog(lims, lims, ":", color="gray", label="efficiency 1")
    ax.set_xlabel("memory used (bits)")
    ax.set_ylabel("capacity (bits)")
    ax.set_title("capacity vs memory")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
