"""Report rendering: delimited candidate tables plus matplotlib figures.

The mine and eval-planners commands keep their deterministic JSON on
stdout; when asked, they also drop a small report bundle into a directory:
a CSV table and PNG charts.  matplotlib stays a lazy import so the rest of
the package never pays for it.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .mining import MiningReport, ViolationReport

_FIG_METADATA = {"Software": "capclose"}


def _agg_pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def write_mining_csv(report: MiningReport, path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tail", "head", "witnesses"])
        for stat in report.candidates:
            writer.writerow([" ".join(stat.tail), stat.head, stat.witnesses])


def write_planner_csv(report: ViolationReport, path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["planner", "violation_instances", "conjunctive_instances", "rate"])
        writer.writerow(
            [
                "workflow",
                report.workflow_violation_instances,
                report.conjunctive_instances,
                f"{report.workflow_rate:.6f}",
            ]
        )
        writer.writerow(
            [
                "hypergraph",
                report.hypergraph_violation_instances,
                report.conjunctive_instances,
                f"{report.hypergraph_rate:.6f}",
            ]
        )


def render_mining_report(report: MiningReport, out_dir: Path) -> list[Path]:
    """Write mining_candidates.csv plus two charts into out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    plt = _agg_pyplot()
    written = []

    csv_path = out_dir / "mining_candidates.csv"
    write_mining_csv(report, csv_path)
    written.append(csv_path)

    names = [f"{','.join(stat.tail)} -> {stat.head}" for stat in report.candidates]
    counts = [stat.witnesses for stat in report.candidates]
    fig, ax = plt.subplots(figsize=(7, max(2.0, 0.45 * len(names) + 1.2)))
    ax.barh(range(len(names)), counts, color="#4878a8")
    ax.set_yticks(range(len(names)))
    ax.set_yticklabels(names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("witnessing trajectories")
    ax.set_title("Candidate rule witness counts")
    fig.tight_layout()
    bars_path = out_dir / "mining_candidates.png"
    fig.savefig(bars_path, dpi=150, metadata=dict(_FIG_METADATA))
    plt.close(fig)
    written.append(bars_path)

    fig, ax = plt.subplots(figsize=(4, 4))
    err_low = report.prevalence - report.wilson_low
    err_high = report.wilson_high - report.prevalence
    ax.errorbar(
        [0],
        [report.prevalence],
        yerr=[[err_low], [err_high]],
        fmt="o",
        color="#4878a8",
        capsize=6,
    )
    ax.set_xlim(-1, 1)
    ax.set_ylim(0, 1)
    ax.set_xticks([0])
    ax.set_xticklabels(["conjunctive instances"])
    ax.set_ylabel("prevalence")
    ax.set_title(f"Prevalence {report.prevalence:.3f} with 95% Wilson interval")
    fig.tight_layout()
    prev_path = out_dir / "mining_prevalence.png"
    fig.savefig(prev_path, dpi=150, metadata=dict(_FIG_METADATA))
    plt.close(fig)
    written.append(prev_path)
    return written


def render_planner_report(report: ViolationReport, out_dir: Path) -> list[Path]:
    """Write planner_rates.csv plus the rate comparison chart into out_dir."""
    out_dir.mkdir(parents=True, exist_ok=True)
    plt = _agg_pyplot()
    written = []

    csv_path = out_dir / "planner_rates.csv"
    write_planner_csv(report, csv_path)
    written.append(csv_path)

    fig, ax = plt.subplots(figsize=(5, 4))
    rates = [report.workflow_rate, report.hypergraph_rate]
    ax.bar(["workflow", "hypergraph"], rates, color=["#b04a4a", "#4878a8"])
    ax.set_ylim(0, 1)
    ax.set_ylabel("violation rate over conjunctive instances")
    ax.set_title(
        f"AND violations on {report.conjunctive_instances} conjunctive instances"
    )
    for i, rate in enumerate(rates):
        ax.text(i, rate + 0.02, f"{rate:.3f}", ha="center", fontsize=9)
    fig.tight_layout()
    chart_path = out_dir / "planner_rates.png"
    fig.savefig(chart_path, dpi=150, metadata=dict(_FIG_METADATA))
    plt.close(fig)
    written.append(chart_path)
    return written
