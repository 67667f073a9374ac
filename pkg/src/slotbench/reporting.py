"""Aggregation of episode records into plot-ready CSV tables.

Three emissions per report: per-domain means, an h-by-b heatmap of mean
reward, and a one-row overall summary with the failure histogram.
Reward cells are percentages rounded to one decimal; a heatmap cell
averages every record matching its (h, b) pair across domains.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .harness import (
    FAILURE_ENDPOINT,
    FAILURE_NONE,
    FAILURE_STEP_LIMIT,
    FAILURE_TOKEN_OVERFLOW,
    EvalRecord,
)

FAILURE_REASONS = (
    FAILURE_NONE,
    FAILURE_STEP_LIMIT,
    FAILURE_TOKEN_OVERFLOW,
    FAILURE_ENDPOINT,
)

BY_DOMAIN_CSV = "by_domain.csv"
HEATMAP_CSV = "heatmap_h_b.csv"
SUMMARY_CSV = "summary.csv"


@dataclass(frozen=True)
class AggregateReport:
    episodes: int
    overall_reward: float
    by_domain: dict[str, tuple[int, float]]
    h_values: tuple[int, ...]
    b_values: tuple[int, ...]
    matrix: dict[tuple[int, int], float]
    mean_steps: float
    mean_completion_tokens: float
    failure_counts: dict[str, int]


def aggregate(records: list[EvalRecord]) -> AggregateReport:
    if not records:
        raise ConfigError("no records to aggregate")
    by_domain_rewards: dict[str, list[int]] = {}
    by_cell_rewards: dict[tuple[int, int], list[int]] = {}
    failure_counts = {reason: 0 for reason in FAILURE_REASONS}
    for record in records:
        by_domain_rewards.setdefault(record.domain, []).append(record.reward)
        by_cell_rewards.setdefault((record.h, record.b), []).append(record.reward)
        failure_counts[record.failure_reason] = (
            failure_counts.get(record.failure_reason, 0) + 1
        )
    total = len(records)
    return AggregateReport(
        episodes=total,
        overall_reward=sum(r.reward for r in records) / total,
        by_domain={
            domain: (len(rewards), sum(rewards) / len(rewards))
            for domain, rewards in sorted(by_domain_rewards.items())
        },
        h_values=tuple(sorted({record.h for record in records})),
        b_values=tuple(sorted({record.b for record in records})),
        matrix={
            cell: sum(rewards) / len(rewards)
            for cell, rewards in by_cell_rewards.items()
        },
        mean_steps=sum(r.steps for r in records) / total,
        mean_completion_tokens=sum(r.completion_tokens for r in records) / total,
        failure_counts=failure_counts,
    )


def _pct(fraction: float) -> str:
    return f"{100.0 * fraction:.1f}"


def write_by_domain_csv(report: AggregateReport, path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["domain", "episodes", "mean_reward_pct"])
        for domain, (count, mean_reward) in report.by_domain.items():
            writer.writerow([domain, count, _pct(mean_reward)])
        writer.writerow(["overall", report.episodes, _pct(report.overall_reward)])


def write_heatmap_csv(report: AggregateReport, path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["h"] + [str(b) for b in report.b_values])
        for h in report.h_values:
            row: list[str] = [str(h)]
            for b in report.b_values:
                mean_reward = report.matrix.get((h, b))
                row.append("" if mean_reward is None else _pct(mean_reward))
            writer.writerow(row)


def write_summary_csv(report: AggregateReport, path: str | Path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            ["episodes", "mean_reward_pct", "mean_steps", "mean_completion_tokens"]
            + [f"failures_{reason}" for reason in FAILURE_REASONS]
        )
        writer.writerow(
            [
                report.episodes,
                _pct(report.overall_reward),
                f"{report.mean_steps:.1f}",
                f"{report.mean_completion_tokens:.1f}",
            ]
            + [report.failure_counts.get(reason, 0) for reason in FAILURE_REASONS]
        )


def write_report_files(report: AggregateReport, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    targets = [
        (out / BY_DOMAIN_CSV, write_by_domain_csv),
        (out / HEATMAP_CSV, write_heatmap_csv),
        (out / SUMMARY_CSV, write_summary_csv),
    ]
    for path, writer in targets:
        writer(report, path)
    return [path for path, _ in targets]
