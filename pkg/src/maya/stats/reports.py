"""Plain-text and CSV report rendering for the pain and UTAUT analyses."""

from __future__ import annotations

import io
import csv
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from ..errors import DegenerateVarianceError, StatsError
from .ttests import TTestResult, paired_t_test
from .utaut import GroupComparison

SIGNIFICANCE_LEVEL = 0.05
MODE_A = "A_no_robot"
MODE_B = "B_with_robot"


def format_mean(value: float) -> str:
    return f"{value:.2f}"


def format_p(p: float) -> str:
    """p-value display: '< 0.001' floor, 3 decimals below 0.0095, else 2."""
    if p < 0.001:
        return "< 0.001"
    if p < 0.0095:
        return f"{p:.3f}"
    return f"{p:.2f}"


def format_p_sentence(p: float) -> str:
    return "p < 0.001" if p < 0.001 else f"p = {format_p(p)}"


def render_category_row(no: int, item: str, mean_a: float, sd_a: float,
                        mean_b: float, sd_b: float, p: float) -> str:
    """One table row: index, item, 'mean (SD)' per group, p, significance mark."""
    mark = " *" if p <= SIGNIFICANCE_LEVEL else ""
    return (
        f"{no:>3d}  {item:<6s}  "
        f"{format_mean(mean_a)} ({format_mean(sd_a)})  "
        f"{format_mean(mean_b)} ({format_mean(sd_b)})  "
        f"{format_p(p)}{mark}"
    )


def render_utaut_report(rows: Sequence[GroupComparison], title: str = "UTAUT group comparison") -> str:
    lines = [
        title,
        f"{'No.':>3s}  {'Item':<6s}  {'Children':<12s}  {'Parents':<12s}  P-value",
    ]
    for no, row in enumerate(rows, start=1):
        r = row.result
        lines.append(render_category_row(no, row.item, r.mean_a, r.sd_a, r.mean_b, r.sd_b,
                                         r.p_two_tailed))
    lines.append("*: p <= 0.05")
    return "\n".join(lines)


def utaut_report_csv(rows: Sequence[GroupComparison]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["no", "item", "mean_children", "sd_children", "mean_parents",
                     "sd_parents", "t", "df", "p_two_tailed", "kind"])
    for no, row in enumerate(rows, start=1):
        r = row.result
        writer.writerow([no, row.item, r.mean_a, r.sd_a, r.mean_b, r.sd_b, r.t, r.df,
                         r.p_two_tailed, r.kind])
    return buf.getvalue()


def _record_triple(record) -> tuple[str, str, int]:
    if hasattr(record, "participant_id"):
        mode = record.mode
        return (str(record.participant_id), getattr(mode, "value", str(mode)), int(record.score))
    pid, mode, score = record
    return (str(pid), getattr(mode, "value", str(mode)), int(score))


@dataclass
class PainReport:
    """Per-mode descriptives, the paired test, and a two-bar chart spec."""

    n: int
    mean_a: float
    sd_a: float
    mean_b: float
    sd_b: float
    ttest: Optional[TTestResult]
    error: Optional[str]
    chart: dict


def pain_report(records: Iterable) -> PainReport:
    """Summarize a complete pain cohort (one A and one B score per participant)."""
    by_participant: dict[str, dict[str, int]] = {}
    for record in records:
        pid, mode, score = _record_triple(record)
        if mode not in (MODE_A, MODE_B):
            raise StatsError(f"unknown pain mode {mode!r}")
        slot = by_participant.setdefault(pid, {})
        if mode in slot:
            raise StatsError(f"participant {pid} has two {mode} scores")
        slot[mode] = score
    if not by_participant:
        raise StatsError("no pain records")
    incomplete = sorted(pid for pid, modes in by_participant.items() if len(modes) != 2)
    if incomplete:
        raise StatsError(f"participants missing a mode: {incomplete}")

    participants = sorted(by_participant)
    a_scores = np.array([by_participant[p][MODE_A] for p in participants], dtype=np.float64)
    b_scores = np.array([by_participant[p][MODE_B] for p in participants], dtype=np.float64)

    ttest: Optional[TTestResult] = None
    error: Optional[str] = None
    try:
        ttest = paired_t_test(a_scores, b_scores)
    except DegenerateVarianceError as exc:
        error = exc.code
    except StatsError as exc:
        error = exc.code

    chart = {
        "participants": participants,
        "series": [
            {"label": MODE_A, "values": [int(v) for v in a_scores]},
            {"label": MODE_B, "values": [int(v) for v in b_scores]},
        ],
    }
    return PainReport(
        n=len(participants),
        mean_a=float(a_scores.mean()),
        sd_a=float(a_scores.std(ddof=1)) if len(a_scores) > 1 else 0.0,
        mean_b=float(b_scores.mean()),
        sd_b=float(b_scores.std(ddof=1)) if len(b_scores) > 1 else 0.0,
        ttest=ttest,
        error=error,
        chart=chart,
    )


PAIN_CSV_HEADER = ["participant_id", "mode", "score", "order"]


def parse_pain_csv(text: str) -> list[tuple[str, str, int]]:
    """Read pain records CSV (participant_id, mode, score, optional order)."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise StatsError("empty pain records CSV")
    header = [h.strip() for h in header]
    if header not in (PAIN_CSV_HEADER, PAIN_CSV_HEADER[:3]):
        raise StatsError(f"bad CSV header; expected {','.join(PAIN_CSV_HEADER)}")
    records = []
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) < 3:
            raise StatsError(f"short row: {row}")
        try:
            score = int(row[2])
        except ValueError:
            raise StatsError(f"participant {row[0]}: non-integer score {row[2]!r}")
        if not 0 <= score <= 10:
            raise StatsError(f"participant {row[0]}: score must be 0..10, got {score}")
        records.append((row[0].strip(), row[1].strip(), score))
    return records


def render_pain_report(report: PainReport) -> str:
    lines = [
        f"Pain report ({report.n} participants)",
        f"mode A (no robot):   mean {format_mean(report.mean_a)} (SD {format_mean(report.sd_a)})",
        f"mode B (with robot): mean {format_mean(report.mean_b)} (SD {format_mean(report.sd_b)})",
    ]
    if report.ttest is not None:
        t = report.ttest
        lines.append(
            f"paired t-test: t = {t.t:.2f}, df = {t.df:.0f}, {format_p_sentence(t.p_two_tailed)}"
        )
    else:
        lines.append(f"paired t-test: not available ({report.error})")
    return "\n".join(lines)
