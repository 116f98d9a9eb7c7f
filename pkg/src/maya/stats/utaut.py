"""Scoring of the 43-item modified UTAUT questionnaire.

Thirteen categories partition the 43 questions; a category score is the mean
of its answers on the 1..5 Likert scale. Reverse scoring (r -> 6 - r) is
available per question but nothing is reversed by default: published
aggregates for the negatively worded items are consistent with raw scoring.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Literal, Optional, Sequence

import numpy as np

from ..errors import DyadError, StatsError
from .ttests import TTestResult, paired_t_test, welch_t_test

NUM_QUESTIONS = 43
GROUPS = ("child", "parent")

CATEGORY_ORDER = (
    "ANX", "ATT", "FC", "ITU", "PAD", "PENJ", "PEOU", "PS", "PU", "SI", "SP", "Trust", "ATEG",
)

CATEGORY_TITLES = {
    "ANX": "Anxiety",
    "ATT": "Attitude towards technology",
    "FC": "Facilitating conditions",
    "ITU": "Intention to Use",
    "PAD": "Perceived Adaptiveness",
    "PENJ": "Perceived Enjoyment",
    "PEOU": "Perceived Ease of Use",
    "PS": "Perceived Sociability",
    "PU": "Perceived Usefulness",
    "SI": "Social Influence",
    "SP": "Social Presence",
    "Trust": "Trust",
    "ATEG": "Attitude towards Educational Game",
}

_DEFAULT_RANGES = {
    "ANX": (1, 4), "ATT": (5, 7), "FC": (8, 9), "ITU": (10, 12), "PAD": (13, 15),
    "PENJ": (16, 20), "PEOU": (21, 25), "PS": (26, 29), "PU": (30, 32),
    "SI": (33, 34), "SP": (35, 37), "Trust": (38, 39), "ATEG": (40, 43),
}

QUESTION_TEXTS = (
    "If I should use the robot and game, I would be afraid to make mistakes with it",
    "If I should use the robot and game, I would be afraid to break something",
    "I find the robot and game scary",
    "I find the robot and game intimidating",
    "I think it's a good idea to use the robot and game",
    "The robot and game would make life more interesting",
    "It's good to make use of the robot and game",
    "I have everything I need to use the robot and game",
    "I know enough about the robot and game to make good use of it",
    "I think I'll use the robot and game during the next few days",
    "I'm certain to use the robot and game during the next few days",
    "I plan to use the robot and game during the next few days",
    "I think the robot and game can be adaptive to what I need",
    "I think the robot and game will only do what I need at that particular moment",
    "I think the robot and game will help me when I consider it to be necessary",
    "I enjoy the robot and game talking to me",
    "I enjoy doing things with the robot and game",
    "I find the robot and game enjoyable",
    "I find the robot and game fascinating",
    "I find the robot and game boring",
    "I think I will know quickly how to use the robot and game",
    "I find the robot and game easy to use",
    "I think I can use the robot and game without any help",
    "I think I can use the robot and game when there is someone around to help me",
    "I think I can use the robot and game when I have a good manual",
    "I consider the robot a pleasant conversational partner",
    "I find the robot pleasant to interact with",
    "I feel the robot understands me",
    "I think the robot is nice",
    "I think the robot and game are useful to me",
    "It would be convenient for me to have the robot and game",
    "I think the robot and game can help me with many things",
    "I think the staff would like me to use the robot and game",
    "I think it would give a good impression if I should use the robot and game",
    "It sometimes felt as if the robot was really looking at me",
    "I can imagine the robot to be a living creature",
    "Sometimes the robot seems to have real feelings",
    "I would trust the robot and game if it gave me advice",
    "I would follow the advice the robot and game give me",
    "I pay attention to the educational content that the robot and game are teaching me",
    "Education is interesting when using the robot and game",
    "I think using the robot and the game for education is more effective than normal education",
    "I find education boring when using the robot and game",
)


@dataclass(frozen=True)
class CategoryMap:
    """Category name -> 1-based question indices, plus reverse-score flags."""

    categories: dict[str, tuple[int, ...]]
    reverse_scored: frozenset[int] = frozenset()

    def __post_init__(self):
        seen: dict[int, str] = {}
        for cat, indices in self.categories.items():
            for q in indices:
                if not 1 <= q <= NUM_QUESTIONS:
                    raise StatsError(f"question index {q} out of range in {cat}")
                if q in seen:
                    raise StatsError(f"question {q} appears in both {seen[q]} and {cat}")
                seen[q] = cat
        if len(seen) != NUM_QUESTIONS:
            missing = sorted(set(range(1, NUM_QUESTIONS + 1)) - set(seen))
            raise StatsError(f"unmapped questions: {missing}")
        for q in self.reverse_scored:
            if not 1 <= q <= NUM_QUESTIONS:
                raise StatsError(f"reverse-scored index {q} out of range")

    @classmethod
    def default(cls, reverse_scored: Iterable[int] = ()) -> "CategoryMap":
        cats = {
            cat: tuple(range(lo, hi + 1)) for cat, (lo, hi) in _DEFAULT_RANGES.items()
        }
        return cls(categories=cats, reverse_scored=frozenset(reverse_scored))


@dataclass(frozen=True)
class UTAUTResponse:
    respondent_id: str
    group: Literal["child", "parent"]
    answers: tuple[int, ...]
    dyad_id: Optional[str] = None

    def __post_init__(self):
        if self.group not in GROUPS:
            raise StatsError(f"group must be child or parent, got {self.group!r}")
        if len(self.answers) != NUM_QUESTIONS:
            raise StatsError(
                f"respondent {self.respondent_id}: expected {NUM_QUESTIONS} answers, "
                f"got {len(self.answers)}"
            )
        for q, answer in enumerate(self.answers, start=1):
            if not isinstance(answer, (int, np.integer)) or not 1 <= answer <= 5:
                raise StatsError(
                    f"respondent {self.respondent_id}: answer to q{q} must be 1..5, got {answer!r}"
                )

    def answer(self, question: int, cmap: CategoryMap) -> float:
        raw = self.answers[question - 1]
        return float(6 - raw) if question in cmap.reverse_scored else float(raw)


@dataclass(frozen=True)
class CategoryScores:
    respondent_id: str
    group: str
    scores: dict[str, float]
    dyad_id: Optional[str] = None


def score_utaut(
    responses: Sequence[UTAUTResponse], cmap: Optional[CategoryMap] = None
) -> list[CategoryScores]:
    """Per-respondent category means over the 1..5 scale."""
    cmap = cmap or CategoryMap.default()
    out = []
    for resp in responses:
        scores = {
            cat: float(np.mean([resp.answer(q, cmap) for q in indices]))
            for cat, indices in cmap.categories.items()
        }
        out.append(CategoryScores(resp.respondent_id, resp.group, scores, resp.dyad_id))
    return out


@dataclass(frozen=True)
class GroupComparison:
    """One row of the children-vs-parents table: an item and its t-test."""

    item: str
    result: TTestResult


def _paired_by_dyad(
    children: Sequence[UTAUTResponse], parents: Sequence[UTAUTResponse]
) -> list[tuple[UTAUTResponse, UTAUTResponse]]:
    child_by_dyad: dict[str, UTAUTResponse] = {}
    for c in children:
        if c.dyad_id is None:
            raise DyadError(f"child {c.respondent_id} has no dyad_id")
        if c.dyad_id in child_by_dyad:
            raise DyadError(f"duplicate child dyad {c.dyad_id}")
        child_by_dyad[c.dyad_id] = c
    pairs = []
    seen = set()
    for p in parents:
        if p.dyad_id is None:
            raise DyadError(f"parent {p.respondent_id} has no dyad_id")
        if p.dyad_id not in child_by_dyad:
            raise DyadError(f"parent dyad {p.dyad_id} has no child")
        if p.dyad_id in seen:
            raise DyadError(f"duplicate parent dyad {p.dyad_id}")
        seen.add(p.dyad_id)
        pairs.append((child_by_dyad[p.dyad_id], p))
    unmatched = set(child_by_dyad) - seen
    if unmatched:
        raise DyadError(f"child dyads without parents: {sorted(unmatched)}")
    return sorted(pairs, key=lambda pair: pair[0].dyad_id)


def _compare(values_children: list[float], values_parents: list[float], pairing: str) -> TTestResult:
    if pairing == "independent":
        return welch_t_test(values_children, values_parents)
    if pairing == "by_dyad":
        return paired_t_test(values_children, values_parents)
    raise StatsError(f"unknown pairing {pairing!r}")


def compare_groups(
    children: Sequence[UTAUTResponse],
    parents: Sequence[UTAUTResponse],
    cmap: Optional[CategoryMap] = None,
    pairing: str = "independent",
) -> list[GroupComparison]:
    """Children-vs-parents t-test per category, in canonical category order."""
    cmap = cmap or CategoryMap.default()
    if not children or not parents:
        raise StatsError("both groups must be nonempty")
    if pairing == "by_dyad":
        pairs = _paired_by_dyad(children, parents)
        child_scores = score_utaut([c for c, _ in pairs], cmap)
        parent_scores = score_utaut([p for _, p in pairs], cmap)
    else:
        child_scores = score_utaut(children, cmap)
        parent_scores = score_utaut(parents, cmap)
    rows = []
    for cat in CATEGORY_ORDER:
        if cat not in cmap.categories:
            continue
        a = [s.scores[cat] for s in child_scores]
        b = [s.scores[cat] for s in parent_scores]
        rows.append(GroupComparison(item=cat, result=_compare(a, b, pairing)))
    return rows


def compare_questions(
    children: Sequence[UTAUTResponse],
    parents: Sequence[UTAUTResponse],
    questions: Sequence[int],
    cmap: Optional[CategoryMap] = None,
    pairing: str = "independent",
) -> list[GroupComparison]:
    """Children-vs-parents t-test on single-item scores."""
    cmap = cmap or CategoryMap.default()
    if not children or not parents:
        raise StatsError("both groups must be nonempty")
    if pairing == "by_dyad":
        pairs = _paired_by_dyad(children, parents)
        child_resps = [c for c, _ in pairs]
        parent_resps = [p for _, p in pairs]
    else:
        child_resps, parent_resps = list(children), list(parents)
    rows = []
    for q in questions:
        if not 1 <= q <= NUM_QUESTIONS:
            raise StatsError(f"question index {q} out of range")
        a = [r.answer(q, cmap) for r in child_resps]
        b = [r.answer(q, cmap) for r in parent_resps]
        rows.append(GroupComparison(item=f"Q{q}", result=_compare(a, b, pairing)))
    return rows


CSV_HEADER = ["respondent_id", "group", "dyad_id"] + [f"q{i}" for i in range(1, NUM_QUESTIONS + 1)]


def parse_responses_csv(text: str) -> list[UTAUTResponse]:
    """Read the documented responses CSV; errors name the bad respondent."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise StatsError("empty responses CSV")
    if [h.strip() for h in header] != CSV_HEADER:
        raise StatsError(f"bad CSV header; expected {','.join(CSV_HEADER)}")
    responses = []
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        rid = row[0].strip()
        if len(row) != len(CSV_HEADER):
            raise StatsError(f"respondent {rid or '?'}: expected {len(CSV_HEADER)} columns, got {len(row)}")
        try:
            answers = tuple(int(cell) for cell in row[3:])
        except ValueError:
            raise StatsError(f"respondent {rid}: non-integer answer")
        responses.append(
            UTAUTResponse(
                respondent_id=rid,
                group=row[1].strip(),
                dyad_id=row[2].strip() or None,
                answers=answers,
            )
        )
    return responses


def write_responses_csv(responses: Sequence[UTAUTResponse]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in responses:
        writer.writerow([r.respondent_id, r.group, r.dyad_id or ""] + list(r.answers))
    return buf.getvalue()
