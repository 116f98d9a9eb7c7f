"""Statistics for the two clinical protocols: t-tests, UTAUT scoring, reports."""

from .ttests import TTestResult, paired_t_test, t_cdf, welch_t_test
from .utaut import (
    CATEGORY_ORDER,
    QUESTION_TEXTS,
    CategoryMap,
    CategoryScores,
    GroupComparison,
    UTAUTResponse,
    compare_groups,
    compare_questions,
    parse_responses_csv,
    score_utaut,
    write_responses_csv,
)
from .reports import (
    PainReport,
    format_mean,
    format_p,
    pain_report,
    render_category_row,
    render_pain_report,
    render_utaut_report,
    utaut_report_csv,
)

__all__ = [
    "CATEGORY_ORDER",
    "CategoryMap",
    "CategoryScores",
    "GroupComparison",
    "PainReport",
    "QUESTION_TEXTS",
    "TTestResult",
    "UTAUTResponse",
    "compare_groups",
    "compare_questions",
    "format_mean",
    "format_p",
    "pain_report",
    "paired_t_test",
    "parse_responses_csv",
    "render_category_row",
    "render_pain_report",
    "render_utaut_report",
    "score_utaut",
    "t_cdf",
    "utaut_report_csv",
    "welch_t_test",
    "write_responses_csv",
]
