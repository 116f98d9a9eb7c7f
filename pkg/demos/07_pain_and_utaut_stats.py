"""The two clinical analyses on synthetic cohorts.

Pain protocol: 25 children rate injections 0..10 with and without the robot
(counterbalanced order); the paired t-test reads out the difference. UTAUT:
children and their parents answer the 43-item questionnaire; category means
are compared per group. Cohorts here are synthetic, built to *look like*
plausible response patterns; no published raw data is involved.
"""

import numpy as np

from maya.sessions import PainMode, counterbalance_assign
from maya.stats import (
    UTAUTResponse,
    compare_groups,
    compare_questions,
    pain_report,
    render_pain_report,
    render_utaut_report,
)


def main():
    rng = np.random.default_rng(8)

    order = counterbalance_assign(25, seed=8)
    counts = order.counts()
    print(f"counterbalancing: {counts[PainMode.A_NO_ROBOT]} children start without the "
          f"robot, {counts[PainMode.B_WITH_ROBOT]} with it\n")

    records = []
    for i in range(25):
        base = int(rng.integers(7, 11))          # injections hurt
        relief = int(rng.integers(2, 6))         # the robot distracts
        records.append((f"p{i:02d}", "A_no_robot", base))
        records.append((f"p{i:02d}", "B_with_robot", max(0, base - relief)))
    print(render_pain_report(pain_report(records)))

    children, parents = [], []
    for i in range(20):
        child = np.clip(rng.normal(4.4, 0.8, 43).round(), 1, 5).astype(int)
        parent = np.clip(rng.normal(4.0, 0.8, 43).round(), 1, 5).astype(int)
        for resp in (child, parent):
            resp[0:4] = np.clip(rng.normal(1.8, 0.7, 4).round(), 1, 5)  # low anxiety
        children.append(UTAUTResponse(f"c{i}", "child", tuple(int(v) for v in child),
                                      dyad_id=f"d{i}"))
        parents.append(UTAUTResponse(f"p{i}", "parent", tuple(int(v) for v in parent),
                                     dyad_id=f"d{i}"))

    print()
    print(render_utaut_report(compare_groups(children, parents)))
    print()
    print(render_utaut_report(
        compare_questions(children, parents, [6, 7, 26, 36, 42, 43]),
        title="Selected single questions",
    ))


if __name__ == "__main__":
    main()
