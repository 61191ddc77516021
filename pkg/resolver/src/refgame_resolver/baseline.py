"""Random prediction baseline: label every candidate positive with p = 0.5."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from refgame_resolver.evaluate import prf


@dataclass
class BaselineReport:
    precision: float
    recall: float
    f1: float
    runs: int
    degenerate: bool = False  # no targets: precision/recall undefined, reported 0

    def to_doc(self) -> dict:
        return self.__dict__.copy()


def random_baseline(
    n_targets: int, n_non_targets: int, *, runs: int = 10, seed: int = 0, p: float = 0.5
) -> BaselineReport:
    """Average target-class metrics over random labelings of the test items.

    Runs in which a metric is undefined (nothing predicted at all) are left
    out of that metric's mean; with realistic counts this never triggers.
    """
    if n_targets == 0:
        return BaselineReport(0.0, 0.0, 0.0, runs=runs, degenerate=True)
    rng = np.random.default_rng(seed)
    precisions, recalls, f1s = [], [], []
    for _ in range(runs):
        tp = rng.binomial(n_targets, p)
        fn = n_targets - tp
        fp = rng.binomial(n_non_targets, p)
        precision, recall, f1 = prf(tp, fp, fn)
        if tp + fp > 0:
            precisions.append(precision)
            f1s.append(f1)
        recalls.append(recall)
    return BaselineReport(
        float(np.mean(precisions)) if precisions else 0.0,
        float(np.mean(recalls)),
        float(np.mean(f1s)) if f1s else 0.0,
        runs=runs,
    )
