"""Precision/recall/F1 for both classes plus the per-chain-position breakdown."""

from __future__ import annotations

from dataclasses import dataclass, field

import torch

from refgame_resolver.data import Example
from refgame_resolver.model import CandidateScorer


def prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Percent precision/recall/F1 (0 where undefined)."""
    precision = 100.0 * tp / (tp + fp) if tp + fp else 0.0
    recall = 100.0 * tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    return precision, recall, f1


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int

    def to_doc(self) -> dict:
        return self.__dict__.copy()


@dataclass
class EvaluationReport:
    target: ClassMetrics
    non_target: ClassMetrics
    by_position: dict[int, ClassMetrics] = field(default_factory=dict)

    def weighted_f1(self) -> float:
        """F1 averaged over the two classes, weighted by class support."""
        total = self.target.support + self.non_target.support
        if not total:
            return 0.0
        return (
            self.target.f1 * self.target.support
            + self.non_target.f1 * self.non_target.support
        ) / total

    def to_doc(self) -> dict:
        return {
            "target": self.target.to_doc(),
            "non_target": self.non_target.to_doc(),
            "weighted_f1": self.weighted_f1(),
            "by_position": {str(k): v.to_doc() for k, v in sorted(self.by_position.items())},
        }


def evaluate(
    model: CandidateScorer, examples: list[Example], *, batch_size: int = 64
) -> EvaluationReport:
    """Score every candidate independently at the configured threshold.

    The breakdown buckets each candidate by its 1-based mention position
    (prior segments in its chain + 1); for targets this is the resolved
    segment's position within that image's chain.
    """
    threshold = model.config.threshold
    counts = {  # tp, fp, fn for the target class; tn tracked separately
        "tp": 0, "fp": 0, "fn": 0, "tn": 0,
    }
    by_position: dict[int, dict[str, int]] = {}
    model.eval()
    with torch.no_grad():
        for start in range(0, len(examples), batch_size):
            batch = examples[start : start + batch_size]
            logits, labels = model.logits(batch)
            predicted = torch.sigmoid(logits) > threshold
            flat = [c for ex in batch for c in ex.candidates]
            for candidate, pred, label in zip(flat, predicted.tolist(), labels.tolist()):
                bucket = by_position.setdefault(
                    candidate.position, {"tp": 0, "fp": 0, "fn": 0, "tn": 0}
                )
                key = (
                    "tp" if pred and label
                    else "fp" if pred
                    else "fn" if label
                    else "tn"
                )
                counts[key] += 1
                bucket[key] += 1

    def class_metrics(c: dict[str, int]) -> tuple[ClassMetrics, ClassMetrics]:
        p, r, f1 = prf(c["tp"], c["fp"], c["fn"])
        target = ClassMetrics(p, r, f1, support=c["tp"] + c["fn"])
        # non-target: positives are "not a referent" predictions
        p2, r2, f2 = prf(c["tn"], c["fn"], c["fp"])
        non_target = ClassMetrics(p2, r2, f2, support=c["tn"] + c["fp"])
        return target, non_target

    target, non_target = class_metrics(counts)
    return EvaluationReport(
        target=target,
        non_target=non_target,
        by_position={k: class_metrics(v)[0] for k, v in by_position.items()},
    )
