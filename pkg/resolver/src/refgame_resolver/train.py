"""Training loop: Adam, class-weighted BCE, early stop on validation loss,
checkpoint selection by support-weighted F1."""

from __future__ import annotations

import copy
import random
from dataclasses import dataclass, field

import torch
from torch import nn

from refgame_resolver.data import Example, ResolutionData
from refgame_resolver.evaluate import EvaluationReport, evaluate
from refgame_resolver.model import CandidateScorer, ModelConfig


class DataError(ValueError):
    pass


@dataclass
class TrainReport:
    epochs_run: int
    best_epoch: int
    best_weighted_f1: float
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    final_val: EvaluationReport | None = None

    def to_doc(self) -> dict:
        return {
            "epochs_run": self.epochs_run,
            "best_epoch": self.best_epoch,
            "best_weighted_f1": self.best_weighted_f1,
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "final_val": self.final_val.to_doc() if self.final_val else None,
        }


def batch_loss(
    model: CandidateScorer, batch: list[Example], criterion: nn.Module
) -> torch.Tensor:
    logits, labels = model.logits(batch)
    return criterion(logits, labels)


def epoch_loss(
    model: CandidateScorer, examples: list[Example], criterion: nn.Module, batch_size: int
) -> float:
    model.eval()
    total, n = 0.0, 0
    with torch.no_grad():
        for start in range(0, len(examples), batch_size):
            batch = examples[start : start + batch_size]
            total += batch_loss(model, batch, criterion).item() * len(batch)
            n += len(batch)
    return total / n if n else 0.0


def train(
    data: ResolutionData,
    config: ModelConfig,
    seed: int,
    *,
    max_epochs: int = 100,
    patience: int = 5,
) -> tuple[CandidateScorer, TrainReport]:
    """Fit one condition; returns the best-checkpoint model and a report.

    Early-stops once the validation loss has not improved for ``patience``
    epochs; the returned parameters are those of the epoch with the best
    support-weighted mean of target and non-target F1 on validation.
    """
    if not data.train:
        raise DataError("empty training set")
    if not data.val:
        raise DataError("empty validation set")

    torch.manual_seed(seed)
    rng = random.Random(seed)
    model = CandidateScorer(len(data.vocabulary), data.feature_dim, config)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    criterion = nn.BCEWithLogitsLoss(pos_weight=torch.tensor(config.positive_weight))

    report = TrainReport(epochs_run=0, best_epoch=0, best_weighted_f1=-1.0)
    best_state = copy.deepcopy(model.state_dict())
    best_val_loss = float("inf")
    stale = 0

    order = list(range(len(data.train)))
    for epoch in range(1, max_epochs + 1):
        rng.shuffle(order)
        model.train()
        running, seen = 0.0, 0
        for start in range(0, len(order), config.batch_size):
            batch = [data.train[i] for i in order[start : start + config.batch_size]]
            optimizer.zero_grad()
            loss = batch_loss(model, batch, criterion)
            loss.backward()
            optimizer.step()
            running += loss.item() * len(batch)
            seen += len(batch)
        report.train_loss.append(running / seen)

        val_loss = epoch_loss(model, data.val, criterion, config.batch_size)
        report.val_loss.append(val_loss)
        val_report = evaluate(model, data.val, batch_size=config.batch_size)
        weighted = val_report.weighted_f1()
        report.epochs_run = epoch
        if weighted > report.best_weighted_f1:
            report.best_weighted_f1 = weighted
            report.best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())
        if val_loss < best_val_loss - 1e-6:
            best_val_loss = val_loss
            stale = 0
        else:
            stale += 1
            if stale >= patience:
                break

    model.load_state_dict(best_state)
    report.final_val = evaluate(model, data.val, batch_size=config.batch_size)
    return model, report


def save_model(path, model: CandidateScorer, vocabulary) -> None:
    torch.save(
        {
            "state_dict": model.state_dict(),
            "config": model.config.__dict__,
            "feature_dim": model.feature_dim,
            "vocabulary": vocabulary.to_doc(),
        },
        path,
    )


def load_model(path) -> tuple[CandidateScorer, "Vocabulary"]:
    from refgame_resolver.data import Vocabulary

    bundle = torch.load(path, weights_only=False)
    vocabulary = Vocabulary.from_doc(bundle["vocabulary"])
    config = ModelConfig(**bundle["config"])
    model = CandidateScorer(len(vocabulary), bundle["feature_dim"], config)
    model.load_state_dict(bundle["state_dict"])
    return model, vocabulary
