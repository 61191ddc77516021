"""History vs no-history on a corpus of pure anaphora.

Every game discusses one image five times. The first mention names it; later
mentions are the constant phrase "same one again", resolvable only through
the candidate's accumulated history (the target is the only candidate with
any). Test images never occur in training, so visual features carry no usable
signal either way; the history condition must beat the blind one on recall
at mention positions greater than one.
"""

from __future__ import annotations

import numpy as np
import pytest

from refgame_resolver.data import (
    Candidate,
    Example,
    ResolutionData,
    Vocabulary,
)
from refgame_resolver.evaluate import evaluate
from refgame_resolver.model import ModelConfig
from refgame_resolver.train import train

FEATURE_DIM = 4
POSITIONS = 5
CANDIDATES = 6


def image_name(index: int) -> str:
    return f"img{index:03d}"


def build_vocabulary(n_images: int) -> Vocabulary:
    text = " ".join(["same", "one", "again"] + [image_name(i) for i in range(n_images)])
    return Vocabulary.build([text, text], min_freq=2)


def anaphora_games(
    vocabulary: Vocabulary,
    image_ids: list[int],
    games_per_image: int,
    rng: np.random.Generator,
) -> list[Example]:
    """Each game: one target discussed at positions 1..5 among 5 distractors."""
    feature = np.zeros(FEATURE_DIM, dtype=np.float32)  # visually uninformative
    examples = []
    for target in image_ids:
        for _ in range(games_per_image):
            distractors = rng.choice(
                [i for i in image_ids if i != target], size=CANDIDATES - 1, replace=False
            )
            history_texts: list[list[str]] = []
            for position in range(1, POSITIONS + 1):
                text = image_name(target) if position == 1 else "same one again"
                candidates = [
                    Candidate(
                        image_key=f"1:{target}",
                        feature=feature,
                        history_ids=vocabulary.encode_segments(history_texts),
                        target=True,
                        position=position,
                    )
                ]
                for d in distractors:
                    candidates.append(
                        Candidate(
                            image_key=f"1:{d}",
                            feature=feature,
                            history_ids=[],
                            target=False,
                            position=1,
                        )
                    )
                examples.append(
                    Example(segment_ids=vocabulary.encode(text), candidates=candidates)
                )
                history_texts.append([text])
    return examples


def build_corpus(seed: int = 0) -> ResolutionData:
    rng = np.random.default_rng(seed)
    vocabulary = build_vocabulary(40)
    train_images = list(range(0, 20))
    val_images = list(range(20, 30))
    test_images = list(range(30, 40))
    return ResolutionData(
        train=anaphora_games(vocabulary, train_images, 2, rng),
        val=anaphora_games(vocabulary, val_images, 1, rng),
        test=anaphora_games(vocabulary, test_images, 1, rng),
        vocabulary=vocabulary,
        feature_dim=FEATURE_DIM,
    )


def config(condition: str) -> ModelConfig:
    return ModelConfig(
        embedding_dim=32,
        hidden_dim=32,
        batch_size=25,
        learning_rate=0.01,
        positive_weight=1.0,  # keep the indifferent blind model below threshold
        condition=condition,
    )


@pytest.mark.slow
def test_history_recall_beats_no_history_at_later_positions():
    data = build_corpus()
    reports = {}
    for condition in ("no_history", "history"):
        model, _report = train(
            data, config(condition), seed=13, max_epochs=60, patience=60
        )
        reports[condition] = evaluate(model, data.test)

    history = reports["history"].by_position
    blind = reports["no_history"].by_position
    for position in range(2, POSITIONS + 1):
        assert history[position].recall > blind[position].recall, (
            f"position {position}: history {history[position].recall} "
            f"must strictly exceed no-history {blind[position].recall}"
        )
    # and the gap is substantial, not a knife-edge artefact
    later = range(2, POSITIONS + 1)
    mean_history = sum(history[p].recall for p in later) / len(list(later))
    mean_blind = sum(blind[p].recall for p in later) / 4
    assert mean_history - mean_blind > 30.0
