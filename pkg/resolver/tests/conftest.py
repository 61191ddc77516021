"""Synthetic resolution datasets for desk-scale tests (features are arbitrary)."""

from __future__ import annotations

import numpy as np

from refgame_resolver.data import (
    Candidate,
    Example,
    ResolutionData,
    Vocabulary,
)


def make_vocabulary(tokens: list[str]) -> Vocabulary:
    return Vocabulary.build([" ".join(tokens)] * 2, min_freq=2)


def random_example(
    rng: np.random.Generator,
    vocabulary: Vocabulary,
    *,
    n_candidates: int = 4,
    n_targets: int = 1,
    feature_dim: int = 8,
    seg_len: int = 3,
    with_history: bool = False,
) -> Example:
    words = [t for t in vocabulary.token_to_id if not t.startswith("<")]
    segment = " ".join(rng.choice(words, size=seg_len))
    target_slots = rng.choice(n_candidates, size=n_targets, replace=False)
    candidates = []
    for i in range(n_candidates):
        history: list[int] = []
        if with_history and rng.random() < 0.5:
            history = vocabulary.encode(" ".join(rng.choice(words, size=2)))
        feature = rng.normal(size=feature_dim).astype(np.float32)
        feature /= np.linalg.norm(feature)
        candidates.append(
            Candidate(
                image_key=f"1:{i + 1}",
                feature=feature,
                history_ids=history,
                target=i in target_slots,
                position=len(history) + 1 if history else 1,
            )
        )
    return Example(segment_ids=vocabulary.encode(segment), candidates=candidates)


def random_dataset(
    seed: int,
    *,
    n_train: int = 32,
    n_val: int = 8,
    feature_dim: int = 8,
    with_history: bool = False,
) -> ResolutionData:
    rng = np.random.default_rng(seed)
    vocabulary = make_vocabulary([f"w{i}" for i in range(30)])
    make = lambda: random_example(
        rng, vocabulary, feature_dim=feature_dim, with_history=with_history
    )
    return ResolutionData(
        train=[make() for _ in range(n_train)],
        val=[make() for _ in range(n_val)],
        test=[make() for _ in range(n_val)],
        vocabulary=vocabulary,
        feature_dim=feature_dim,
    )
