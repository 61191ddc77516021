"""Datasets: resolution examples built from chain/split files and features.

One example per dialogue segment. Its candidates are every image displayed to
either player in the segment's round; each candidate carries its visual
feature vector and the utterances of strictly earlier segments in that
image's chain (its linguistic history). A candidate is a target iff the
segment discusses it.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

PAD, UNK, SEP = 0, 1, 2
SPECIALS = ("<pad>", "<unk>", "<sep>")

_TOKEN_RE = re.compile(r"[^\W_]+(?='t)|'t|[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower().replace("’", "'"))


@dataclass
class Vocabulary:
    token_to_id: dict[str, int]

    @classmethod
    def build(cls, texts: list[str], *, min_freq: int = 2) -> Vocabulary:
        counts: Counter[str] = Counter()
        for text in texts:
            counts.update(tokenize(text))
        token_to_id = {token: i for i, token in enumerate(SPECIALS)}
        for token, freq in sorted(counts.items()):
            if freq >= min_freq:
                token_to_id[token] = len(token_to_id)
        return cls(token_to_id)

    def __len__(self) -> int:
        return len(self.token_to_id)

    def encode(self, text: str) -> list[int]:
        return [self.token_to_id.get(t, UNK) for t in tokenize(text)]

    def encode_segments(self, texts_per_segment: list[list[str]]) -> list[int]:
        """Flatten prior segments into one id sequence with separators."""
        ids: list[int] = []
        for i, texts in enumerate(texts_per_segment):
            if i:
                ids.append(SEP)
            for text in texts:
                ids.extend(self.encode(text))
        return ids

    def to_doc(self) -> dict:
        return {"token_to_id": self.token_to_id}

    @classmethod
    def from_doc(cls, doc: dict) -> Vocabulary:
        return cls({str(k): int(v) for k, v in doc["token_to_id"].items()})


@dataclass
class Candidate:
    image_key: str  # "set:image"
    feature: np.ndarray
    history_ids: list[int]
    target: bool
    position: int  # 1-based mention index: prior chain segments + 1


@dataclass
class Example:
    segment_ids: list[int]
    candidates: list[Candidate]


@dataclass
class ResolutionData:
    train: list[Example]
    val: list[Example]
    test: list[Example]
    vocabulary: Vocabulary
    feature_dim: int

    def split(self, name: str) -> list[Example]:
        return {"train": self.train, "val": self.val, "test": self.test}[name]


def target_class_weight(n_non_targets: int, n_targets: int) -> float:
    """Loss weight for the (rare) target class: non-target/target ratio."""
    return n_non_targets / n_targets


def count_classes(examples: list[Example]) -> tuple[int, int]:
    targets = sum(1 for ex in examples for c in ex.candidates if c.target)
    non_targets = sum(1 for ex in examples for c in ex.candidates if not c.target)
    return targets, non_targets


# --- file loading -----------------------------------------------------------


def load_features(path: str | Path) -> dict[str, np.ndarray]:
    """npz mapping "set:image" -> float32 feature vector."""
    archive = np.load(path)
    return {key: np.asarray(archive[key], dtype=np.float32) for key in archive.files}


def save_features(path: str | Path, features: dict[str, np.ndarray]) -> None:
    np.savez(path, **{k: np.asarray(v, dtype=np.float32) for k, v in features.items()})


def synthetic_features(keys: list[str], dim: int, seed: int = 0) -> dict[str, np.ndarray]:
    """Random unit vectors, one per image key (for desk-scale runs)."""
    rng = np.random.default_rng(seed)
    out = {}
    for key in keys:
        v = rng.normal(size=dim).astype(np.float32)
        out[key] = v / np.linalg.norm(v)
    return out


def _segment_sort_key(segment: dict) -> tuple[int, int]:
    first_seq = segment["utterances"][0]["seq"] if segment["utterances"] else 0
    return (int(segment["round_index"]), first_seq)


def build_examples(
    chains_doc: dict,
    splits_doc: dict,
    features: dict[str, np.ndarray],
    *,
    vocabulary: Vocabulary | None = None,
    min_freq: int = 2,
) -> ResolutionData:
    """Assemble per-split example lists from the chain and split documents.

    A segment joins the split of its first target's chain. The vocabulary is
    built from training-split segment texts only (unless one is supplied).
    """
    segments = chains_doc["segments"]
    chains = chains_doc["chains"]
    games = chains_doc["games"]

    chain_split: dict[int, str] = {}
    for name, indices in splits_doc["splits"].items():
        for index in indices:
            chain_split[int(index)] = name

    # (game, image) -> ordered segment ids of its chain, and its split
    chain_by_image: dict[tuple[str, int], list[int]] = {}
    split_by_image: dict[tuple[str, int], str] = {}
    for index, chain in enumerate(chains):
        key = (chain["game_id"], int(chain["image_id"]))
        chain_by_image[key] = [int(i) for i in chain["segment_ids"]]
        split_by_image[key] = chain_split.get(index, "train")

    def segment_split(segment: dict) -> str:
        targets = sorted(int(t) for t in segment["targets"])
        return split_by_image.get((segment["game_id"], targets[0]), "train")

    if vocabulary is None:
        train_texts = [
            u["text"]
            for segment in segments
            if segment_split(segment) == "train"
            for u in segment["utterances"]
        ]
        vocabulary = Vocabulary.build(train_texts, min_freq=min_freq)

    feature_dim = len(next(iter(features.values()))) if features else 0
    zero_feature = np.zeros(feature_dim, dtype=np.float32)

    buckets: dict[str, list[Example]] = {"train": [], "val": [], "test": []}
    for segment in segments:
        game_id = segment["game_id"]
        game = games[game_id]
        set_id = int(game["set_id"])
        round_info = game["rounds"][str(segment["round_index"])]
        union = sorted(set(round_info["display_a"]) | set(round_info["display_b"]))
        seg_key = _segment_sort_key(segment)
        targets = {int(t) for t in segment["targets"]}

        candidates = []
        for image_id in union:
            image_key = f"{set_id}:{image_id}"
            chain_ids = chain_by_image.get((game_id, image_id), [])
            prior = [
                segments[i]
                for i in chain_ids
                if _segment_sort_key(segments[i]) < seg_key
            ]
            history_ids = vocabulary.encode_segments(
                [[u["text"] for u in p["utterances"]] for p in prior]
            )
            candidates.append(
                Candidate(
                    image_key=image_key,
                    feature=features.get(image_key, zero_feature),
                    history_ids=history_ids,
                    target=image_id in targets,
                    position=len(prior) + 1,
                )
            )
        example = Example(
            segment_ids=vocabulary.encode_segments(
                [[u["text"] for u in segment["utterances"]]]
            ),
            candidates=candidates,
        )
        buckets[segment_split(segment)].append(example)

    return ResolutionData(
        train=buckets["train"],
        val=buckets["val"],
        test=buckets["test"],
        vocabulary=vocabulary,
        feature_dim=feature_dim,
    )


def load_resolution_data(
    chains_path: str | Path,
    splits_path: str | Path,
    features_path: str | Path,
    *,
    min_freq: int = 2,
) -> ResolutionData:
    chains_doc = json.loads(Path(chains_path).read_text(encoding="utf-8"))
    splits_doc = json.loads(Path(splits_path).read_text(encoding="utf-8"))
    features = load_features(features_path)
    return build_examples(chains_doc, splits_doc, features, min_freq=min_freq)
