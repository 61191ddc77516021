"""Corpus measurements over closed game logs.

All operations are pure functions of the corpus plus configuration (stopword
list, word-vector file), invariant to game order. "Completed games only" is
enforced here, not by callers.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

import numpy as np

from refgame.logstore import GameLog
from refgame.text import content_tokens, tokenize

ROUNDS = (1, 2, 3, 4, 5)


@dataclass
class RoundStats:
    round_index: int
    game_count: int
    mean_duration_s: float
    mean_messages: float
    mean_message_tokens: float
    mean_correct_labels: float
    points_per_minute: float

    def to_doc(self) -> dict:
        return self.__dict__.copy()


def _completed(logs: list[GameLog]) -> list[GameLog]:
    return [log for log in logs if log.completed]


def _round_messages(log: GameLog, position: int) -> list[str]:
    round_log = log.rounds[position - 1]
    return [
        e["text"]
        for e in round_log.events
        if e["kind"] == "message" and e.get("phase") == "round"
    ]


def round_stats(logs: list[GameLog]) -> list[RoundStats]:
    """Per-round aggregates over completed games (means of per-game values)."""
    logs = _completed(logs)
    out = []
    for k in ROUNDS:
        durations, messages, tokens_per_msg, corrects, ppm = [], [], [], [], []
        for log in logs:
            round_log = log.rounds[k - 1]
            if round_log.started_ms is not None and round_log.ended_ms is not None:
                seconds = (round_log.ended_ms - round_log.started_ms) / 1000.0
                durations.append(seconds)
            else:
                seconds = None
            msgs = _round_messages(log, k)
            messages.append(len(msgs))
            if msgs:
                tokens_per_msg.append(
                    sum(len(tokenize(m)) for m in msgs) / len(msgs)
                )
            correct = sum(1 for c in round_log.correctness if c["correct"])
            corrects.append(correct)
            if seconds:
                ppm.append(correct / (seconds / 60.0))
        out.append(
            RoundStats(
                round_index=k,
                game_count=len(logs),
                mean_duration_s=statistics.fmean(durations) if durations else 0.0,
                mean_messages=statistics.fmean(messages) if messages else 0.0,
                mean_message_tokens=statistics.fmean(tokens_per_msg) if tokens_per_msg else 0.0,
                mean_correct_labels=statistics.fmean(corrects) if corrects else 0.0,
                points_per_minute=statistics.fmean(ppm) if ppm else 0.0,
            )
        )
    return out


@dataclass
class ContentRatioReport:
    per_round_ratio: list[float]  # content tokens / all tokens, pooled per round
    per_game_r: list[float]  # Pearson r of (round, ratio) per game
    mean_r: float
    skipped_games: int  # constant or empty profiles have no defined r

    def to_doc(self) -> dict:
        return {
            "per_round_ratio": self.per_round_ratio,
            "mean_r": self.mean_r,
            "per_game_r": self.per_game_r,
            "skipped_games": self.skipped_games,
        }


def content_token_ratio(logs: list[GameLog], stopwords: frozenset[str]) -> ContentRatioReport:
    logs = _completed(logs)
    pooled_content = [0] * 5
    pooled_total = [0] * 5
    per_game_r: list[float] = []
    skipped = 0
    for log in logs:
        xs, ys = [], []
        for k in ROUNDS:
            tokens: list[str] = []
            for text in _round_messages(log, k):
                tokens.extend(tokenize(text))
            content = content_tokens(tokens, stopwords)
            pooled_content[k - 1] += len(content)
            pooled_total[k - 1] += len(tokens)
            if tokens:
                xs.append(k)
                ys.append(len(content) / len(tokens))
        try:
            per_game_r.append(statistics.correlation(xs, ys))
        except statistics.StatisticsError:
            skipped += 1
    ratios = [
        (pooled_content[i] / pooled_total[i] if pooled_total[i] else 0.0) for i in range(5)
    ]
    return ContentRatioReport(
        per_round_ratio=ratios,
        per_game_r=per_game_r,
        mean_r=statistics.fmean(per_game_r) if per_game_r else 0.0,
        skipped_games=skipped,
    )


@dataclass
class NoveltyReport:
    mean_novel_counts: list[float]  # new content-token occurrences per round
    mean_novel_ratio: list[float]  # new / all content tokens per round

    def to_doc(self) -> dict:
        return self.__dict__.copy()


def novel_content_tokens(logs: list[GameLog], stopwords: frozenset[str]) -> NoveltyReport:
    """Content tokens unseen in earlier rounds of the same game.

    Counted at the occurrence level, so round 1 novelty equals its full
    content-token count. Per-game vectors are averaged across games.
    """
    logs = _completed(logs)
    count_vectors: list[list[int]] = []
    ratio_vectors: list[list[float]] = []
    for log in logs:
        seen: set[str] = set()
        counts, ratios = [], []
        for k in ROUNDS:
            tokens: list[str] = []
            for text in _round_messages(log, k):
                tokens.extend(tokenize(text))
            content = content_tokens(tokens, stopwords)
            novel = sum(1 for t in content if t not in seen)
            counts.append(novel)
            ratios.append(novel / len(content) if content else 0.0)
            seen.update(content)
        count_vectors.append(counts)
        ratio_vectors.append(ratios)
    if not count_vectors:
        return NoveltyReport(mean_novel_counts=[0.0] * 5, mean_novel_ratio=[0.0] * 5)
    return NoveltyReport(
        mean_novel_counts=[statistics.fmean(col) for col in zip(*count_vectors)],
        mean_novel_ratio=[statistics.fmean(col) for col in zip(*ratio_vectors)],
    )


# --- description comparison --------------------------------------------------


class EmptyVectorFile(ValueError):
    pass


def load_word_vectors(path: str) -> dict[str, np.ndarray]:
    """Text format: one token per line followed by its vector components."""
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.rstrip("\n").split()
            if len(parts) < 2:
                continue
            vectors[parts[0]] = np.asarray([float(x) for x in parts[1:]], dtype=np.float64)
    if not vectors:
        raise EmptyVectorFile(path)
    return vectors


def utterance_vector(text: str, vectors: dict[str, np.ndarray]) -> np.ndarray | None:
    found = [vectors[t] for t in tokenize(text) if t in vectors]
    if not found:
        return None
    return np.mean(found, axis=0)


def cosine_distance(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 1.0
    return float(1.0 - np.dot(u, v) / (nu * nv))


@dataclass
class DescriptionComparison:
    mean_tokens_captions: float
    mean_tokens_first: float
    mean_tokens_last: float
    mean_content_captions: float
    mean_content_first: float
    mean_content_last: float
    distance_first_to_captions: float
    distance_last_to_captions: float
    distance_first_to_last: float
    skipped_utterances: int  # no known tokens in the vector file

    def to_doc(self) -> dict:
        return self.__dict__.copy()


def description_comparison(
    annotations: list[dict],
    vectors: dict[str, np.ndarray],
    stopwords: frozenset[str],
) -> DescriptionComparison:
    """Compare annotated first/last referring expressions with image captions.

    ``annotations``: [{"image": id, "captions": [str], "first": [str],
    "last": [str]}], first/last aligned per game. Caption reference point is
    the cluster mean of the caption vectors; distances are cosine distances.
    """
    tok_counts = {"captions": [], "first": [], "last": []}
    content_counts = {"captions": [], "first": [], "last": []}
    dist_first, dist_last, dist_fl = [], [], []
    skipped = 0
    for item in annotations:
        captions = item["captions"]
        for text in captions:
            tokens = tokenize(text)
            tok_counts["captions"].append(len(tokens))
            content_counts["captions"].append(len(content_tokens(tokens, stopwords)))
        caption_vecs = [v for v in (utterance_vector(c, vectors) for c in captions) if v is not None]
        cluster_mean = np.mean(caption_vecs, axis=0) if caption_vecs else None
        for role, sink in (("first", dist_first), ("last", dist_last)):
            for text in item.get(role, []):
                tokens = tokenize(text)
                tok_counts[role].append(len(tokens))
                content_counts[role].append(len(content_tokens(tokens, stopwords)))
                vec = utterance_vector(text, vectors)
                if vec is None:
                    skipped += 1
                elif cluster_mean is not None:
                    sink.append(cosine_distance(vec, cluster_mean))
        for first, last in zip(item.get("first", []), item.get("last", [])):
            u, v = utterance_vector(first, vectors), utterance_vector(last, vectors)
            if u is not None and v is not None:
                dist_fl.append(cosine_distance(u, v))

    def mean(values: list[float]) -> float:
        return statistics.fmean(values) if values else 0.0

    return DescriptionComparison(
        mean_tokens_captions=mean(tok_counts["captions"]),
        mean_tokens_first=mean(tok_counts["first"]),
        mean_tokens_last=mean(tok_counts["last"]),
        mean_content_captions=mean(content_counts["captions"]),
        mean_content_first=mean(content_counts["first"]),
        mean_content_last=mean(content_counts["last"]),
        distance_first_to_captions=mean(dist_first),
        distance_last_to_captions=mean(dist_last),
        distance_first_to_last=mean(dist_fl),
        skipped_utterances=skipped,
    )


# --- word-class shift ---------------------------------------------------------

CONTENT_CLASSES = ("noun", "adjective", "adverb", "verb")

_TAG_PREFIXES = (
    ("NN", "noun"),
    ("JJ", "adjective"),
    ("RB", "adverb"),
    ("VB", "verb"),
)


def word_class(tag: str) -> str:
    for prefix, name in _TAG_PREFIXES:
        if tag.upper().startswith(prefix):
            return name
    return "other"


def pos_shift(tag_records: list[dict]) -> dict[str, float | None]:
    """Relative change of each content class's share between rounds 1 and 5.

    ``tag_records``: [{"game_id", "round_index", "tags": [[token, tag], ...]}]
    from an external tagger run. Untagged/other tokens are excluded from the
    content total. A class absent from round 1 has no defined change (None).
    """
    shares: dict[int, dict[str, int]] = {1: {}, 5: {}}
    for record in tag_records:
        k = int(record["round_index"])
        if k not in shares:
            continue
        for _token, tag in record["tags"]:
            name = word_class(str(tag))
            if name in CONTENT_CLASSES:
                shares[k][name] = shares[k].get(name, 0) + 1
    out: dict[str, float | None] = {}
    for name in CONTENT_CLASSES:
        total_1 = sum(shares[1].values())
        total_5 = sum(shares[5].values())
        if not total_1 or not total_5 or not shares[1].get(name):
            out[name] = None
            continue
        share_1 = shares[1][name] / total_1
        share_5 = shares[5].get(name, 0) / total_5
        out[name] = (share_5 - share_1) / share_1
    return out


# --- report ------------------------------------------------------------------


def corpus_report(
    logs: list[GameLog],
    stopwords: frozenset[str],
    *,
    vectors: dict[str, np.ndarray] | None = None,
    annotations: list[dict] | None = None,
    tag_records: list[dict] | None = None,
) -> dict:
    report: dict = {
        "games": len(logs),
        "completed_games": len(_completed(logs)),
        "round_stats": [rs.to_doc() for rs in round_stats(logs)],
        "content_ratio": content_token_ratio(logs, stopwords).to_doc(),
        "novelty": novel_content_tokens(logs, stopwords).to_doc(),
    }
    if vectors is not None and annotations is not None:
        report["description_comparison"] = description_comparison(
            annotations, vectors, stopwords
        ).to_doc()
    if tag_records is not None:
        report["pos_shift"] = pos_shift(tag_records)
    return report
