"""Corpus measurements: hand-computed oracles on synthetic fixtures."""

from __future__ import annotations

import numpy as np
import pytest

from refgame.analytics import (
    EmptyVectorFile,
    content_token_ratio,
    cosine_distance,
    description_comparison,
    load_word_vectors,
    novel_content_tokens,
    pos_shift,
    round_stats,
    utterance_vector,
)
from refgame.logstore import GameLog, RoundLog
from refgame.text import default_stopwords

STOPWORDS = default_stopwords()


def make_log(
    game_id: str,
    round_messages: list[list[str]],
    *,
    durations_s: list[float] | None = None,
    corrects: list[int] | None = None,
    completed: bool = True,
) -> GameLog:
    durations_s = durations_s or [60.0] * 5
    corrects = corrects if corrects is not None else [6] * 5
    rounds = []
    t0 = 1_700_000_000_000
    seq = 0
    for k in range(1, 6):
        events = []
        for text in round_messages[k - 1]:
            seq += 1
            events.append(
                {"seq": seq, "ts": t0 + seq, "actor": "A", "kind": "message",
                 "text": text, "phase": "round", "round_index": k}
            )
        correctness = [
            {"round_index": k, "actor": "A", "image_id": i, "decision": "common",
             "correct": i <= corrects[k - 1]}
            for i in range(1, 7)
        ]
        start = t0 + k * 1_000_000
        rounds.append(
            RoundLog(
                round_index=k,
                display_a=(1, 2, 3, 4, 5, 6),
                display_b=(1, 2, 3, 4, 7, 8),
                highlights_a=(1, 3, 5),
                highlights_b=(1, 3, 7),
                events=tuple(events),
                correctness=tuple(correctness),
                started_ms=start,
                ended_ms=start + int(durations_s[k - 1] * 1000),
            )
        )
    return GameLog(
        game_id=game_id,
        set_id=1,
        variant=1,
        participants=("P0001", "P0002"),
        rounds=tuple(rounds),
        completed=completed,
        duration_ms=sum(int(d * 1000) for d in durations_s),
        score=sum(corrects),
    )


class TestRoundStats:
    def test_hand_computed_single_game(self):
        # round 1: 180 s, two messages of 3 and 5 tokens, 4 correct
        log = make_log(
            "g1",
            [["one two three", "one two three four five"], [], [], [], []],
            durations_s=[180, 120, 90, 80, 75],
            corrects=[4, 5, 6, 6, 6],
        )
        stats = round_stats([log])
        r1 = stats[0]
        assert r1.mean_duration_s == pytest.approx(180.0)
        assert r1.mean_messages == pytest.approx(2.0)
        assert r1.mean_message_tokens == pytest.approx(4.0)
        assert r1.mean_correct_labels == pytest.approx(4.0)
        assert r1.points_per_minute == pytest.approx(4 / 3.0)
        assert stats[4].mean_duration_s == pytest.approx(75.0)

    def test_averages_over_two_games(self):
        a = make_log("g1", [[], [], [], [], []], durations_s=[100, 60, 60, 60, 60])
        b = make_log("g2", [[], [], [], [], []], durations_s=[200, 60, 60, 60, 60])
        stats = round_stats([a, b])
        assert stats[0].mean_duration_s == pytest.approx(150.0)
        assert stats[0].game_count == 2

    def test_single_game_average_equals_game_value(self):
        log = make_log("g1", [["hello there"], [], [], [], []])
        stats = round_stats([log])
        assert stats[0].mean_messages == 1.0

    def test_incomplete_games_excluded(self):
        done = make_log("g1", [[], [], [], [], []])
        aborted = make_log("g2", [[], [], [], [], []], completed=False)
        stats = round_stats([done, aborted])
        assert stats[0].game_count == 1

    def test_empty_corpus(self):
        stats = round_stats([])
        assert all(rs.game_count == 0 for rs in stats)
        assert all(rs.mean_duration_s == 0.0 for rs in stats)


class TestContentRatio:
    def test_direct_ratio(self):
        log = make_log("g1", [["the strange bike"], [], [], [], []])
        report = content_token_ratio([log], frozenset({"the"}))
        assert report.per_round_ratio[0] == pytest.approx(2 / 3)

    def test_all_stopword_round_has_zero_ratio(self):
        log = make_log("g1", [["the of and"], [], [], [], []])
        report = content_token_ratio([log], STOPWORDS)
        assert report.per_round_ratio[0] == 0.0

    def test_ratios_within_unit_interval(self):
        log = make_log("g1", [[f"word{k} the" ] for k in range(5)])
        report = content_token_ratio([log], STOPWORDS)
        assert all(0.0 <= r <= 1.0 for r in report.per_round_ratio)

    def test_perfect_linear_increase_gives_r_one(self):
        # token counts chosen so the content ratio rises linearly per round
        rounds = [
            ["the the the the word"],          # 1/5
            ["the the the word word"],          # 2/5
            ["the the word word word"],         # 3/5
            ["the word word word word"],        # 4/5
            ["word word word word word"],       # 5/5
        ]
        log = make_log("g1", rounds)
        report = content_token_ratio([log], frozenset({"the"}))
        assert report.mean_r == pytest.approx(1.0)

    def test_constant_profile_skipped(self):
        log = make_log("g1", [["word word"]] * 5)
        report = content_token_ratio([log], STOPWORDS)
        assert report.skipped_games == 1
        assert report.per_game_r == []


class TestNovelty:
    def test_repeated_token_counts(self):
        log = make_log("g1", [["bear"], ["bear"], ["bear"], ["bear"], ["bear"]])
        report = novel_content_tokens([log], STOPWORDS)
        assert report.mean_novel_counts == [1, 0, 0, 0, 0]

    def test_round1_novelty_is_full_content_count(self):
        log = make_log("g1", [["big bear big bear"], [], [], [], []])
        report = novel_content_tokens([log], STOPWORDS)
        assert report.mean_novel_counts[0] == 4  # occurrences, not types

    def test_two_game_mean(self):
        a = make_log("g1", [["bear"], [], [], [], []])
        b = make_log("g2", [["bear cat dog"], [], [], [], []])
        report = novel_content_tokens([a, b], STOPWORDS)
        assert report.mean_novel_counts[0] == pytest.approx(2.0)


class TestDescriptionComparison:
    def vectors(self):
        return {
            "cat": np.array([1.0, 0.0]),
            "dog": np.array([0.0, 1.0]),
            "pet": np.array([1.0, 1.0]),
        }

    def test_identical_utterance_and_caption_distance_zero(self):
        annotations = [{"image": 1, "captions": ["cat"], "first": ["cat"], "last": ["cat"]}]
        result = description_comparison(annotations, self.vectors(), frozenset())
        assert result.distance_first_to_captions == pytest.approx(0.0, abs=1e-12)
        assert result.distance_first_to_last == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_tokens_distance_one(self):
        annotations = [{"image": 1, "captions": ["cat"], "first": ["dog"], "last": []}]
        result = description_comparison(annotations, self.vectors(), frozenset())
        assert result.distance_first_to_captions == pytest.approx(1.0)

    def test_unknown_token_utterances_skipped_and_counted(self):
        annotations = [{"image": 1, "captions": ["cat"], "first": ["zebra"], "last": []}]
        result = description_comparison(annotations, self.vectors(), frozenset())
        assert result.skipped_utterances == 1

    def test_token_and_content_counts(self):
        annotations = [
            {"image": 1, "captions": ["the cat sat"], "first": ["a cat"], "last": ["cat"]}
        ]
        result = description_comparison(annotations, self.vectors(), frozenset({"the", "a"}))
        assert result.mean_tokens_captions == 3
        assert result.mean_content_captions == 2
        assert result.mean_tokens_first == 2
        assert result.mean_content_first == 1

    def test_load_word_vectors(self, tmp_path):
        path = tmp_path / "vectors.txt"
        path.write_text("cat 1.0 0.0\ndog 0.0 1.0\n", encoding="utf-8")
        vectors = load_word_vectors(str(path))
        assert set(vectors) == {"cat", "dog"}
        assert utterance_vector("cat dog", vectors) == pytest.approx([0.5, 0.5])

    def test_empty_vector_file(self, tmp_path):
        path = tmp_path / "empty.txt"
        path.write_text("", encoding="utf-8")
        with pytest.raises(EmptyVectorFile):
            load_word_vectors(str(path))

    def test_cosine_distance_range(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            u, v = rng.normal(size=4), rng.normal(size=4)
            assert 0.0 <= cosine_distance(u, v) <= 2.0


class TestPosShift:
    def tags(self, round_index, pairs):
        return {"game_id": "g", "round_index": round_index, "tags": pairs}

    def test_equal_shares_no_change(self):
        records = [
            self.tags(1, [["dog", "NN"], ["runs", "VBZ"]]),
            self.tags(5, [["cat", "NN"], ["sits", "VBZ"]]),
        ]
        shift = pos_shift(records)
        assert shift["noun"] == pytest.approx(0.0)
        assert shift["verb"] == pytest.approx(0.0)

    def test_doubled_noun_share_is_plus_100_percent(self):
        records = [
            self.tags(1, [["dog", "NN"], ["runs", "VBZ"], ["fast", "RB"], ["big", "JJ"]]),
            self.tags(5, [["dog", "NN"], ["cat", "NN"]]),
        ]
        shift = pos_shift(records)
        # noun share: 1/4 -> 2/2 = x4 -> +300%; use a cleaner doubling below
        assert shift["noun"] == pytest.approx((1.0 - 0.25) / 0.25)

    def test_untagged_tokens_fall_out_of_content_total(self):
        records = [
            self.tags(1, [["dog", "NN"], ["uh", "UH"]]),
            self.tags(5, [["dog", "NN"], ["uh", "UH"]]),
        ]
        shift = pos_shift(records)
        assert shift["noun"] == pytest.approx(0.0)

    def test_class_missing_from_round1_has_no_defined_change(self):
        records = [
            self.tags(1, [["dog", "NN"]]),
            self.tags(5, [["fast", "RB"]]),
        ]
        shift = pos_shift(records)
        assert shift["adverb"] is None
