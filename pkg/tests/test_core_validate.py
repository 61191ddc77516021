"""Spec validation against the canonical schedule and known-bad variants."""

from __future__ import annotations

import dataclasses
from fractions import Fraction

from refgame.core.types import GameSpec
from refgame.core.validate import highlight_rounds, mean_highlighted_rounds, validate_game_spec
from refgame.gameset.schema import (
    DISPLAY_SCHEDULE,
    HIGHLIGHT_GRID,
    SLOTS,
    canonical_rounds,
)


def canonical_pair() -> tuple[GameSpec, GameSpec]:
    return (
        GameSpec("v1", 1, 1, canonical_rounds(1)),
        GameSpec("v2", 1, 2, canonical_rounds(2)),
    )


def test_canonical_schedule_is_valid():
    v1, v2 = canonical_pair()
    assert validate_game_spec(v1, v2) == []
    assert validate_game_spec(v2, v1) == []
    assert validate_game_spec(v1) == []


def test_published_schedule_fails_with_slot_count_violations():
    v1 = GameSpec("p1", 1, 1, canonical_rounds(1, as_published=True))
    report = validate_game_spec(v1)
    assert "image 3 displayed 6 times" in report
    assert "image 10 displayed 4 times" in report
    # related violations of the duplicated round-3/B row
    assert "image 7 displayed 6 times" in report
    assert "image 4 displayed 4 times" in report
    assert "image 8 displayed 4 times" in report
    assert "image 11 displayed 6 times" in report


def test_wrong_highlight_cardinality_reported():
    v1, _ = canonical_pair()
    rounds = list(v1.rounds)
    rounds[0] = dataclasses.replace(rounds[0], highlights_a=(1, 3))
    spec = dataclasses.replace(v1, rounds=tuple(rounds))
    report = validate_game_spec(spec)
    assert "round 1 player A has 2 highlights, expected 3" in report


def test_cross_variant_coverage_violation_detected():
    v1, v2 = canonical_pair()
    rounds = list(v2.rounds)
    # Make variant 2 highlight an image variant 1 also highlights in round 1/A.
    overlap = v1.rounds[0].highlights_a[0]
    others = tuple(i for i in rounds[0].highlights_a if i != overlap)
    rounds[0] = dataclasses.replace(rounds[0], highlights_a=(overlap,) + others[:2])
    bad_v2 = dataclasses.replace(v2, rounds=tuple(rounds))
    report = validate_game_spec(v1, bad_v2)
    assert any("variant highlights overlap" in line for line in report)
    assert any("do not cover the display" in line for line in report)


def independent_slot_count_oracle() -> dict[int, int]:
    """Recount display slots straight off the schedule table."""
    counts: dict[int, int] = {}
    for _round_index, (display_a, display_b) in DISPLAY_SCHEDULE.items():
        for image_id in display_a:
            counts[image_id] = counts.get(image_id, 0) + 1
        for image_id in display_b:
            counts[image_id] = counts.get(image_id, 0) + 1
    return counts


def test_every_image_displayed_exactly_five_times():
    counts = independent_slot_count_oracle()
    assert set(counts) == set(range(1, 13))
    assert all(n == 5 for n in counts.values())


def test_highlight_grid_consistent_with_displays():
    # Occupied grid cells must be exactly the display slots, and each
    # (round, player, variant) must highlight exactly three images.
    for image_id, row in HIGHLIGHT_GRID.items():
        for (round_index, player), value in zip(SLOTS, row):
            display = DISPLAY_SCHEDULE[round_index][0 if player == "A" else 1]
            assert (value != 0) == (image_id in display), (image_id, round_index, player)
    for variant in (1, 2):
        for slot_pos, slot in enumerate(SLOTS):
            n = sum(1 for row in HIGHLIGHT_GRID.values() if row[slot_pos] == variant)
            assert n == 3, (variant, slot)
    # 30 highlight slots per variant in total
    for variant in (1, 2):
        total = sum(1 for row in HIGHLIGHT_GRID.values() for v in row if v == variant)
        assert total == 30


def test_highlighted_rounds_per_image_in_3_or_4():
    v1, v2 = canonical_pair()
    counts = highlight_rounds(v1, v2)
    assert set(counts) == set(range(1, 13))
    assert all(n in (3, 4) for n in counts.values())


def test_mean_highlighted_rounds_matches_slot_oracle():
    # Independent oracle: since the two variants partition every display slot,
    # an image's highlighted rounds are exactly the distinct rounds it is
    # displayed in; count those straight off the display table.
    distinct_rounds = {
        image_id: len(
            {
                k
                for k, (da, db) in DISPLAY_SCHEDULE.items()
                if image_id in da or image_id in db
            }
        )
        for image_id in range(1, 13)
    }
    expected = Fraction(sum(distinct_rounds.values()), 12)
    v1, v2 = canonical_pair()
    assert highlight_rounds(v1, v2) == distinct_rounds
    assert mean_highlighted_rounds(v1, v2) == expected
    assert expected == Fraction(43, 12)  # see decisions ledger: not 41/12
