"""The fixed display and highlight schedule shared by all game sets.

Twelve images, five rounds, six images per player per round. Every image is
displayed in exactly five (player, round) slots. The two game variants each
highlight three images per player per round and partition every display slot
between them, so each image also collects exactly five highlight slots across
the two variants.

``DISPLAY_SCHEDULE_AS_PUBLISHED`` keeps the known-bad variant of the schedule
in which round 3 / player B repeats round 2 / player B (leaving images 3, 7
and 11 displayed six times and images 4, 8 and 10 only four times). The
repaired round-3/B row is the unique six-image set that restores the
five-displays-per-image invariant, and it coincides with the occupied
round-3/B cells of the highlight grid.
"""

from __future__ import annotations

import random
from fractions import Fraction

from refgame.core.types import GameSpec, RoundSpec

PLAYERS = ("A", "B")

DISPLAY_SCHEDULE: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {
    1: ((1, 2, 3, 4, 5, 6), (1, 2, 3, 4, 7, 8)),
    2: ((1, 3, 6, 7, 9, 10), (2, 3, 6, 7, 9, 11)),
    3: ((4, 5, 7, 10, 11, 12), (2, 4, 6, 8, 9, 10)),
    4: ((1, 2, 5, 8, 11, 12), (1, 4, 5, 8, 10, 12)),
    5: ((5, 6, 8, 9, 11, 12), (3, 7, 9, 10, 11, 12)),
}

DISPLAY_SCHEDULE_AS_PUBLISHED: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] = {
    **DISPLAY_SCHEDULE,
    3: ((4, 5, 7, 10, 11, 12), (2, 3, 6, 7, 9, 11)),
}

# Highlight grid: one row per image (1-12), one column per (round, player) slot
# in the order 1A 1B 2A 2B 3A 3B 4A 4B 5A 5B. A cell value v in {1, 2} means
# variant v highlights that image in that slot; 0 means the slot does not
# display the image at all.
HIGHLIGHT_GRID: dict[int, tuple[int, ...]] = {
    1:  (1, 1, 1, 0, 0, 0, 1, 1, 0, 0),
    2:  (2, 2, 0, 2, 0, 2, 2, 0, 0, 0),
    3:  (1, 1, 1, 1, 0, 0, 0, 0, 0, 1),
    4:  (2, 2, 0, 0, 2, 1, 0, 2, 0, 0),
    5:  (1, 0, 0, 0, 1, 0, 1, 1, 1, 0),
    6:  (2, 0, 2, 2, 0, 2, 0, 0, 2, 0),
    7:  (0, 1, 1, 1, 1, 0, 0, 0, 0, 1),
    8:  (0, 2, 0, 0, 0, 1, 2, 1, 1, 0),
    9:  (0, 0, 2, 2, 0, 1, 0, 0, 2, 2),
    10: (0, 0, 2, 0, 2, 2, 0, 2, 0, 2),
    11: (0, 0, 0, 1, 1, 0, 1, 0, 1, 1),
    12: (0, 0, 0, 0, 2, 0, 2, 2, 2, 2),
}

SLOTS: tuple[tuple[int, str], ...] = tuple(
    (round_index, player) for round_index in range(1, 6) for player in PLAYERS
)


def highlight_sets(variant: int) -> dict[tuple[int, str], tuple[int, ...]]:
    """Map (round, player) -> highlighted image ids for one variant."""
    if variant not in (1, 2):
        raise ValueError(f"variant must be 1 or 2, got {variant}")
    out: dict[tuple[int, str], list[int]] = {slot: [] for slot in SLOTS}
    for image_id, row in HIGHLIGHT_GRID.items():
        for slot, value in zip(SLOTS, row):
            if value == variant:
                out[slot].append(image_id)
    return {slot: tuple(sorted(ids)) for slot, ids in out.items()}


def canonical_rounds(variant: int, *, as_published: bool = False) -> tuple[RoundSpec, ...]:
    """The five round specs of one variant, in canonical order."""
    schedule = DISPLAY_SCHEDULE_AS_PUBLISHED if as_published else DISPLAY_SCHEDULE
    highlights = highlight_sets(variant)
    return tuple(
        RoundSpec(
            round_index=k,
            display_a=schedule[k][0],
            display_b=schedule[k][1],
            highlights_a=highlights[(k, "A")],
            highlights_b=highlights[(k, "B")],
        )
        for k in range(1, 6)
    )


# Warming-up round for first-time players: three images each, two highlighted,
# drawn from a category disjoint from the regular sets (ids 101+ by convention).
WARMUP_IMAGE_IDS = (101, 102, 103, 104, 105)


def canonical_warmup() -> RoundSpec:
    return RoundSpec(
        round_index=0,
        display_a=(101, 102, 103),
        display_b=(101, 104, 105),
        highlights_a=(101, 102),
        highlights_b=(101, 104),
    )


def round_display_unions(
    schedule: dict[int, tuple[tuple[int, ...], tuple[int, ...]]] | None = None,
) -> dict[int, frozenset[int]]:
    """Per round: union of both players' displays (the resolution candidate pool)."""
    schedule = DISPLAY_SCHEDULE if schedule is None else schedule
    return {
        k: frozenset(display_a) | frozenset(display_b)
        for k, (display_a, display_b) in schedule.items()
    }


def highlight_rounds_per_image() -> dict[int, int]:
    """Distinct rounds in which each image is highlighted, over both variants."""
    out: dict[int, set[int]] = {}
    for image_id, row in HIGHLIGHT_GRID.items():
        out[image_id] = {
            slot[0] for slot, value in zip(SLOTS, row) if value != 0
        }
    return {image_id: len(rounds) for image_id, rounds in sorted(out.items())}


def mean_highlighted_rounds_schedule() -> Fraction:
    counts = highlight_rounds_per_image()
    return Fraction(sum(counts.values()), len(counts))


def shuffled_rounds(
    rounds: tuple[RoundSpec, ...], seed: int
) -> tuple[tuple[RoundSpec, ...], dict[tuple[int, str], tuple[int, ...]]]:
    """Randomised presentation: round order plus per-player grid order.

    Deterministic for a fixed seed so logged sessions stay replayable. The
    returned grid map is keyed by (presentation position, player) and holds
    the display ids of that round in on-screen order.
    """
    rng = random.Random(seed)
    order = list(rounds)
    rng.shuffle(order)
    grids: dict[tuple[int, str], tuple[int, ...]] = {}
    for position, rs in enumerate(order, start=1):
        for player in PLAYERS:
            grid = list(rs.display(player))
            rng.shuffle(grid)
            grids[(position, player)] = tuple(grid)
    return tuple(order), grids
