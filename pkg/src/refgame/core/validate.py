"""Structural validation of game specs.

Violations are reported as strings, never raised: a spec is valid iff the
report is empty. Cross-variant invariants (each image collecting exactly five
highlight slots over the two variants, the variants partitioning every
display) are checked when the sibling variant is passed as ``counterpart``.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction

from refgame.core.types import (
    ACTORS,
    DISPLAY_SIZE,
    HIGHLIGHTS_PER_PLAYER,
    ROUNDS_PER_GAME,
    GameSpec,
)

_PLAYER_NAMES = {"A": "A", "B": "B"}


def validate_game_spec(spec: GameSpec, counterpart: GameSpec | None = None) -> list[str]:
    report: list[str] = []
    rounds = spec.rounds
    if len(rounds) != ROUNDS_PER_GAME:
        report.append(f"expected {ROUNDS_PER_GAME} rounds, got {len(rounds)}")
    indices = [r.round_index for r in rounds]
    if sorted(indices) != sorted(set(indices)):
        report.append(f"duplicate round indices {indices}")

    display_slots: Counter[int] = Counter()
    for position, rs in enumerate(rounds, start=1):
        for player in ACTORS:
            display = rs.display(player)
            highlights = rs.highlights(player)
            if len(set(display)) != len(display):
                report.append(f"round {position} player {player} display contains duplicates")
            if len(display) != DISPLAY_SIZE:
                report.append(
                    f"round {position} player {player} has {len(display)} display images, "
                    f"expected {DISPLAY_SIZE}"
                )
            if len(highlights) != HIGHLIGHTS_PER_PLAYER:
                report.append(
                    f"round {position} player {player} has {len(highlights)} highlights, "
                    f"expected {HIGHLIGHTS_PER_PLAYER}"
                )
            for image_id in highlights:
                if image_id not in display:
                    report.append(
                        f"round {position} player {player} highlight image {image_id} "
                        f"not in display"
                    )
            display_slots.update(set(display))

    for image_id in sorted(display_slots):
        n = display_slots[image_id]
        if n != ROUNDS_PER_GAME:
            report.append(f"image {image_id} displayed {n} times")

    if counterpart is not None:
        report.extend(_validate_pair(spec, counterpart))
    return report


def _validate_pair(spec: GameSpec, counterpart: GameSpec) -> list[str]:
    report: list[str] = []
    if len(spec.rounds) != len(counterpart.rounds):
        return [f"variants have {len(spec.rounds)} vs {len(counterpart.rounds)} rounds"]

    highlight_slots: Counter[int] = Counter()
    for position, (r1, r2) in enumerate(zip(spec.rounds, counterpart.rounds), start=1):
        for player in ACTORS:
            if set(r1.display(player)) != set(r2.display(player)):
                report.append(f"variants differ in display for round {position} player {player}")
                continue
            h1, h2 = set(r1.highlights(player)), set(r2.highlights(player))
            if h1 & h2:
                report.append(
                    f"round {position} player {player}: variant highlights overlap "
                    f"on {sorted(h1 & h2)}"
                )
            if h1 | h2 != set(r1.display(player)):
                report.append(
                    f"round {position} player {player}: variant highlights do not cover "
                    f"the display"
                )
            highlight_slots.update(h1)
            highlight_slots.update(h2)

    for image_id in sorted(highlight_slots):
        n = highlight_slots[image_id]
        if n != ROUNDS_PER_GAME:
            report.append(
                f"image {image_id} has {n} highlight slots across variants, expected 5"
            )
    return report


def highlight_rounds(spec: GameSpec, counterpart: GameSpec | None = None) -> dict[int, int]:
    """Per image: number of distinct rounds in which it is highlighted.

    A round counts if the image is highlighted for either player in either
    variant (when ``counterpart`` is given).
    """
    rounds_by_image: dict[int, set[int]] = {}
    variants = (spec,) if counterpart is None else (spec, counterpart)
    for variant in variants:
        for position, rs in enumerate(variant.rounds, start=1):
            for player in ACTORS:
                for image_id in rs.highlights(player):
                    rounds_by_image.setdefault(image_id, set()).add(position)
    return {image_id: len(rounds) for image_id, rounds in sorted(rounds_by_image.items())}


def mean_highlighted_rounds(spec: GameSpec, counterpart: GameSpec | None = None) -> Fraction:
    counts = highlight_rounds(spec, counterpart)
    if not counts:
        return Fraction(0)
    return Fraction(sum(counts.values()), len(counts))
