"""Sampling image sets from grouped candidates and deriving game variants."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from refgame.core.types import GameSpec, ImageRecord, ImageSet, RoundSpec
from refgame.gameset.filtering import AnnotationRecord
from refgame.gameset.schema import canonical_rounds

DEFAULT_SET_COUNT = 30
SET_SIZE = 12
MIN_GROUP_SIZE = 20


class InsufficientGroups(Exception):
    pass


@dataclass(frozen=True)
class GameSetPair:
    """One 12-image set together with its two complementary highlight variants."""

    set_id: int
    images: tuple[ImageRecord, ...]
    variant_1: GameSpec
    variant_2: GameSpec

    @property
    def category_pair(self) -> tuple[str, str]:
        return self.images[0].category_pair

    def variant(self, number: int) -> GameSpec:
        if number == 1:
            return self.variant_1
        if number == 2:
            return self.variant_2
        raise ValueError(f"variant must be 1 or 2, got {number}")


def build_image_sets(
    groups: dict[tuple[str, str], list[AnnotationRecord]],
    seed: int,
    *,
    set_count: int = DEFAULT_SET_COUNT,
    set_size: int = SET_SIZE,
    min_group_size: int = MIN_GROUP_SIZE,
) -> list[ImageSet]:
    """Sample ``set_size`` images from each of the ``set_count`` largest
    qualifying groups. Deterministic for a fixed seed.
    """
    qualifying = {pair: recs for pair, recs in groups.items() if len(recs) >= min_group_size}
    if len(qualifying) < set_count:
        raise InsufficientGroups(
            f"need {set_count} groups with >= {min_group_size} images, "
            f"found {len(qualifying)}"
        )
    chosen = sorted(qualifying.items(), key=lambda item: (-len(item[1]), item[0]))[:set_count]
    rng = random.Random(seed)
    sets: list[ImageSet] = []
    for set_id, (pair, recs) in enumerate(chosen, start=1):
        sample = rng.sample(sorted(recs, key=lambda r: r.source_id), set_size)
        images = tuple(
            ImageRecord(
                image_id=i,
                source_id=rec.source_id,
                category_pair=pair,
                display_uri=rec.display_uri(),
            )
            for i, rec in enumerate(sample, start=1)
        )
        sets.append(ImageSet(set_id=set_id, images=images))
    return sets


def derive_variants(image_set: ImageSet) -> GameSetPair:
    """Apply the fixed schedule to a 12-image set, yielding both variants."""
    ids = sorted(img.image_id for img in image_set.images)
    if ids != list(range(1, 13)):
        raise ValueError(f"set {image_set.set_id}: expected image ids 1-12, got {ids}")
    specs = {
        v: GameSpec(
            game_id=f"set{image_set.set_id:02d}_v{v}",
            set_id=image_set.set_id,
            variant=v,
            rounds=canonical_rounds(v),
        )
        for v in (1, 2)
    }
    return GameSetPair(
        set_id=image_set.set_id,
        images=image_set.images,
        variant_1=specs[1],
        variant_2=specs[2],
    )


def synthetic_image_sets(count: int, *, seed: int = 0) -> list[ImageSet]:
    """Placeholder sets (no real annotations) for simulations and servers."""
    rng = random.Random(seed)
    categories = [
        "person", "cat", "dog", "bus", "car", "pizza", "chair", "bear",
        "bike", "boat", "bird", "horse", "couch", "clock", "kite", "sheep",
    ]
    sets = []
    for set_id in range(1, count + 1):
        first, second = rng.sample(categories, 2)
        pair = tuple(sorted((first, second)))
        images = tuple(
            ImageRecord(
                image_id=i,
                source_id=f"s{set_id:03d}_{i:02d}",
                category_pair=pair,
                display_uri=f"images/s{set_id:03d}_{i:02d}.jpg",
            )
            for i in range(1, 13)
        )
        sets.append(ImageSet(set_id=set_id, images=images))
    return sets


# --- gamesets.json --------------------------------------------------------


def _round_to_doc(rs: RoundSpec) -> dict:
    return {
        "round_index": rs.round_index,
        "display_a": list(rs.display_a),
        "display_b": list(rs.display_b),
        "highlights_a": list(rs.highlights_a),
        "highlights_b": list(rs.highlights_b),
    }


def _round_from_doc(doc: dict) -> RoundSpec:
    return RoundSpec(
        round_index=int(doc["round_index"]),
        display_a=tuple(doc["display_a"]),
        display_b=tuple(doc["display_b"]),
        highlights_a=tuple(doc["highlights_a"]),
        highlights_b=tuple(doc["highlights_b"]),
    )


def write_gamesets(path: str | Path, pairs: list[GameSetPair], *, seed: int | None = None) -> None:
    doc = {
        "seed": seed,
        "sets": [
            {
                "set_id": pair.set_id,
                "category_pair": list(pair.category_pair),
                "images": [
                    {
                        "image_id": img.image_id,
                        "source_id": img.source_id,
                        "display_uri": img.display_uri,
                    }
                    for img in pair.images
                ],
                "variants": {
                    str(v): {
                        "game_id": pair.variant(v).game_id,
                        "rounds": [_round_to_doc(rs) for rs in pair.variant(v).rounds],
                    }
                    for v in (1, 2)
                },
            }
            for pair in pairs
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")


def load_gamesets(path: str | Path) -> list[GameSetPair]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    pairs = []
    for entry in doc["sets"]:
        set_id = int(entry["set_id"])
        pair = tuple(entry["category_pair"])
        images = tuple(
            ImageRecord(
                image_id=int(img["image_id"]),
                source_id=str(img["source_id"]),
                category_pair=pair,
                display_uri=str(img["display_uri"]),
            )
            for img in entry["images"]
        )
        specs = {}
        for v in (1, 2):
            vdoc = entry["variants"][str(v)]
            specs[v] = GameSpec(
                game_id=str(vdoc["game_id"]),
                set_id=set_id,
                variant=v,
                rounds=tuple(_round_from_doc(r) for r in vdoc["rounds"]),
            )
        pairs.append(
            GameSetPair(set_id=set_id, images=images, variant_1=specs[1], variant_2=specs[2])
        )
    return pairs
