"""Filtering and grouping of annotated images into similar-image pools."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

MIN_JOINT_AREA = 30_000  # px; images whose two largest objects cover less are rejected


@dataclass(frozen=True)
class AnnotationRecord:
    source_id: str
    width: int
    height: int
    color: bool
    objects: tuple[tuple[str, int], ...]  # (category, area in px)
    marked: bool = False
    uri: str | None = None

    @property
    def landscape(self) -> bool:
        return self.width > self.height

    def display_uri(self) -> str:
        return self.uri if self.uri is not None else f"{self.source_id}.jpg"


def read_annotations(path: str | Path) -> list[AnnotationRecord]:
    """Read one JSON object per line: {source_id, width, height, color, objects}."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                records.append(
                    AnnotationRecord(
                        source_id=str(obj["source_id"]),
                        width=int(obj["width"]),
                        height=int(obj["height"]),
                        color=bool(obj.get("color", True)),
                        objects=tuple(
                            (str(o["category"]), int(o["area"])) for o in obj["objects"]
                        ),
                        marked=bool(obj.get("marked", False)),
                        uri=obj.get("uri"),
                    )
                )
            except (KeyError, ValueError, TypeError) as exc:
                raise ValueError(f"{path}:{line_no}: bad annotation record: {exc}") from exc
    return records


def two_largest_objects(record: AnnotationRecord) -> tuple[tuple[str, int], tuple[str, int]] | None:
    if len(record.objects) < 2:
        return None
    ranked = sorted(record.objects, key=lambda o: (-o[1], o[0]))
    return ranked[0], ranked[1]


def category_pair(record: AnnotationRecord) -> tuple[str, str] | None:
    top = two_largest_objects(record)
    if top is None:
        return None
    (cat_a, _), (cat_b, _) = top
    first, second = sorted((cat_a, cat_b))
    return (first, second)


def group_similar_images(
    records: list[AnnotationRecord],
) -> dict[tuple[str, str], list[AnnotationRecord]]:
    """Group acceptable images by the unordered category pair of their two
    largest objects.

    Keeps only landscape, colour, unmarked images with at least two annotated
    objects whose two largest objects jointly cover ``MIN_JOINT_AREA`` pixels
    or more.
    """
    groups: dict[tuple[str, str], list[AnnotationRecord]] = {}
    for record in records:
        if not record.landscape or not record.color or record.marked:
            continue
        top = two_largest_objects(record)
        if top is None:
            continue
        if top[0][1] + top[1][1] < MIN_JOINT_AREA:
            continue
        pair = category_pair(record)
        assert pair is not None
        groups.setdefault(pair, []).append(record)
    return groups
