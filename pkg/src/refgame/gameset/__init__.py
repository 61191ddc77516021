"""Image-set construction and derivation of the two game variants per set."""

from refgame.gameset.build import (
    GameSetPair,
    InsufficientGroups,
    build_image_sets,
    derive_variants,
    load_gamesets,
    synthetic_image_sets,
    write_gamesets,
)
from refgame.gameset.filtering import (
    MIN_JOINT_AREA,
    AnnotationRecord,
    group_similar_images,
    read_annotations,
)
from refgame.gameset.schema import (
    DISPLAY_SCHEDULE,
    DISPLAY_SCHEDULE_AS_PUBLISHED,
    canonical_rounds,
    canonical_warmup,
    round_display_unions,
)

__all__ = [
    "AnnotationRecord",
    "DISPLAY_SCHEDULE",
    "DISPLAY_SCHEDULE_AS_PUBLISHED",
    "GameSetPair",
    "InsufficientGroups",
    "MIN_JOINT_AREA",
    "build_image_sets",
    "canonical_rounds",
    "canonical_warmup",
    "derive_variants",
    "group_similar_images",
    "load_gamesets",
    "read_annotations",
    "round_display_unions",
    "synthetic_image_sets",
    "write_gamesets",
]
