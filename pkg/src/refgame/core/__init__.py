"""Language-neutral game domain model: specs, state machine, scoring, payment."""

from refgame.core.payment import InvalidInput, compute_payment
from refgame.core.state import (
    GameError,
    IllegalTransition,
    MessageTooLong,
    apply_event,
    new_game,
    replay,
    score_game,
    state_fingerprint,
)
from refgame.core.types import (
    ACTORS,
    DECISIONS,
    GameSpec,
    GameState,
    ImageRecord,
    ImageSet,
    LabelDecision,
    Phase,
    RoundSpec,
    TurnEvent,
)
from refgame.core.validate import (
    highlight_rounds,
    mean_highlighted_rounds,
    validate_game_spec,
)

__all__ = [
    "ACTORS",
    "DECISIONS",
    "GameError",
    "GameSpec",
    "GameState",
    "IllegalTransition",
    "ImageRecord",
    "ImageSet",
    "InvalidInput",
    "LabelDecision",
    "MessageTooLong",
    "Phase",
    "RoundSpec",
    "TurnEvent",
    "apply_event",
    "compute_payment",
    "highlight_rounds",
    "mean_highlighted_rounds",
    "new_game",
    "replay",
    "score_game",
    "state_fingerprint",
    "validate_game_spec",
]
