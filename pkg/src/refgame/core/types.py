"""Value types for game specs, events and live game state.

Everything here is immutable: the state machine in :mod:`refgame.core.state`
produces new ``GameState`` values instead of mutating, so replaying an event
log always reproduces the exact same state.
"""

from __future__ import annotations

from dataclasses import dataclass, field

ACTORS = ("A", "B")
DECISIONS = ("common", "different")

ROUNDS_PER_GAME = 5
DISPLAY_SIZE = 6
HIGHLIGHTS_PER_PLAYER = 3
MAX_MESSAGE_CHARS = 100
DECISIONS_PER_GAME = 30  # 3 highlights x 2 players x 5 rounds

# Event kinds
MESSAGE = "message"
LABEL = "label"
SUBMIT = "submit"
FEEDBACK_ACK = "feedback_ack"
QUESTIONNAIRE = "questionnaire"
DISCONNECT = "disconnect"

EVENT_KINDS = (MESSAGE, LABEL, SUBMIT, FEEDBACK_ACK, QUESTIONNAIRE, DISCONNECT)

# Phase kinds
WARMUP = "warmup"
ROUND = "round"
FEEDBACK = "feedback"
PHASE_QUESTIONNAIRE = "questionnaire"
DONE = "done"
ABORTED = "aborted"


@dataclass(frozen=True)
class ImageRecord:
    """One image of a 12-image set; ``image_id`` is its 1-12 index within the set."""

    image_id: int
    source_id: str
    category_pair: tuple[str, str]
    display_uri: str


@dataclass(frozen=True)
class ImageSet:
    set_id: int
    images: tuple[ImageRecord, ...]

    def __post_init__(self) -> None:
        ids = [img.image_id for img in self.images]
        if len(set(ids)) != len(ids):
            raise ValueError(f"set {self.set_id}: duplicate image ids")
        pairs = {img.category_pair for img in self.images}
        if len(pairs) > 1:
            raise ValueError(f"set {self.set_id}: images span {len(pairs)} category pairs")

    def by_id(self, image_id: int) -> ImageRecord:
        for img in self.images:
            if img.image_id == image_id:
                return img
        raise KeyError(image_id)


@dataclass(frozen=True)
class RoundSpec:
    """Displays and highlight marks for one round.

    ``round_index`` 1-5 for regular rounds, 0 for the warming-up round
    (which uses 3 displayed / 2 highlighted images per player).
    """

    round_index: int
    display_a: tuple[int, ...]
    display_b: tuple[int, ...]
    highlights_a: tuple[int, ...]
    highlights_b: tuple[int, ...]

    def display(self, actor: str) -> tuple[int, ...]:
        return self.display_a if actor == "A" else self.display_b

    def highlights(self, actor: str) -> tuple[int, ...]:
        return self.highlights_a if actor == "A" else self.highlights_b

    def common_images(self) -> frozenset[int]:
        return frozenset(self.display_a) & frozenset(self.display_b)


@dataclass(frozen=True)
class GameSpec:
    """A full five-round assignment, optionally preceded by a warming-up round.

    ``rounds`` is stored in presentation order; each entry keeps its canonical
    ``round_index`` so shuffled sessions stay traceable to the schedule. The
    shuffle seed used for a session is recorded in ``session_seed``.
    """

    game_id: str
    set_id: int
    variant: int
    rounds: tuple[RoundSpec, ...]
    warmup: RoundSpec | None = None
    session_seed: int | None = None

    def round_at(self, position: int) -> RoundSpec:
        """Round spec for 1-based presentation position."""
        return self.rounds[position - 1]


@dataclass(frozen=True)
class LabelDecision:
    image_id: int
    decision: str  # "common" | "different"


@dataclass(frozen=True)
class TurnEvent:
    """One append-only log entry: a message, label action, submit, ack, etc."""

    seq: int
    timestamp_ms: int
    actor: str  # "A" | "B" | "system"
    kind: str
    payload: object = None

    @classmethod
    def message(cls, seq: int, ts: int, actor: str, text: str) -> TurnEvent:
        return cls(seq, ts, actor, MESSAGE, text)

    @classmethod
    def label(cls, seq: int, ts: int, actor: str, image_id: int, decision: str) -> TurnEvent:
        return cls(seq, ts, actor, LABEL, LabelDecision(image_id, decision))

    @classmethod
    def submit(cls, seq: int, ts: int, actor: str) -> TurnEvent:
        return cls(seq, ts, actor, SUBMIT)

    @classmethod
    def feedback_ack(cls, seq: int, ts: int, actor: str) -> TurnEvent:
        return cls(seq, ts, actor, FEEDBACK_ACK)

    @classmethod
    def questionnaire(cls, seq: int, ts: int, actor: str, scores: tuple[int, int, int]) -> TurnEvent:
        return cls(seq, ts, actor, QUESTIONNAIRE, tuple(scores))

    @classmethod
    def disconnect(cls, seq: int, ts: int, actor: str) -> TurnEvent:
        return cls(seq, ts, actor, DISCONNECT)


@dataclass(frozen=True)
class Phase:
    kind: str
    round_index: int = 0  # presentation position; 0 for the warming-up round

    def in_round(self) -> bool:
        return self.kind in (WARMUP, ROUND)

    def live(self) -> bool:
        return self.kind not in (DONE, ABORTED)


@dataclass(frozen=True)
class ChatLine:
    seq: int
    timestamp_ms: int
    actor: str
    text: str
    round_index: int
    phase_kind: str  # warmup | round | feedback


@dataclass(frozen=True)
class LabelRecord:
    seq: int
    timestamp_ms: int
    actor: str
    image_id: int
    decision: str
    round_index: int


@dataclass(frozen=True)
class CorrectnessRecord:
    round_index: int
    actor: str
    image_id: int
    decision: str
    correct: bool


@dataclass(frozen=True)
class QuestionnaireAnswer:
    actor: str
    scores: tuple[int, int, int]


@dataclass(frozen=True)
class PhaseStamp:
    """Timestamp of entering a phase; used for per-round durations."""

    kind: str
    round_index: int
    timestamp_ms: int


@dataclass(frozen=True)
class GameState:
    spec: GameSpec
    phase: Phase
    last_seq: int = 0
    transcript: tuple[ChatLine, ...] = ()
    labels: tuple[LabelRecord, ...] = ()
    submitted: frozenset[str] = frozenset()
    acked: frozenset[str] = frozenset()
    correctness: tuple[CorrectnessRecord, ...] = ()
    questionnaire: tuple[QuestionnaireAnswer, ...] = ()
    stamps: tuple[PhaseStamp, ...] = field(default=())

    def current_round_spec(self) -> RoundSpec:
        if self.phase.round_index == 0:
            if self.spec.warmup is None:
                raise ValueError("no warming-up round in this game")
            return self.spec.warmup
        return self.spec.round_at(self.phase.round_index)

    def labels_for(self, actor: str, round_index: int) -> tuple[LabelRecord, ...]:
        return tuple(
            r for r in self.labels if r.actor == actor and r.round_index == round_index
        )

    def round_labels(self, round_index: int) -> tuple[LabelRecord, ...]:
        return tuple(r for r in self.labels if r.round_index == round_index)

    def started_ms(self) -> int | None:
        return self.stamps[0].timestamp_ms if self.stamps else None

    def ended_ms(self) -> int | None:
        if self.phase.kind in (DONE, ABORTED) and self.stamps:
            return self.stamps[-1].timestamp_ms
        return None

    def round_times(self) -> dict[int, tuple[int, int]]:
        """Map round position -> (entered_ms, left_ms) for closed rounds."""
        entered: dict[int, int] = {}
        times: dict[int, tuple[int, int]] = {}
        for stamp in self.stamps:
            if stamp.kind in (WARMUP, ROUND):
                entered[stamp.round_index] = stamp.timestamp_ms
            elif stamp.kind == FEEDBACK and stamp.round_index in entered:
                times[stamp.round_index] = (entered[stamp.round_index], stamp.timestamp_ms)
        return times
