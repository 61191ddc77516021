"""Pure state machine over :class:`TurnEvent` streams.

``apply_event`` is a pure transition: it either returns a new state or raises,
leaving the input untouched. Replaying the same events from ``new_game``
therefore reproduces the final state bit for bit.
"""

from __future__ import annotations

import dataclasses
import json

from refgame.core.types import (
    ABORTED,
    ACTORS,
    DECISIONS,
    DISCONNECT,
    DONE,
    FEEDBACK,
    FEEDBACK_ACK,
    LABEL,
    MAX_MESSAGE_CHARS,
    MESSAGE,
    PHASE_QUESTIONNAIRE,
    QUESTIONNAIRE,
    ROUND,
    ROUNDS_PER_GAME,
    SUBMIT,
    WARMUP,
    ChatLine,
    CorrectnessRecord,
    GameSpec,
    GameState,
    LabelDecision,
    LabelRecord,
    Phase,
    PhaseStamp,
    QuestionnaireAnswer,
    TurnEvent,
)


class GameError(Exception):
    """Base class for rejected events; state is guaranteed unchanged."""


class IllegalTransition(GameError):
    pass


class MessageTooLong(GameError):
    pass


def new_game(spec: GameSpec) -> GameState:
    phase = Phase(WARMUP, 0) if spec.warmup is not None else Phase(ROUND, 1)
    return GameState(spec=spec, phase=phase)


def apply_event(state: GameState, event: TurnEvent) -> GameState:
    if event.seq != state.last_seq + 1:
        raise IllegalTransition(
            f"expected seq {state.last_seq + 1}, got {event.seq}"
        )
    if not state.phase.live():
        raise IllegalTransition(f"game is {state.phase.kind}; no further events accepted")
    if event.kind == DISCONNECT:
        if event.actor not in ACTORS and event.actor != "system":
            raise IllegalTransition(f"unknown actor {event.actor!r}")
    elif event.actor not in ACTORS:
        raise IllegalTransition(f"actor {event.actor!r} is not a participant")

    # Lazily stamp the opening phase with the first event's clock.
    stamps = state.stamps
    if not stamps:
        stamps = (PhaseStamp(state.phase.kind, state.phase.round_index, event.timestamp_ms),)
        state = dataclasses.replace(state, stamps=stamps)

    handler = _HANDLERS.get(event.kind)
    if handler is None:
        raise IllegalTransition(f"unknown event kind {event.kind!r}")
    return handler(state, event)


def replay(spec: GameSpec, events) -> GameState:
    state = new_game(spec)
    for event in events:
        state = apply_event(state, event)
    return state


def score_game(state: GameState) -> int:
    """Completed-game score: one point per correct label decision.

    The warming-up round (round_index 0) never counts.
    """
    if state.phase.kind not in (DONE, ABORTED):
        raise IllegalTransition("score is defined only for done or aborted games")
    return sum(1 for c in state.correctness if c.round_index >= 1 and c.correct)


def state_fingerprint(state: GameState) -> str:
    """Canonical JSON snapshot, usable for byte-exact replay comparisons."""
    doc = {
        "game_id": state.spec.game_id,
        "phase": [state.phase.kind, state.phase.round_index],
        "last_seq": state.last_seq,
        "transcript": [dataclasses.astuple(line) for line in state.transcript],
        "labels": [dataclasses.astuple(rec) for rec in state.labels],
        "submitted": sorted(state.submitted),
        "acked": sorted(state.acked),
        "correctness": [dataclasses.astuple(rec) for rec in state.correctness],
        "questionnaire": [[q.actor, list(q.scores)] for q in state.questionnaire],
        "stamps": [dataclasses.astuple(s) for s in state.stamps],
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


# --- handlers -------------------------------------------------------------


def _handle_message(state: GameState, event: TurnEvent) -> GameState:
    if state.phase.kind not in (WARMUP, ROUND, FEEDBACK):
        raise IllegalTransition(f"no chat during {state.phase.kind}")
    text = event.payload
    if not isinstance(text, str):
        raise IllegalTransition("message payload must be text")
    if len(text) > MAX_MESSAGE_CHARS:
        raise MessageTooLong(f"{len(text)} characters exceeds the {MAX_MESSAGE_CHARS} limit")
    line = ChatLine(
        seq=event.seq,
        timestamp_ms=event.timestamp_ms,
        actor=event.actor,
        text=text,
        round_index=state.phase.round_index,
        phase_kind=state.phase.kind,
    )
    return dataclasses.replace(
        state, transcript=state.transcript + (line,), last_seq=event.seq
    )


def _handle_label(state: GameState, event: TurnEvent) -> GameState:
    if state.phase.kind not in (WARMUP, ROUND):
        raise IllegalTransition(f"label outside a round (phase {state.phase.kind})")
    payload = event.payload
    if not isinstance(payload, LabelDecision):
        raise IllegalTransition("label payload must be a LabelDecision")
    if payload.decision not in DECISIONS:
        raise IllegalTransition(f"unknown decision {payload.decision!r}")
    if event.actor in state.submitted:
        raise IllegalTransition("labels cannot be revised after submitting")
    spec = state.current_round_spec()
    if payload.image_id not in spec.highlights(event.actor):
        raise IllegalTransition(
            f"image {payload.image_id} is not highlighted for {event.actor}"
        )
    k = state.phase.round_index
    if any(
        r.image_id == payload.image_id
        for r in state.labels_for(event.actor, k)
    ):
        raise IllegalTransition(
            f"image {payload.image_id} already labelled by {event.actor}; selection is final"
        )
    rec = LabelRecord(
        seq=event.seq,
        timestamp_ms=event.timestamp_ms,
        actor=event.actor,
        image_id=payload.image_id,
        decision=payload.decision,
        round_index=k,
    )
    return dataclasses.replace(state, labels=state.labels + (rec,), last_seq=event.seq)


def _handle_submit(state: GameState, event: TurnEvent) -> GameState:
    if state.phase.kind not in (WARMUP, ROUND):
        raise IllegalTransition(f"submit outside a round (phase {state.phase.kind})")
    if event.actor in state.submitted:
        raise IllegalTransition(f"{event.actor} already submitted this round")
    spec = state.current_round_spec()
    k = state.phase.round_index
    needed = len(spec.highlights(event.actor))
    have = len(state.labels_for(event.actor, k))
    if have < needed:
        raise IllegalTransition(
            f"submit requires {needed} labels, {event.actor} has {have}"
        )
    submitted = state.submitted | {event.actor}
    state = dataclasses.replace(state, submitted=submitted, last_seq=event.seq)
    if submitted != frozenset(ACTORS):
        return state  # barrier: wait for the partner
    commons = spec.common_images()
    records = tuple(
        CorrectnessRecord(
            round_index=k,
            actor=r.actor,
            image_id=r.image_id,
            decision=r.decision,
            correct=(r.decision == "common") == (r.image_id in commons),
        )
        for r in sorted(state.round_labels(k), key=lambda r: r.seq)
    )
    phase = Phase(FEEDBACK, k)
    return dataclasses.replace(
        state,
        phase=phase,
        correctness=state.correctness + records,
        stamps=state.stamps + (PhaseStamp(FEEDBACK, k, event.timestamp_ms),),
    )


def _handle_feedback_ack(state: GameState, event: TurnEvent) -> GameState:
    if state.phase.kind != FEEDBACK:
        raise IllegalTransition(f"feedback ack outside feedback (phase {state.phase.kind})")
    if event.actor in state.acked:
        raise IllegalTransition(f"{event.actor} already acknowledged the feedback screen")
    acked = state.acked | {event.actor}
    state = dataclasses.replace(state, acked=acked, last_seq=event.seq)
    if acked != frozenset(ACTORS):
        return state
    k = state.phase.round_index
    if k < ROUNDS_PER_GAME:
        phase = Phase(ROUND, k + 1)
    else:
        phase = Phase(PHASE_QUESTIONNAIRE, 0)
    return dataclasses.replace(
        state,
        phase=phase,
        submitted=frozenset(),
        acked=frozenset(),
        stamps=state.stamps + (PhaseStamp(phase.kind, phase.round_index, event.timestamp_ms),),
    )


def _handle_questionnaire(state: GameState, event: TurnEvent) -> GameState:
    if state.phase.kind != PHASE_QUESTIONNAIRE:
        raise IllegalTransition(f"questionnaire outside the closing phase")
    scores = event.payload
    if (
        not isinstance(scores, tuple)
        or len(scores) != 3
        or not all(isinstance(s, int) and 1 <= s <= 5 for s in scores)
    ):
        raise IllegalTransition("questionnaire payload must be three 1-5 scores")
    if any(q.actor == event.actor for q in state.questionnaire):
        raise IllegalTransition(f"{event.actor} already answered the questionnaire")
    answers = state.questionnaire + (QuestionnaireAnswer(event.actor, scores),)
    state = dataclasses.replace(state, questionnaire=answers, last_seq=event.seq)
    if {q.actor for q in answers} != set(ACTORS):
        return state
    return dataclasses.replace(
        state,
        phase=Phase(DONE, 0),
        stamps=state.stamps + (PhaseStamp(DONE, 0, event.timestamp_ms),),
    )


def _handle_disconnect(state: GameState, event: TurnEvent) -> GameState:
    return dataclasses.replace(
        state,
        phase=Phase(ABORTED, 0),
        last_seq=event.seq,
        stamps=state.stamps + (PhaseStamp(ABORTED, 0, event.timestamp_ms),),
    )


_HANDLERS = {
    MESSAGE: _handle_message,
    LABEL: _handle_label,
    SUBMIT: _handle_submit,
    FEEDBACK_ACK: _handle_feedback_ack,
    QUESTIONNAIRE: _handle_questionnaire,
    DISCONNECT: _handle_disconnect,
}
