"""One live game: wire frames in, state transitions and outbound frames out.

``GameSession.handle`` is the routing core: it decodes a client frame into a
TurnEvent, applies it to the game state, appends it to the log, and returns
the frames to deliver. Rejected events produce an error frame for the sender
and leave both state and log untouched. All calls for one game must be
serialized by the owner (the app layer holds one lock per game).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from refgame.core.payment import compute_payment
from refgame.core.state import GameError, IllegalTransition, MessageTooLong, apply_event, new_game, score_game
from refgame.core.types import (
    DONE,
    FEEDBACK,
    PHASE_QUESTIONNAIRE,
    ROUND,
    WARMUP,
    GameSpec,
    GameState,
    ImageRecord,
    RoundSpec,
    TurnEvent,
)
from refgame.gameset.build import GameSetPair
from refgame.gameset.schema import canonical_warmup, shuffled_rounds
from refgame.logstore import LogStore, event_to_doc
from refgame.server import protocol
from refgame.server.protocol import ProtocolError

WARMUP_URIS = {i: f"warmup/{i}.jpg" for i in range(101, 106)}

ERROR_CODES = {
    MessageTooLong: "message_too_long",
    IllegalTransition: "illegal_transition",
}


@dataclass
class Player:
    role: str  # "A" | "B"
    worker_id: str
    pseudonym: str
    completed_game_index: int  # 1-based index of the game being played


Outbound = list[tuple[str, dict]]  # (role, frame) pairs


def build_session_spec(pair: GameSetPair, variant: int, *, game_id: str, session_seed: int, warmup: bool) -> GameSpec:
    base = pair.variant(variant)
    rounds, _ = shuffled_rounds(base.rounds, session_seed)
    return dataclasses.replace(
        base,
        game_id=game_id,
        rounds=rounds,
        warmup=canonical_warmup() if warmup else None,
        session_seed=session_seed,
    )


class GameSession:
    def __init__(
        self,
        game_id: str,
        pair: GameSetPair,
        variant: int,
        players: dict[str, Player],
        store: LogStore | None,
        *,
        session_seed: int,
        warmup: bool,
        clock,
    ):
        self.game_id = game_id
        self.pair = pair
        self.variant = variant
        self.players = players
        self.store = store
        self.clock = clock
        self.spec = build_session_spec(
            pair, variant, game_id=game_id, session_seed=session_seed, warmup=warmup
        )
        _, self.grids = shuffled_rounds(pair.variant(variant).rounds, session_seed)
        self.state: GameState = new_game(self.spec)
        self.closed = False
        self._uri_by_id = {img.image_id: img.display_uri for img in pair.images}
        self._uri_by_id.update(WARMUP_URIS)
        if store is not None:
            store.open_game(game_id, self._log_header())

    # -- log plumbing ------------------------------------------------------

    def _log_header(self) -> dict:
        def round_doc(rs: RoundSpec) -> dict:
            return {
                "round_index": rs.round_index,
                "display_a": list(rs.display_a),
                "display_b": list(rs.display_b),
                "highlights_a": list(rs.highlights_a),
                "highlights_b": list(rs.highlights_b),
            }

        rounds = []
        for position, rs in enumerate(self.spec.rounds, start=1):
            doc = round_doc(rs)
            doc["round_index"] = position  # presentation position
            doc["schedule_round"] = rs.round_index
            rounds.append(doc)
        return {
            "set_id": self.pair.set_id,
            "variant": self.variant,
            "participants": [self.players["A"].pseudonym, self.players["B"].pseudonym],
            "session_seed": self.spec.session_seed,
            "rounds": rounds,
            "warmup": round_doc(self.spec.warmup) if self.spec.warmup else None,
        }

    # -- frames ------------------------------------------------------------

    def start_frames(self) -> Outbound:
        out: Outbound = []
        for role, player in self.players.items():
            partner = self.players["B" if role == "A" else "A"]
            out.append(
                (
                    role,
                    protocol.frame_paired(
                        self.game_id, partner.pseudonym, role, self.spec.warmup is not None
                    ),
                )
            )
        out.extend(self._round_start_frames())
        return out

    def _round_start_frames(self) -> Outbound:
        phase = self.state.phase
        rs = self.state.current_round_spec()
        out: Outbound = []
        warmup = phase.kind == WARMUP
        for role in ("A", "B"):
            if warmup:
                grid = rs.display(role)
            else:
                grid = self.grids[(phase.round_index, role)]
            images = [{"image_id": i, "uri": self._uri_by_id.get(i, "")} for i in grid]
            out.append(
                (
                    role,
                    protocol.frame_round_start(
                        phase.round_index,
                        images,
                        list(rs.highlights(role)),
                        warmup=warmup,
                    ),
                )
            )
        return out

    def _feedback_frames(self) -> Outbound:
        k = self.state.phase.round_index
        out: Outbound = []
        for role in ("A", "B"):
            results = [
                {"image_id": c.image_id, "decision": c.decision, "correct": c.correct}
                for c in self.state.correctness
                if c.round_index == k and c.actor == role
            ]
            out.append((role, protocol.frame_feedback(results)))
        return out

    def _game_end_frames(self) -> Outbound:
        score = score_game(self.state)
        started, ended = self.state.started_ms(), self.state.ended_ms()
        duration_min = ((ended - started) / 60000.0) if started is not None and ended else 0.0
        out: Outbound = []
        for role, player in self.players.items():
            payment = compute_payment(duration_min, player.completed_game_index, True)
            out.append((role, protocol.frame_game_end(score, f"{payment:.2f}")))
        return out

    # -- event routing -------------------------------------------------------

    def handle(self, role: str, frame: dict) -> Outbound:
        """Route one already-parsed client frame; never raises for game errors."""
        if self.closed:
            return [(role, protocol.frame_error("game_over"))]
        try:
            event = self._to_event(role, frame)
        except ProtocolError as exc:
            return [(role, protocol.frame_error(exc.code, str(exc)))]
        phase_before = self.state.phase
        try:
            new_state = apply_event(self.state, event)
        except GameError as exc:
            code = ERROR_CODES.get(type(exc), "illegal_transition")
            return [(role, protocol.frame_error(code, str(exc)))]
        self.state = new_state
        if self.store is not None:
            self.store.append_event(
                self.game_id,
                event_to_doc(
                    event,
                    round_index=phase_before.round_index,
                    phase_kind=phase_before.kind,
                ),
            )
        return self._effects(role, frame, phase_before)

    def _to_event(self, role: str, frame: dict) -> TurnEvent:
        seq = self.state.last_seq + 1
        ts = self.clock()
        ftype = frame["type"]
        if ftype == "chat":
            return TurnEvent.message(seq, ts, role, frame["text"])
        if ftype == "label":
            decision = frame["decision"]
            if decision not in ("common", "different"):
                raise ProtocolError("bad_frame", f"unknown decision {decision!r}")
            return TurnEvent.label(seq, ts, role, frame["image_id"], decision)
        if ftype == "submit":
            return TurnEvent.submit(seq, ts, role)
        if ftype == "next_round":
            return TurnEvent.feedback_ack(seq, ts, role)
        if ftype == "questionnaire":
            return TurnEvent.questionnaire(
                seq, ts, role, (frame["q1"], frame["q2"], frame["q3"])
            )
        raise ProtocolError("bad_frame", f"frame type {ftype!r} not routable")

    def _effects(self, role: str, frame: dict, phase_before) -> Outbound:
        ftype = frame["type"]
        phase = self.state.phase
        out: Outbound = []
        if ftype == "chat":
            partner = "B" if role == "A" else "A"
            out.append((partner, protocol.frame_chat(frame["text"], role)))
        elif ftype == "submit" and phase.kind == FEEDBACK:
            out.extend(self._feedback_frames())
        elif ftype == "next_round" and phase != phase_before:
            if phase.kind == ROUND:
                out.append(("A", protocol.frame_next_round()))
                out.append(("B", protocol.frame_next_round()))
                out.extend(self._round_start_frames())
            elif phase.kind == PHASE_QUESTIONNAIRE:
                prompt = protocol.frame_questionnaire_prompt(protocol.QUESTIONNAIRE_STATEMENTS)
                out.extend([("A", prompt), ("B", prompt)])
        elif ftype == "questionnaire" and phase.kind == DONE:
            out.extend(self._game_end_frames())
            self._close(completed=True)
        return out

    def handle_disconnect(self, role: str) -> Outbound:
        """A participant dropped: abort the game and notify the partner."""
        if self.closed:
            return []
        event = TurnEvent.disconnect(self.state.last_seq + 1, self.clock(), role)
        phase_before = self.state.phase
        self.state = apply_event(self.state, event)
        if self.store is not None:
            self.store.append_event(
                self.game_id,
                event_to_doc(event, round_index=phase_before.round_index, phase_kind=phase_before.kind),
            )
        self._close(completed=False)
        partner = "B" if role == "A" else "A"
        return [(partner, protocol.frame_error("partner_disconnected"))]

    def _close(self, *, completed: bool) -> None:
        if self.closed:
            return
        self.closed = True
        if self.store is None:
            return
        started, ended = self.state.started_ms(), self.state.ended_ms()
        summary = {
            "completed": completed,
            "score": score_game(self.state) if not self.state.phase.live() else None,
            "duration_ms": (ended - started) if started is not None and ended is not None else None,
            "questionnaire": {
                q.actor: list(q.scores) for q in self.state.questionnaire
            },
            "correctness": [
                {
                    "round_index": c.round_index,
                    "actor": c.actor,
                    "image_id": c.image_id,
                    "decision": c.decision,
                    "correct": c.correct,
                }
                for c in self.state.correctness
            ],
            "round_times": {k: list(v) for k, v in self.state.round_times().items()},
        }
        self.store.close_game(self.game_id, summary)
