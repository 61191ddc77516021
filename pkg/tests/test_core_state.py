"""State machine transitions, barriers, error cases and replay determinism."""

from __future__ import annotations

import random

import pytest

from refgame.core import (
    IllegalTransition,
    MessageTooLong,
    apply_event,
    new_game,
    replay,
    score_game,
    state_fingerprint,
)
from refgame.core.types import GameSpec, RoundSpec, TurnEvent
from refgame.gameset.schema import canonical_rounds, canonical_warmup


def spec_v1(warmup: bool = False) -> GameSpec:
    return GameSpec(
        game_id="t1",
        set_id=1,
        variant=1,
        rounds=canonical_rounds(1),
        warmup=canonical_warmup() if warmup else None,
    )


class EventFeeder:
    def __init__(self, state):
        self.state = state
        self.events = []
        self.ts = 1000

    def apply(self, maker, *args):
        self.ts += 100
        event = maker(self.state.last_seq + 1, self.ts, *args)
        self.state = apply_event(self.state, event)
        self.events.append(event)
        return self.state

    def try_apply(self, maker, *args):
        event = maker(self.state.last_seq + 1, self.ts + 1, *args)
        return apply_event(self.state, event)


def label_all_and_submit(feeder: EventFeeder, actor: str, decide=None):
    rs = feeder.state.current_round_spec()
    commons = rs.common_images()
    for image_id in rs.highlights(actor):
        decision = (
            decide(image_id)
            if decide
            else ("common" if image_id in commons else "different")
        )
        feeder.apply(TurnEvent.label, actor, image_id, decision)
    feeder.apply(TurnEvent.submit, actor)


def finish_round(feeder: EventFeeder):
    label_all_and_submit(feeder, "A")
    label_all_and_submit(feeder, "B")
    feeder.apply(TurnEvent.feedback_ack, "A")
    feeder.apply(TurnEvent.feedback_ack, "B")


def play_complete_game(warmup: bool = False) -> EventFeeder:
    feeder = EventFeeder(new_game(spec_v1(warmup)))
    if warmup:
        finish_round(feeder)
    for _ in range(5):
        finish_round(feeder)
    feeder.apply(TurnEvent.questionnaire, "A", (5, 4, 5))
    feeder.apply(TurnEvent.questionnaire, "B", (3, 3, 3))
    return feeder


def test_full_game_reaches_done_with_30_decisions():
    feeder = play_complete_game()
    assert feeder.state.phase.kind == "done"
    assert len(feeder.state.correctness) == 30
    assert score_game(feeder.state) == 30


def test_warmup_decisions_not_scored():
    feeder = play_complete_game(warmup=True)
    decisions = [c for c in feeder.state.correctness if c.round_index >= 1]
    assert len(decisions) == 30
    assert len(feeder.state.correctness) == 34  # +4 warming-up decisions
    assert score_game(feeder.state) == 30


def test_submit_is_a_barrier():
    feeder = EventFeeder(new_game(spec_v1()))
    label_all_and_submit(feeder, "A")
    assert feeder.state.phase.kind == "round"  # unchanged until B submits
    assert feeder.state.submitted == frozenset({"A"})
    label_all_and_submit(feeder, "B")
    assert feeder.state.phase.kind == "feedback"


def test_submit_requires_all_labels():
    feeder = EventFeeder(new_game(spec_v1()))
    rs = feeder.state.current_round_spec()
    feeder.apply(TurnEvent.label, "A", rs.highlights_a[0], "common")
    with pytest.raises(IllegalTransition):
        feeder.try_apply(TurnEvent.submit, "A")


def test_label_on_non_highlighted_image_rejected():
    feeder = EventFeeder(new_game(spec_v1()))
    rs = feeder.state.current_round_spec()
    outsider = next(i for i in rs.display_a if i not in rs.highlights_a)
    with pytest.raises(IllegalTransition):
        feeder.try_apply(TurnEvent.label, "A", outsider, "common")


def test_label_is_final_once_made():
    feeder = EventFeeder(new_game(spec_v1()))
    rs = feeder.state.current_round_spec()
    feeder.apply(TurnEvent.label, "A", rs.highlights_a[0], "common")
    with pytest.raises(IllegalTransition):
        feeder.try_apply(TurnEvent.label, "A", rs.highlights_a[0], "different")


def test_no_relabel_after_submit():
    feeder = EventFeeder(new_game(spec_v1()))
    label_all_and_submit(feeder, "A")
    rs = feeder.state.current_round_spec()
    with pytest.raises(IllegalTransition):
        feeder.try_apply(TurnEvent.label, "A", rs.highlights_a[0], "different")


def test_message_boundary_100_chars():
    feeder = EventFeeder(new_game(spec_v1()))
    feeder.apply(TurnEvent.message, "A", "x" * 100)  # boundary accepted
    before = feeder.state
    with pytest.raises(MessageTooLong):
        feeder.try_apply(TurnEvent.message, "A", "x" * 101)
    assert feeder.state == before  # rejection leaves state unchanged


def test_chat_allowed_on_feedback_screen():
    feeder = EventFeeder(new_game(spec_v1()))
    label_all_and_submit(feeder, "A")
    label_all_and_submit(feeder, "B")
    assert feeder.state.phase.kind == "feedback"
    feeder.apply(TurnEvent.message, "A", "oops, sorry about #3")
    assert feeder.state.transcript[-1].phase_kind == "feedback"


def test_common_different_correctness_rule():
    # B marks an image as different although it is in both displays.
    display_a = (340331, 2, 3, 4, 5, 6)
    display_b = (340331, 2, 3, 7, 8, 9)
    rounds = list(canonical_rounds(1))
    rounds[0] = RoundSpec(
        round_index=1,
        display_a=display_a,
        display_b=display_b,
        highlights_a=(340331, 2, 4),
        highlights_b=(340331, 2, 7),
    )
    spec = GameSpec("t2", 1, 1, tuple(rounds))
    feeder = EventFeeder(new_game(spec))
    label_all_and_submit(feeder, "A")
    label_all_and_submit(
        feeder, "B", decide=lambda i: "different" if i == 340331 else (
            "common" if i in (2,) else "different"
        )
    )
    record = next(
        c for c in feeder.state.correctness if c.actor == "B" and c.image_id == 340331
    )
    assert record.decision == "different"
    assert record.correct is False


def test_correctness_rule_symmetry_for_common_highlights():
    # If an image is highlighted for both players in the same round, both
    # "common" decisions are correct.
    feeder = EventFeeder(new_game(spec_v1()))
    rs = feeder.state.current_round_spec()
    both = set(rs.highlights_a) & set(rs.highlights_b)
    assert both, "canonical round 1 highlights at least one image for both"
    finish_round(feeder)
    for image_id in both:
        records = [c for c in feeder.state.correctness if c.image_id == image_id]
        assert len(records) == 2
        assert all(c.decision == "common" and c.correct for c in records)


def test_sequence_gap_rejected():
    state = new_game(spec_v1())
    with pytest.raises(IllegalTransition):
        apply_event(state, TurnEvent.message(2, 1000, "A", "hi"))


def test_unknown_actor_rejected():
    state = new_game(spec_v1())
    with pytest.raises(IllegalTransition):
        apply_event(state, TurnEvent.message(1, 1000, "C", "hi"))


def test_disconnect_aborts_and_scores_partial():
    feeder = EventFeeder(new_game(spec_v1()))
    finish_round(feeder)
    feeder.apply(TurnEvent.disconnect, "B")
    assert feeder.state.phase.kind == "aborted"
    assert score_game(feeder.state) == 6
    with pytest.raises(IllegalTransition):
        feeder.try_apply(TurnEvent.message, "A", "anyone there?")


def test_score_requires_finished_game():
    feeder = EventFeeder(new_game(spec_v1()))
    with pytest.raises(IllegalTransition):
        score_game(feeder.state)


def test_questionnaire_score_range_enforced():
    feeder = play_feeder_to_questionnaire()
    with pytest.raises(IllegalTransition):
        feeder.try_apply(TurnEvent.questionnaire, "A", (0, 3, 3))
    with pytest.raises(IllegalTransition):
        feeder.try_apply(TurnEvent.questionnaire, "A", (6, 3, 3))


def play_feeder_to_questionnaire() -> EventFeeder:
    feeder = EventFeeder(new_game(spec_v1()))
    for _ in range(5):
        finish_round(feeder)
    return feeder


def test_never_a_31st_decision():
    feeder = play_feeder_to_questionnaire()
    assert len(feeder.state.correctness) == 30
    # No phase accepts further labels.
    with pytest.raises(IllegalTransition):
        feeder.try_apply(TurnEvent.label, "A", 1, "common")


def test_replay_reproduces_state_bit_for_bit():
    feeder = play_complete_game(warmup=True)
    replayed = replay(feeder.state.spec, feeder.events)
    assert replayed == feeder.state
    assert state_fingerprint(replayed) == state_fingerprint(feeder.state)


def test_randomized_sequences_replay_deterministically():
    rng = random.Random(5)
    spec = spec_v1()
    for _ in range(25):
        feeder = EventFeeder(new_game(spec))
        # random legal walk with occasional finishes
        for _ in range(rng.randint(5, 60)):
            state = feeder.state
            options = []
            if state.phase.kind in ("warmup", "round", "feedback"):
                options.append(lambda: feeder.apply(TurnEvent.message, rng.choice("AB"), "m"))
            if state.phase.kind in ("warmup", "round"):
                rs = state.current_round_spec()
                for actor in "AB":
                    if actor in state.submitted:
                        continue
                    pending = [
                        i
                        for i in rs.highlights(actor)
                        if not any(
                            l.image_id == i
                            for l in state.labels_for(actor, state.phase.round_index)
                        )
                    ]
                    if pending:
                        options.append(
                            lambda a=actor, i=pending[0]: feeder.apply(
                                TurnEvent.label, a, i, rng.choice(["common", "different"])
                            )
                        )
                    else:
                        options.append(lambda a=actor: feeder.apply(TurnEvent.submit, a))
            elif state.phase.kind == "feedback":
                for actor in "AB":
                    if actor not in state.acked:
                        options.append(
                            lambda a=actor: feeder.apply(TurnEvent.feedback_ack, a)
                        )
            elif state.phase.kind == "questionnaire":
                for actor in "AB":
                    if not any(q.actor == actor for q in state.questionnaire):
                        options.append(
                            lambda a=actor: feeder.apply(
                                TurnEvent.questionnaire, a, (3, 3, 3)
                            )
                        )
            if not options:
                break
            rng.choice(options)()
        replayed = replay(spec, feeder.events)
        assert state_fingerprint(replayed) == state_fingerprint(feeder.state)
