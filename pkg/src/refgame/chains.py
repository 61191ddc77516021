"""Dialogue segmentation, reference chains, chain statistics and data splits.

A dialogue segment is a run of consecutive utterances that, as a whole,
discusses one or more target images; label actions delimit segments. The
segmenter is a single left-to-right pass with the following policy:

* an utterance joins the currently open segment;
* a label action closes the open segment and adds its image to the segment's
  target set;
* a label arriving while the open segment is empty (consecutive labels, or a
  label with no discussion at all) attaches its image to the previous segment
  of the same round (multi-target segments); with no previous segment it is
  dropped and counted in diagnostics;
* confirmation pattern: after participant X labels image i, a single message
  by participant Y immediately followed by Y labelling the same image i as
  *common* does not form (or close) a segment of its own — the message seeds
  the next segment and the second label is absorbed, since i is already a
  target of the saved segment;
* a round boundary discards any trailing open utterances (counted in
  diagnostics); segments never cross rounds;
* feedback-screen chatter never reaches the segmenter.

No lexical filtering is applied anywhere (greetings stay in).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

from refgame.logstore import GameLog


@dataclass(frozen=True)
class Utterance:
    actor: str
    text: str
    seq: int


@dataclass(frozen=True)
class Segment:
    game_id: str
    round_index: int
    utterances: tuple[Utterance, ...]
    target_ids: frozenset[int]

    @property
    def first_seq(self) -> int:
        return self.utterances[0].seq

    def position_key(self) -> tuple[int, int]:
        return (self.round_index, self.first_seq)


@dataclass(frozen=True)
class ReferenceChain:
    game_id: str
    set_id: int
    target_image_id: int
    segments: tuple[Segment, ...]

    @property
    def length(self) -> int:
        return len(self.segments)


@dataclass
class SegmentationDiagnostics:
    rounds: int = 0
    dropped_labels: int = 0
    trailing_buffers: int = 0
    trailing_utterances: int = 0

    def to_doc(self) -> dict:
        return {
            "rounds": self.rounds,
            "dropped_labels": self.dropped_labels,
            "trailing_buffers": self.trailing_buffers,
            "trailing_utterances": self.trailing_utterances,
        }


class _SegmentBuilder:
    __slots__ = ("utterances", "targets")

    def __init__(self, utterances: list[Utterance]):
        self.utterances = utterances
        self.targets: set[int] = set()


def segment_round(
    events: list[dict],
    *,
    game_id: str = "",
    round_index: int = 0,
    diagnostics: SegmentationDiagnostics | None = None,
) -> list[Segment]:
    """Segment the message/label events of a single round.

    ``events`` must be ordered by seq and contain only kinds ``message`` and
    ``label`` (round phase only). Degenerate inputs yield no segments.
    """
    diagnostics = diagnostics if diagnostics is not None else SegmentationDiagnostics()
    diagnostics.rounds += 1

    builders: list[_SegmentBuilder] = []
    open_utts: list[Utterance] = []
    opening_label: dict | None = None  # label event right before the open run started
    prev_event: dict | None = None

    for event in events:
        kind = event["kind"]
        if kind == "message":
            if not open_utts:
                opening_label = prev_event if prev_event and prev_event["kind"] == "label" else None
            open_utts.append(
                Utterance(actor=event["actor"], text=event["text"], seq=int(event["seq"]))
            )
        elif kind == "label":
            image_id = int(event["image_id"])
            if _is_confirmation(event, open_utts, opening_label, builders):
                pass  # trailing message stays open; the target is already saved
            elif open_utts:
                builder = _SegmentBuilder(open_utts)
                builder.targets.add(image_id)
                builders.append(builder)
                open_utts = []
            elif builders:
                builders[-1].targets.add(image_id)
            else:
                diagnostics.dropped_labels += 1
        else:
            raise ValueError(f"segmenter got event kind {kind!r}")
        prev_event = event

    if open_utts:
        diagnostics.trailing_buffers += 1
        diagnostics.trailing_utterances += len(open_utts)

    return [
        Segment(
            game_id=game_id,
            round_index=round_index,
            utterances=tuple(b.utterances),
            target_ids=frozenset(b.targets),
        )
        for b in builders
    ]


def _is_confirmation(
    label_event: dict,
    open_utts: list[Utterance],
    opening_label: dict | None,
    builders: list[_SegmentBuilder],
) -> bool:
    """The one decision-tree case spelt out in full: X labels i, Y sends one
    message and labels the same i as common."""
    return (
        len(open_utts) == 1
        and opening_label is not None
        and open_utts[0].actor == label_event["actor"]
        and opening_label["actor"] != label_event["actor"]
        and int(opening_label["image_id"]) == int(label_event["image_id"])
        and label_event["decision"] == "common"
        and bool(builders)
        and int(label_event["image_id"]) in builders[-1].targets
    )


def round_segment_events(round_events: tuple[dict, ...]) -> list[dict]:
    """Keep only what the segmenter consumes: round-phase messages and labels."""
    out = []
    for event in round_events:
        if event["kind"] == "label":
            out.append(event)
        elif event["kind"] == "message" and event.get("phase") in ("round", "warmup"):
            out.append(event)
    return out


def segment_game(
    log: GameLog, diagnostics: SegmentationDiagnostics | None = None
) -> list[Segment]:
    """Segments of the five regular rounds of one game (warming-up excluded)."""
    segments: list[Segment] = []
    for position, round_log in enumerate(log.rounds, start=1):
        events = round_segment_events(round_log.events)
        segments.extend(
            segment_round(
                events,
                game_id=log.game_id,
                round_index=position,
                diagnostics=diagnostics,
            )
        )
    return segments


def build_chains(segments: list[Segment], set_ids: dict[str, int]) -> list[ReferenceChain]:
    """One chain per (game, target image) with at least one segment.

    A segment with k targets appears in k chains. Invariant to the order in
    which games appear in the input.
    """
    grouped: dict[tuple[str, int], list[Segment]] = {}
    for segment in segments:
        for image_id in segment.target_ids:
            grouped.setdefault((segment.game_id, image_id), []).append(segment)
    chains = []
    for (game_id, image_id), members in grouped.items():
        members.sort(key=lambda s: s.position_key())
        chains.append(
            ReferenceChain(
                game_id=game_id,
                set_id=set_ids.get(game_id, 0),
                target_image_id=image_id,
                segments=tuple(members),
            )
        )
    chains.sort(key=lambda c: (c.game_id, c.target_image_id))
    return chains


def extract_chains(
    logs: list[GameLog],
) -> tuple[list[Segment], list[ReferenceChain], SegmentationDiagnostics]:
    diagnostics = SegmentationDiagnostics()
    segments: list[Segment] = []
    for log in logs:
        segments.extend(segment_game(log, diagnostics))
    set_ids = {log.game_id: log.set_id for log in logs}
    return segments, build_chains(segments, set_ids), diagnostics


# --- statistics -------------------------------------------------------------


@dataclass
class ChainStats:
    n_segments: int
    n_chains: int
    target_count_fractions: dict[str, float]  # "1" | "2" | "3+"
    chain_length_hist: dict[int, int]
    fraction_length_3_to_6: float

    def to_doc(self) -> dict:
        return {
            "n_segments": self.n_segments,
            "n_chains": self.n_chains,
            "target_count_fractions": self.target_count_fractions,
            "chain_length_hist": {str(k): v for k, v in sorted(self.chain_length_hist.items())},
            "fraction_length_3_to_6": self.fraction_length_3_to_6,
        }


def chain_statistics(chains: list[ReferenceChain], segments: list[Segment]) -> ChainStats:
    by_targets = {"1": 0, "2": 0, "3+": 0}
    for segment in segments:
        n = len(segment.target_ids)
        key = "1" if n == 1 else "2" if n == 2 else "3+"
        by_targets[key] += 1
    total = len(segments)
    fractions = {
        key: (count / total if total else 0.0) for key, count in by_targets.items()
    }
    hist: dict[int, int] = {}
    for chain in chains:
        hist[chain.length] = hist.get(chain.length, 0) + 1
    mid = sum(count for length, count in hist.items() if 3 <= length <= 6)
    return ChainStats(
        n_segments=total,
        n_chains=len(chains),
        target_count_fractions=fractions,
        chain_length_hist=hist,
        fraction_length_3_to_6=(mid / len(chains) if chains else 0.0),
    )


# --- splits -----------------------------------------------------------------


class FractionMismatch(ValueError):
    pass


SPLIT_NAMES = ("train", "val", "test")


@dataclass
class SplitAssignment:
    by_chain: list[str]  # split name per chain index
    fractions: tuple[float, float, float]
    seed: int

    def indices(self, split: str) -> list[int]:
        return [i for i, name in enumerate(self.by_chain) if name == split]

    def counts(self) -> dict[str, int]:
        return {name: self.by_chain.count(name) for name in SPLIT_NAMES}


def split_chains(
    chains: list[ReferenceChain],
    fractions: tuple[float, float, float] = (0.70, 0.15, 0.15),
    seed: int = 0,
    categories: dict[int, tuple[str, str]] | None = None,
) -> SplitAssignment:
    """Assign chains to train/val/test, grouped by target image and stratified
    by image domain.

    All chains of one (set, image) share a split. Strata are the images'
    category pairs when ``categories`` maps set ids to pairs, otherwise the
    set id itself (set ids and category pairs are one-to-one). Deterministic
    per seed.
    """
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise FractionMismatch(f"fractions sum to {sum(fractions)}, expected 1")

    image_groups: dict[tuple[int, int], list[int]] = {}
    for i, chain in enumerate(chains):
        image_groups.setdefault((chain.set_id, chain.target_image_id), []).append(i)

    strata: dict[object, list[tuple[int, int]]] = {}
    for key in image_groups:
        set_id = key[0]
        stratum = categories.get(set_id, set_id) if categories else set_id
        strata.setdefault(stratum, []).append(key)

    rng = random.Random(seed)
    by_chain = [""] * len(chains)
    for stratum in sorted(strata, key=repr):
        keys = sorted(strata[stratum])
        rng.shuffle(keys)
        total = sum(len(image_groups[k]) for k in keys)
        deficits = {name: fractions[j] * total for j, name in enumerate(SPLIT_NAMES)}
        for key in keys:
            group = image_groups[key]
            # fill whichever split is currently furthest below target
            name = max(SPLIT_NAMES, key=lambda n: deficits[n])
            deficits[name] -= len(group)
            for index in group:
                by_chain[index] = name
    return SplitAssignment(by_chain=by_chain, fractions=tuple(fractions), seed=seed)


# --- file formats (docs/chains.md) ------------------------------------------


def chains_to_doc(
    logs: list[GameLog],
    segments: list[Segment],
    chains: list[ReferenceChain],
    diagnostics: SegmentationDiagnostics,
) -> dict:
    segment_index = {id(s): i for i, s in enumerate(segments)}
    return {
        "games": {
            log.game_id: {
                "set_id": log.set_id,
                "variant": log.variant,
                "rounds": {
                    str(pos): {
                        "display_a": list(rl.display_a),
                        "display_b": list(rl.display_b),
                    }
                    for pos, rl in enumerate(log.rounds, start=1)
                },
            }
            for log in logs
        },
        "segments": [
            {
                "id": i,
                "game_id": s.game_id,
                "round_index": s.round_index,
                "utterances": [
                    {"actor": u.actor, "text": u.text, "seq": u.seq} for u in s.utterances
                ],
                "targets": sorted(s.target_ids),
            }
            for i, s in enumerate(segments)
        ],
        "chains": [
            {
                "game_id": c.game_id,
                "set_id": c.set_id,
                "image_id": c.target_image_id,
                "segment_ids": [segment_index[id(s)] for s in c.segments],
            }
            for c in chains
        ],
        "diagnostics": diagnostics.to_doc(),
    }


def write_chains(path: str | Path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")


def load_chains_doc(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def chains_from_doc(doc: dict) -> tuple[list[Segment], list[ReferenceChain]]:
    segments = [
        Segment(
            game_id=s["game_id"],
            round_index=int(s["round_index"]),
            utterances=tuple(
                Utterance(u["actor"], u["text"], int(u["seq"])) for u in s["utterances"]
            ),
            target_ids=frozenset(int(t) for t in s["targets"]),
        )
        for s in doc["segments"]
    ]
    chains = [
        ReferenceChain(
            game_id=c["game_id"],
            set_id=int(c["set_id"]),
            target_image_id=int(c["image_id"]),
            segments=tuple(segments[i] for i in c["segment_ids"]),
        )
        for c in doc["chains"]
    ]
    return segments, chains


def write_splits(path: str | Path, assignment: SplitAssignment) -> None:
    doc = {
        "seed": assignment.seed,
        "fractions": list(assignment.fractions),
        "splits": {name: assignment.indices(name) for name in SPLIT_NAMES},
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True), encoding="utf-8")
