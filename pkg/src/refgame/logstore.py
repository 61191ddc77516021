"""Append-only persistence of game events and corpus import/export.

Layout under the store root:

    logs/<game_id>.events.jsonl   one event per line, written before ack
    logs/<game_id>.json           canonical closed-game document
    index.json                    closed-game index
    private/participants.json     worker-id -> pseudonym map (never exported)

One writer per game; events are fsynced before the append call returns, so a
crash between ack and close loses nothing. Closed-game documents are canonical
JSON (sorted keys, no floats), so exporting twice is byte-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from refgame.core.state import apply_event, new_game
from refgame.core.types import (
    GameSpec,
    GameState,
    RoundSpec,
    TurnEvent,
)
from refgame.text import tokenize


class LogStoreError(Exception):
    pass


class UnknownGame(LogStoreError):
    pass


class SequenceGap(LogStoreError):
    pass


def canonical_dumps(doc: object) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


# --- documents -------------------------------------------------------------


@dataclass(frozen=True)
class RoundLog:
    round_index: int
    display_a: tuple[int, ...]
    display_b: tuple[int, ...]
    highlights_a: tuple[int, ...]
    highlights_b: tuple[int, ...]
    events: tuple[dict, ...]
    correctness: tuple[dict, ...]
    started_ms: int | None = None
    ended_ms: int | None = None


@dataclass(frozen=True)
class GameLog:
    game_id: str
    set_id: int
    variant: int
    participants: tuple[str, str]  # pseudonyms, (A, B)
    rounds: tuple[RoundLog, ...]
    completed: bool
    duration_ms: int | None = None
    score: int | None = None
    questionnaire: dict = field(default_factory=dict)
    warmup: RoundLog | None = None
    session_seed: int | None = None
    events_tail: tuple[dict, ...] = ()  # questionnaire/disconnect events

    def all_events(self) -> list[dict]:
        events: list[dict] = []
        if self.warmup is not None:
            events.extend(self.warmup.events)
        for rl in self.rounds:
            events.extend(rl.events)
        events.extend(self.events_tail)
        return sorted(events, key=lambda e: e["seq"])

    def to_doc(self) -> dict:
        def round_doc(rl: RoundLog) -> dict:
            return {
                "round_index": rl.round_index,
                "display_a": list(rl.display_a),
                "display_b": list(rl.display_b),
                "highlights_a": list(rl.highlights_a),
                "highlights_b": list(rl.highlights_b),
                "events": list(rl.events),
                "correctness": list(rl.correctness),
                "started_ms": rl.started_ms,
                "ended_ms": rl.ended_ms,
            }

        return {
            "game_id": self.game_id,
            "set_id": self.set_id,
            "variant": self.variant,
            "participants": list(self.participants),
            "completed": self.completed,
            "duration_ms": self.duration_ms,
            "score": self.score,
            "questionnaire": self.questionnaire,
            "session_seed": self.session_seed,
            "warmup": round_doc(self.warmup) if self.warmup else None,
            "rounds": [round_doc(rl) for rl in self.rounds],
            "events_tail": list(self.events_tail),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> GameLog:
        def round_log(rdoc: dict) -> RoundLog:
            return RoundLog(
                round_index=int(rdoc["round_index"]),
                display_a=tuple(rdoc["display_a"]),
                display_b=tuple(rdoc["display_b"]),
                highlights_a=tuple(rdoc["highlights_a"]),
                highlights_b=tuple(rdoc["highlights_b"]),
                events=tuple(rdoc["events"]),
                correctness=tuple(rdoc["correctness"]),
                started_ms=rdoc.get("started_ms"),
                ended_ms=rdoc.get("ended_ms"),
            )

        warmup = doc.get("warmup")
        return cls(
            game_id=str(doc["game_id"]),
            set_id=int(doc["set_id"]),
            variant=int(doc["variant"]),
            participants=tuple(doc["participants"]),
            rounds=tuple(round_log(r) for r in doc["rounds"]),
            completed=bool(doc["completed"]),
            duration_ms=doc.get("duration_ms"),
            score=doc.get("score"),
            questionnaire=doc.get("questionnaire", {}),
            warmup=round_log(warmup) if warmup else None,
            session_seed=doc.get("session_seed"),
            events_tail=tuple(doc.get("events_tail", ())),
        )


def event_to_doc(event: TurnEvent, *, round_index: int, phase_kind: str) -> dict:
    doc = {
        "seq": event.seq,
        "ts": event.timestamp_ms,
        "actor": event.actor,
        "kind": event.kind,
        "round_index": round_index,
        "phase": phase_kind,
    }
    if event.kind == "message":
        doc["text"] = event.payload
    elif event.kind == "label":
        doc["image_id"] = event.payload.image_id
        doc["decision"] = event.payload.decision
    elif event.kind == "questionnaire":
        doc["scores"] = list(event.payload)
    return doc


def event_from_doc(doc: dict) -> TurnEvent:
    kind = doc["kind"]
    seq, ts, actor = int(doc["seq"]), int(doc["ts"]), str(doc["actor"])
    if kind == "message":
        return TurnEvent.message(seq, ts, actor, str(doc["text"]))
    if kind == "label":
        return TurnEvent.label(seq, ts, actor, int(doc["image_id"]), str(doc["decision"]))
    if kind == "submit":
        return TurnEvent.submit(seq, ts, actor)
    if kind == "feedback_ack":
        return TurnEvent.feedback_ack(seq, ts, actor)
    if kind == "questionnaire":
        return TurnEvent.questionnaire(seq, ts, actor, tuple(int(s) for s in doc["scores"]))
    if kind == "disconnect":
        return TurnEvent.disconnect(seq, ts, actor)
    raise ValueError(f"unknown event kind {kind!r}")


def spec_from_log(log: GameLog) -> GameSpec:
    """Reconstruct the session's game spec from its own log document."""

    def round_spec(rl: RoundLog) -> RoundSpec:
        return RoundSpec(
            round_index=rl.round_index,
            display_a=rl.display_a,
            display_b=rl.display_b,
            highlights_a=rl.highlights_a,
            highlights_b=rl.highlights_b,
        )

    return GameSpec(
        game_id=log.game_id,
        set_id=log.set_id,
        variant=log.variant,
        rounds=tuple(round_spec(rl) for rl in log.rounds),
        warmup=round_spec(log.warmup) if log.warmup else None,
        session_seed=log.session_seed,
    )


def replay_log(log: GameLog, spec: GameSpec | None = None) -> GameState:
    """Re-run a logged game through the state machine (raises on any illegal step)."""
    state = new_game(spec if spec is not None else spec_from_log(log))
    for doc in log.all_events():
        state = apply_event(state, event_from_doc(doc))
    return state


# --- store -----------------------------------------------------------------


@dataclass
class _OpenGame:
    last_seq: int
    header: dict


class Pseudonymizer:
    """Stable worker-id -> pseudonym map, persisted outside the exported logs."""

    def __init__(self, path: Path):
        self._path = path
        self._map: dict[str, str] = {}
        if path.exists():
            self._map = json.loads(path.read_text(encoding="utf-8"))

    def pseudonym(self, worker_id: str) -> str:
        if worker_id not in self._map:
            self._map[worker_id] = f"P{len(self._map) + 1:04d}"
            self._path.parent.mkdir(parents=True, exist_ok=True)
            self._path.write_text(json.dumps(self._map, indent=2), encoding="utf-8")
        return self._map[worker_id]


class LogStore:
    def __init__(self, root: str | Path, *, fsync: bool = True):
        self.root = Path(root)
        self.logs_dir = self.root / "logs"
        self.logs_dir.mkdir(parents=True, exist_ok=True)
        self._fsync = fsync
        self._open: dict[str, _OpenGame] = {}
        self.pseudonyms = Pseudonymizer(self.root / "private" / "participants.json")
        self._recover()

    # -- lifecycle

    def _events_path(self, game_id: str) -> Path:
        return self.logs_dir / f"{game_id}.events.jsonl"

    def _doc_path(self, game_id: str) -> Path:
        return self.logs_dir / f"{game_id}.json"

    def _recover(self) -> None:
        for events_path in self.logs_dir.glob("*.events.jsonl"):
            game_id = events_path.name[: -len(".events.jsonl")]
            if self._doc_path(game_id).exists():
                continue
            header, last_seq = None, 0
            with open(events_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    doc = json.loads(line)
                    if doc.get("kind") == "open":
                        header = doc
                    else:
                        last_seq = max(last_seq, int(doc["seq"]))
            if header is not None:
                self._open[game_id] = _OpenGame(last_seq=last_seq, header=header)

    def open_game(self, game_id: str, header: dict) -> None:
        if game_id in self._open or self._doc_path(game_id).exists():
            raise LogStoreError(f"game {game_id} already exists")
        record = {"kind": "open", "game_id": game_id, **header}
        self._write_line(game_id, record)
        self._open[game_id] = _OpenGame(last_seq=0, header=record)

    def append_event(self, game_id: str, event_doc: dict) -> None:
        game = self._open.get(game_id)
        if game is None:
            raise UnknownGame(game_id)
        seq = int(event_doc["seq"])
        if seq != game.last_seq + 1:
            raise SequenceGap(f"game {game_id}: expected seq {game.last_seq + 1}, got {seq}")
        self._write_line(game_id, event_doc)
        game.last_seq = seq

    def _write_line(self, game_id: str, doc: dict) -> None:
        path = self._events_path(game_id)
        with open(path, "a", encoding="utf-8") as fh:
            fh.write(canonical_dumps(doc) + "\n")
            fh.flush()
            if self._fsync:
                os.fsync(fh.fileno())

    def read_events(self, game_id: str) -> list[dict]:
        path = self._events_path(game_id)
        if not path.exists():
            raise UnknownGame(game_id)
        events = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                doc = json.loads(line)
                if doc.get("kind") != "open":
                    events.append(doc)
        return events

    def is_open(self, game_id: str) -> bool:
        return game_id in self._open

    def close_game(self, game_id: str, summary: dict) -> GameLog:
        """Seal a game: build the canonical document from header + events."""
        game = self._open.pop(game_id, None)
        if game is None:
            raise UnknownGame(game_id)
        log = self._build_log(game.header, self.read_events(game_id), summary)
        self._doc_path(game_id).write_text(canonical_dumps(log.to_doc()), encoding="utf-8")
        self._update_index(log)
        return log

    def _build_log(self, header: dict, events: list[dict], summary: dict) -> GameLog:
        rounds_meta = {int(r["round_index"]): r for r in header["rounds"]}
        warmup_meta = header.get("warmup")
        by_round: dict[int, list[dict]] = {}
        tail: list[dict] = []
        for doc in events:
            k = doc.get("round_index")
            if k is None or doc["kind"] in ("questionnaire",):
                tail.append(doc)
            else:
                by_round.setdefault(int(k), []).append(doc)
        correctness = summary.get("correctness", [])
        times = summary.get("round_times", {})

        def make_round(k: int, meta: dict) -> RoundLog:
            span = times.get(k) or times.get(str(k)) or (None, None)
            return RoundLog(
                round_index=k,
                display_a=tuple(meta["display_a"]),
                display_b=tuple(meta["display_b"]),
                highlights_a=tuple(meta["highlights_a"]),
                highlights_b=tuple(meta["highlights_b"]),
                events=tuple(by_round.get(k, ())),
                correctness=tuple(c for c in correctness if c["round_index"] == k),
                started_ms=span[0],
                ended_ms=span[1],
            )

        return GameLog(
            game_id=header["game_id"],
            set_id=int(header["set_id"]),
            variant=int(header["variant"]),
            participants=tuple(header["participants"]),
            rounds=tuple(make_round(k, rounds_meta[k]) for k in sorted(rounds_meta)),
            completed=bool(summary["completed"]),
            duration_ms=summary.get("duration_ms"),
            score=summary.get("score"),
            questionnaire=summary.get("questionnaire", {}),
            warmup=make_round(0, warmup_meta) if warmup_meta else None,
            session_seed=header.get("session_seed"),
            events_tail=tuple(tail),
        )

    def _update_index(self, log: GameLog) -> None:
        index_path = self.root / "index.json"
        index = {}
        if index_path.exists():
            index = json.loads(index_path.read_text(encoding="utf-8"))
        index[log.game_id] = {
            "set_id": log.set_id,
            "variant": log.variant,
            "completed": log.completed,
            "score": log.score,
        }
        index_path.write_text(canonical_dumps(index), encoding="utf-8")

    # -- export / import

    def export_game(self, game_id: str) -> str:
        path = self._doc_path(game_id)
        if not path.exists():
            raise UnknownGame(game_id)
        return path.read_text(encoding="utf-8")

    def closed_games(self) -> list[str]:
        return sorted(p.name[: -len(".json")] for p in self.logs_dir.glob("*.json"))


@dataclass
class ImportReport:
    games: int = 0
    completed_games: int = 0
    utterances: int = 0
    actions: int = 0
    vocabulary: int = 0
    timestamp_unit: str | None = None
    failures: list[tuple[str, str]] = field(default_factory=list)

    def to_doc(self) -> dict:
        return {
            "games": self.games,
            "completed_games": self.completed_games,
            "utterances": self.utterances,
            "actions": self.actions,
            "vocabulary": self.vocabulary,
            "timestamp_unit": self.timestamp_unit,
            "failures": [list(f) for f in self.failures],
        }


ACTION_KINDS = ("label", "submit", "feedback_ack", "questionnaire")


def import_corpus(
    path: str | Path, *, field_map: dict[str, str] | None = None
) -> tuple[list[GameLog], ImportReport]:
    """Load a directory of closed-game documents.

    ``field_map`` renames top-level keys of foreign documents onto ours before
    parsing (schema-tolerant adapter). Per-file failures are collected in the
    report, never raised.
    """
    root = Path(path)
    report = ImportReport()
    logs: list[GameLog] = []
    vocab: set[str] = set()
    max_ts = 0
    files = sorted(root.glob("**/*.json"))
    for file in files:
        if file.name == "index.json" or file.name.endswith(".events.jsonl"):
            continue
        try:
            doc = json.loads(file.read_text(encoding="utf-8"))
            if field_map:
                doc = {field_map.get(k, k): v for k, v in doc.items()}
            log = GameLog.from_doc(doc)
        except Exception as exc:  # per-file tolerance is the contract
            report.failures.append((str(file), f"{type(exc).__name__}: {exc}"))
            continue
        logs.append(log)
        report.games += 1
        report.completed_games += 1 if log.completed else 0
        for event in log.all_events():
            max_ts = max(max_ts, int(event.get("ts", 0)))
            if event["kind"] == "message":
                report.utterances += 1
                vocab.update(tokenize(event["text"]))
            elif event["kind"] in ACTION_KINDS:
                report.actions += 1
    report.vocabulary = len(vocab)
    if max_ts:
        report.timestamp_unit = "ms" if max_ts > 10_000_000_000 else "s"
    return logs, report
