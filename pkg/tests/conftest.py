"""Shared fixtures: synthetic game set pairs, a session driver, a live server."""

from __future__ import annotations

import socket
import threading
import time

import pytest

from refgame.gameset.build import GameSetPair, derive_variants, synthetic_image_sets
from refgame.logstore import GameLog, LogStore
from refgame.server.session import GameSession, Player


@pytest.fixture(scope="session")
def pairs() -> list[GameSetPair]:
    return [derive_variants(s) for s in synthetic_image_sets(4, seed=11)]


@pytest.fixture()
def pair(pairs) -> GameSetPair:
    return pairs[0]


class ScriptedClock:
    """Monotone ms clock advancing a fixed step per call."""

    def __init__(self, start: int = 1_700_000_000_000, step: int = 1500):
        self.now = start
        self.step = step

    def __call__(self) -> int:
        self.now += self.step
        return self.now


def make_session(
    pair: GameSetPair,
    store: LogStore | None,
    *,
    variant: int = 1,
    game_id: str = "g000001",
    warmup: bool = False,
    session_seed: int = 7,
    clock: ScriptedClock | None = None,
    game_indices: tuple[int, int] = (1, 1),
) -> GameSession:
    players = {
        "A": Player("A", "worker_a", "P0001", game_indices[0]),
        "B": Player("B", "worker_b", "P0002", game_indices[1]),
    }
    return GameSession(
        game_id,
        pair,
        variant,
        players,
        store,
        session_seed=session_seed,
        warmup=warmup,
        clock=clock or ScriptedClock(),
    )


def drive_full_game(
    session: GameSession,
    *,
    chats: dict[int, list[tuple[str, str]]] | None = None,
    wrong_labels: int = 0,
) -> list[tuple[str, dict]]:
    """Play a session to completion with correct labels (optionally a few wrong).

    ``chats`` maps round position -> [(role, text)] sent before the labels.
    Returns every outbound frame the server side produced.
    """
    outbound = list(session.start_frames())
    wrongs_left = wrong_labels
    while not session.closed:
        phase = session.state.phase
        if phase.kind in ("warmup", "round"):
            k = phase.round_index
            for role, text in (chats or {}).get(k, []):
                outbound += session.handle(role, {"type": "chat", "text": text})
            rs = session.state.current_round_spec()
            commons = rs.common_images()
            for role in ("A", "B"):
                for image_id in rs.highlights(role):
                    decision = "common" if image_id in commons else "different"
                    if wrongs_left > 0:
                        decision = "different" if decision == "common" else "common"
                        wrongs_left -= 1
                    outbound += session.handle(
                        role, {"type": "label", "image_id": image_id, "decision": decision}
                    )
                outbound += session.handle(role, {"type": "submit"})
        elif phase.kind == "feedback":
            outbound += session.handle("A", {"type": "next_round"})
            outbound += session.handle("B", {"type": "next_round"})
        elif phase.kind == "questionnaire":
            outbound += session.handle("A", {"type": "questionnaire", "q1": 5, "q2": 4, "q3": 5})
            outbound += session.handle("B", {"type": "questionnaire", "q1": 4, "q2": 4, "q3": 4})
        else:
            break
    return outbound


def logged_game(
    tmp_path,
    pair: GameSetPair,
    *,
    variant: int = 1,
    game_id: str = "g000001",
    warmup: bool = False,
    chats: dict[int, list[tuple[str, str]]] | None = None,
    wrong_labels: int = 0,
) -> tuple[LogStore, GameLog]:
    store = LogStore(tmp_path / "store", fsync=False)
    session = make_session(pair, store, variant=variant, game_id=game_id, warmup=warmup)
    drive_full_game(session, chats=chats, wrong_labels=wrong_labels)
    import json

    doc = json.loads(store.export_game(game_id))
    return store, GameLog.from_doc(doc)


def free_port() -> int:
    s = socket.socket()
    s.bind(("127.0.0.1", 0))
    port = s.getsockname()[1]
    s.close()
    return port


class LiveServer:
    """uvicorn in a daemon thread, for websocket tests against the real loop."""

    def __init__(self, app):
        import uvicorn

        self.port = free_port()
        config = uvicorn.Config(app, host="127.0.0.1", port=self.port, log_level="error")
        self.server = uvicorn.Server(config)
        self.thread = threading.Thread(target=self.server.run, daemon=True)

    def __enter__(self) -> "LiveServer":
        self.thread.start()
        deadline = time.time() + 10
        while not self.server.started:
            if time.time() > deadline:
                raise RuntimeError("server did not start")
            time.sleep(0.02)
        return self

    def __exit__(self, *exc) -> None:
        self.server.should_exit = True
        self.thread.join(timeout=10)

    @property
    def ws_url(self) -> str:
        return f"ws://127.0.0.1:{self.port}/ws"
