"""WebSocket transport and lobby wiring around the matchmaking and sessions."""

from __future__ import annotations

import asyncio
import contextlib
import logging
import random
import time
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles
from starlette.websockets import WebSocketState

from refgame.gameset.build import GameSetPair
from refgame.logstore import LogStore
from refgame.server import protocol
from refgame.server.matchmaking import Matchmaker, MatchResult
from refgame.server.protocol import ProtocolError
from refgame.server.session import GameSession, Player

logger = logging.getLogger(__name__)


def now_ms() -> int:
    return int(time.time() * 1000)


class Hub:
    """All live server state; every mutation happens on the event loop."""

    def __init__(
        self,
        gamesets: list[GameSetPair],
        store: LogStore | None,
        *,
        seed: int = 0,
        max_games: int = 5,
        match_timeout: float = 120.0,
        clock=now_ms,
    ):
        self.gamesets = {pair.set_id: pair for pair in gamesets}
        self.store = store
        self.clock = clock
        self.rng = random.Random(seed)
        self.matchmaker = Matchmaker(gamesets, max_games=max_games, hold_timeout=match_timeout)
        self.sockets: dict[str, WebSocket] = {}
        self.sessions: dict[str, tuple[GameSession, str]] = {}  # worker -> (session, role)
        self.locks: dict[str, asyncio.Lock] = {}  # game_id -> lock
        self.serial = 0
        self.match_lock = asyncio.Lock()

    def next_game_id(self) -> str:
        self.serial += 1
        return f"g{self.serial:06d}"

    async def join(self, worker_id: str, ws: WebSocket) -> bool:
        if worker_id in self.sockets:
            await self.send(ws, protocol.frame_error("already_connected"))
            return False
        self.sockets[worker_id] = ws
        async with self.match_lock:
            self.matchmaker.enqueue(worker_id, time.monotonic())
            await self.run_matching()
        return True

    async def run_matching(self) -> None:
        while True:
            result = self.matchmaker.find_match(time.monotonic())
            if result is None:
                return
            await self.start_game(result)

    async def start_game(self, result: MatchResult) -> None:
        pair = self.gamesets[result.set_id]
        game_id = self.next_game_id()
        players = {}
        for role, worker_id in (("A", result.worker_a), ("B", result.worker_b)):
            profile = self.matchmaker.profile(worker_id)
            pseudonym = (
                self.store.pseudonyms.pseudonym(worker_id) if self.store else worker_id
            )
            players[role] = Player(
                role=role,
                worker_id=worker_id,
                pseudonym=pseudonym,
                completed_game_index=profile.games_completed + 1,
            )
        session = GameSession(
            game_id,
            pair,
            result.variant,
            players,
            self.store,
            session_seed=self.rng.getrandbits(32),
            warmup=result.warmup,
            clock=self.clock,
        )
        self.locks[game_id] = asyncio.Lock()
        for role, player in players.items():
            self.sessions[player.worker_id] = (session, role)
        await self.deliver(session, session.start_frames())

    async def deliver(self, session: GameSession, outbound) -> None:
        for role, frame in outbound:
            worker_id = session.players[role].worker_id
            ws = self.sockets.get(worker_id)
            if ws is not None:
                await self.send(ws, frame)

    async def send(self, ws: WebSocket, frame: dict) -> None:
        try:
            await ws.send_text(protocol.dump_frame(frame))
        except Exception:  # client went away; the receive loop handles cleanup
            pass

    async def handle_frame(self, worker_id: str, raw: str) -> None:
        entry = self.sessions.get(worker_id)
        ws = self.sockets.get(worker_id)
        if entry is None:
            if ws is not None:
                await self.send(ws, protocol.frame_error("not_in_game"))
            return
        session, role = entry
        try:
            frame = protocol.parse_client_frame(raw)
            if frame["type"] == "join":
                raise ProtocolError("bad_frame", "already joined")
        except ProtocolError as exc:
            if ws is not None:
                await self.send(ws, protocol.frame_error(exc.code, str(exc)))
            return
        async with self.locks[session.game_id]:
            outbound = session.handle(role, frame)
            await self.deliver(session, outbound)
            if session.closed:
                await self.finish_game(session, completed=True)

    async def finish_game(self, session: GameSession, *, completed: bool) -> None:
        key = (session.pair.set_id, session.variant)
        for role, player in session.players.items():
            self.sessions.pop(player.worker_id, None)
            if completed:
                self.matchmaker.record_completion(player.worker_id, key)
        self.locks.pop(session.game_id, None)
        if completed:
            for player in session.players.values():
                ws = self.sockets.get(player.worker_id)
                if ws is not None:
                    with contextlib.suppress(Exception):
                        await ws.close(code=1000)
        async with self.match_lock:
            await self.run_matching()

    async def leave(self, worker_id: str) -> None:
        self.sockets.pop(worker_id, None)
        async with self.match_lock:
            self.matchmaker.dequeue(worker_id)
        entry = self.sessions.get(worker_id)
        if entry is None:
            return
        session, role = entry
        lock = self.locks.get(session.game_id)
        if lock is None:
            self.sessions.pop(worker_id, None)
            return
        async with lock:
            if not session.closed:
                outbound = session.handle_disconnect(role)
                await self.deliver(session, outbound)
                await self.finish_game(session, completed=False)
            else:
                self.sessions.pop(worker_id, None)


def create_app(
    gamesets: list[GameSetPair],
    log_dir: str | Path | None,
    *,
    seed: int = 0,
    max_games: int = 5,
    match_timeout: float = 120.0,
    images_dir: str | Path | None = None,
    clock=now_ms,
) -> FastAPI:
    store = LogStore(log_dir) if log_dir is not None else None
    hub = Hub(
        gamesets,
        store,
        seed=seed,
        max_games=max_games,
        match_timeout=match_timeout,
        clock=clock,
    )

    @contextlib.asynccontextmanager
    async def lifespan(app: FastAPI):
        async def rematch_periodically() -> None:
            while True:
                await asyncio.sleep(max(0.5, min(5.0, match_timeout / 4)))
                async with hub.match_lock:
                    await hub.run_matching()

        task = asyncio.create_task(rematch_periodically())
        try:
            yield
        finally:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task

    app = FastAPI(title="refgame server", lifespan=lifespan)
    app.state.hub = hub

    @app.get("/healthz")
    async def healthz() -> dict:
        return {
            "ok": True,
            "queued": len(hub.matchmaker.queue),
            "live_games": len(hub.locks),
        }

    @app.websocket("/ws")
    async def ws_endpoint(ws: WebSocket) -> None:
        await ws.accept()
        worker_id: str | None = None
        try:
            raw = await ws.receive_text()
            try:
                frame = protocol.parse_client_frame(raw)
                if frame["type"] != "join":
                    raise ProtocolError("bad_frame", "first frame must be join")
            except ProtocolError as exc:
                await hub.send(ws, protocol.frame_error(exc.code, str(exc)))
                await ws.close(code=1008)
                return
            worker_id = frame["worker_id"]
            if not await hub.join(worker_id, ws):
                await ws.close(code=1008)
                return
            while True:
                raw = await ws.receive_text()
                await hub.handle_frame(worker_id, raw)
                if ws.application_state != WebSocketState.CONNECTED:
                    break  # game over: the hub closed this socket
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            if worker_id is not None:
                await hub.leave(worker_id)

    if images_dir is not None:
        app.mount("/images", StaticFiles(directory=str(images_dir)), name="images")
    return app
