"""Wire protocol: newline-free JSON frames over a WebSocket.

Exact field names are the contract documented in docs/protocol.md. Client
frames are validated structurally here; game-rule violations are the state
machine's job.
"""

from __future__ import annotations

import json

MAX_FRAME_BYTES = 4096


class ProtocolError(Exception):
    def __init__(self, code: str, detail: str = ""):
        super().__init__(detail or code)
        self.code = code


CLIENT_FRAME_FIELDS: dict[str, dict[str, type]] = {
    "join": {"worker_id": str},
    "chat": {"text": str},
    "label": {"image_id": int, "decision": str},
    "submit": {},
    "next_round": {},
    "questionnaire": {"q1": int, "q2": int, "q3": int},
}


def parse_client_frame(raw: str | bytes) -> dict:
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8", errors="replace")
    if len(raw) > MAX_FRAME_BYTES:
        raise ProtocolError("bad_frame", "frame too large")
    try:
        frame = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ProtocolError("bad_frame", f"malformed JSON: {exc}") from exc
    if not isinstance(frame, dict) or "type" not in frame:
        raise ProtocolError("bad_frame", "frame must be an object with a type")
    ftype = frame["type"]
    fields = CLIENT_FRAME_FIELDS.get(ftype)
    if fields is None:
        raise ProtocolError("bad_frame", f"unknown frame type {ftype!r}")
    for name, expected in fields.items():
        if name not in frame:
            raise ProtocolError("bad_frame", f"{ftype} frame missing {name!r}")
        value = frame[name]
        if expected is int and isinstance(value, bool):
            raise ProtocolError("bad_frame", f"{ftype}.{name} must be an integer")
        if not isinstance(value, expected):
            raise ProtocolError("bad_frame", f"{ftype}.{name} has wrong type")
    return frame


def dump_frame(frame: dict) -> str:
    return json.dumps(frame, separators=(",", ":"), sort_keys=True)


# --- server frame builders ---------------------------------------------------


def frame_paired(game_id: str, partner: str, role: str, warmup: bool) -> dict:
    return {
        "type": "paired",
        "game_id": game_id,
        "partner": partner,
        "role": role,
        "warmup": warmup,
    }


def frame_round_start(
    round_number: int,
    images: list[dict],
    highlights: list[int],
    *,
    total_rounds: int = 5,
    warmup: bool = False,
) -> dict:
    return {
        "type": "round_start",
        "round": round_number,
        "total_rounds": total_rounds,
        "warmup": warmup,
        "images": images,  # [{"image_id": int, "uri": str}] in grid order
        "highlights": highlights,
    }


def frame_chat(text: str, author: str) -> dict:
    return {"type": "chat", "text": text, "author": author}


def frame_feedback(results: list[dict]) -> dict:
    return {"type": "feedback", "results": results}


def frame_next_round() -> dict:
    return {"type": "next_round"}


def frame_questionnaire_prompt(statements: list[str]) -> dict:
    return {"type": "questionnaire", "statements": statements}


def frame_game_end(score: int, payment: str) -> dict:
    return {"type": "game_end", "score": score, "payment": payment}


def frame_error(code: str, detail: str = "") -> dict:
    frame = {"type": "error", "code": code}
    if detail:
        frame["detail"] = detail
    return frame


QUESTIONNAIRE_STATEMENTS = [
    "Overall collaboration with my partner worked well.",
    "I understood my partner's descriptions well.",
    "My partner seemed to understand me well.",
]
