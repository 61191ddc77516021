"""Pairing participants under the data-collection constraints.

Hard constraints, all three enforced for every emitted match:

1. nobody plays more than ``max_games`` games;
2. nobody plays the same game (set + variant) twice;
3. the same two participants are never paired a second time.

Preference: a re-entering participant should get the *other variant over the
same image set* as their previous game, with a new partner. The queue is FIFO;
a re-entering participant whose preferred game has no legal partner yet is
held back (and excluded from other fallback pairings) until ``hold_timeout``
seconds have passed, after which any legal least-played game is offered.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from refgame.gameset.build import GameSetPair

GameKey = tuple[int, int]  # (set_id, variant)


@dataclass
class ParticipantProfile:
    worker_id: str
    games_completed: int = 0
    played_games: set[GameKey] = field(default_factory=set)
    past_partners: set[str] = field(default_factory=set)
    past_set_ids: set[int] = field(default_factory=set)
    last_set_id: int | None = None
    last_variant: int | None = None

    def preferred_key(self) -> GameKey | None:
        """Other variant over the set of the previous game, if still playable."""
        if self.last_set_id is None or self.last_variant is None:
            return None
        key = (self.last_set_id, 3 - self.last_variant)
        return key if key not in self.played_games else None


@dataclass(frozen=True)
class MatchResult:
    worker_a: str
    worker_b: str
    set_id: int
    variant: int
    warmup: bool
    preferred_for: tuple[str, ...] = ()  # workers whose preference this match honours

    @property
    def key(self) -> GameKey:
        return (self.set_id, self.variant)


def enforce_constraints(
    profiles: dict[str, ParticipantProfile],
    result: MatchResult,
    *,
    max_games: int = 5,
) -> bool:
    """True iff a proposed match violates none of the three constraints."""
    a = profiles.get(result.worker_a)
    b = profiles.get(result.worker_b)
    if a is None or b is None or a.worker_id == b.worker_id:
        return False
    if a.games_completed >= max_games or b.games_completed >= max_games:
        return False
    if result.key in a.played_games or result.key in b.played_games:
        return False
    if b.worker_id in a.past_partners or a.worker_id in b.past_partners:
        return False
    return True


@dataclass
class _QueueEntry:
    worker_id: str
    since: float


class Matchmaker:
    def __init__(
        self,
        gamesets: list[GameSetPair],
        *,
        max_games: int = 5,
        hold_timeout: float = 120.0,
    ):
        self.keys: list[GameKey] = [
            (pair.set_id, v) for pair in gamesets for v in (1, 2)
        ]
        self.pairs_by_set = {pair.set_id: pair for pair in gamesets}
        self.max_games = max_games
        self.hold_timeout = hold_timeout
        self.profiles: dict[str, ParticipantProfile] = {}
        self.queue: list[_QueueEntry] = []
        self.play_counts: dict[GameKey, int] = {key: 0 for key in self.keys}

    # -- queue -----------------------------------------------------------

    def profile(self, worker_id: str) -> ParticipantProfile:
        if worker_id not in self.profiles:
            self.profiles[worker_id] = ParticipantProfile(worker_id)
        return self.profiles[worker_id]

    def enqueue(self, worker_id: str, now: float) -> None:
        self.profile(worker_id)
        if not any(e.worker_id == worker_id for e in self.queue):
            self.queue.append(_QueueEntry(worker_id, now))

    def dequeue(self, worker_id: str) -> None:
        self.queue = [e for e in self.queue if e.worker_id != worker_id]

    def queued(self) -> list[str]:
        return [e.worker_id for e in self.queue]

    # -- matching ---------------------------------------------------------

    def _legal(self, x: ParticipantProfile, y: ParticipantProfile, key: GameKey) -> bool:
        return enforce_constraints(
            self.profiles,
            MatchResult(x.worker_id, y.worker_id, key[0], key[1], warmup=False),
            max_games=self.max_games,
        )

    def _held(self, entry: _QueueEntry, now: float) -> GameKey | None:
        """A hold key if this participant is still waiting for their preference."""
        profile = self.profiles[entry.worker_id]
        preferred = profile.preferred_key()
        if preferred is None:
            return None
        if now - entry.since >= self.hold_timeout:
            return None
        return preferred

    def _legal_keys(self, x: ParticipantProfile, y: ParticipantProfile) -> list[GameKey]:
        return [key for key in self.keys if self._legal(x, y, key)]

    def find_match(self, now: float) -> MatchResult | None:
        """Scan the queue FIFO and emit at most one match (queue updated)."""
        for i, entry in enumerate(self.queue):
            x = self.profiles[entry.worker_id]
            if x.games_completed >= self.max_games:
                continue
            preferred = x.preferred_key()

            # Preference pass: the other variant of x's previous set.
            if preferred is not None:
                for other in self.queue[:i] + self.queue[i + 1 :]:
                    y = self.profiles[other.worker_id]
                    hold_y = self._held(other, now)
                    if hold_y is not None and hold_y != preferred:
                        continue
                    if self._legal(x, y, preferred):
                        return self._emit(x, y, preferred, preferred_for_x=True)
                if self._held(entry, now) is not None:
                    continue  # keep waiting for the preferred game

            # Fallback: any legal pairing on a least-played game set.
            for other in self.queue[:i] + self.queue[i + 1 :]:
                y = self.profiles[other.worker_id]
                if self._held(other, now) is not None:
                    continue
                keys = self._legal_keys(x, y)
                if keys:
                    key = min(keys, key=lambda k: (self.play_counts[k], k))
                    return self._emit(x, y, key, preferred_for_x=False)
        return None

    def _emit(
        self,
        x: ParticipantProfile,
        y: ParticipantProfile,
        key: GameKey,
        *,
        preferred_for_x: bool,
    ) -> MatchResult:
        warmup = x.games_completed == 0 or y.games_completed == 0
        preferred_for = []
        if preferred_for_x:
            preferred_for.append(x.worker_id)
        if y.preferred_key() == key:
            preferred_for.append(y.worker_id)
        result = MatchResult(
            worker_a=x.worker_id,
            worker_b=y.worker_id,
            set_id=key[0],
            variant=key[1],
            warmup=warmup,
            preferred_for=tuple(preferred_for),
        )
        self.dequeue(x.worker_id)
        self.dequeue(y.worker_id)
        # Recorded at match time so an aborted game is never re-offered either.
        x.played_games.add(key)
        y.played_games.add(key)
        x.past_partners.add(y.worker_id)
        y.past_partners.add(x.worker_id)
        x.past_set_ids.add(key[0])
        y.past_set_ids.add(key[0])
        self.play_counts[key] += 1
        return result

    def record_completion(self, worker_id: str, key: GameKey) -> None:
        profile = self.profile(worker_id)
        profile.games_completed += 1
        profile.last_set_id, profile.last_variant = key
