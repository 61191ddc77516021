"""Live game server: matchmaking, wire protocol and sessions."""

from refgame.server.matchmaking import (
    MatchResult,
    Matchmaker,
    ParticipantProfile,
    enforce_constraints,
)

__all__ = ["MatchResult", "Matchmaker", "ParticipantProfile", "enforce_constraints"]
