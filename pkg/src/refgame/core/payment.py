"""Worker payment: base amount, per-minute time bonus, repeat-game bonus."""

from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal

BASE_USD = Decimal("1.75")
PER_MINUTE_USD = Decimal("0.10")
BONUS_FREE_MINUTES = 10
BONUS_CAP_MINUTES = 25  # 15 bonus minutes -> at most 1.50 USD
REPEAT_BONUS_USD = Decimal("0.25")

_CENT = Decimal("0.01")


class InvalidInput(ValueError):
    pass


def compute_payment(
    duration_minutes: float, completed_game_index: int, completed: bool
) -> Decimal:
    """USD owed for one game.

    Completed games earn 1.75 base, plus 0.10 per minute beyond the first ten
    (capped at 25 minutes, i.e. a 1.50 bonus), plus 0.25 from the second
    completed game on. Abandoned games earn nothing.
    """
    if duration_minutes < 0:
        raise InvalidInput(f"negative duration: {duration_minutes}")
    if completed_game_index < 1:
        raise InvalidInput(f"game index must be >= 1, got {completed_game_index}")
    if not completed:
        return Decimal("0.00")
    bonus_minutes = max(Decimal(0), min(Decimal(str(duration_minutes)), BONUS_CAP_MINUTES) - BONUS_FREE_MINUTES)
    amount = BASE_USD + PER_MINUTE_USD * bonus_minutes
    if completed_game_index >= 2:
        amount += REPEAT_BONUS_USD
    return amount.quantize(_CENT, rounding=ROUND_HALF_UP)
