// Client-side mirrors of the server's preconditions. A frame leaves the
// client only if its guard passes, so the server never rejects us.

import { MAX_CHAT_CHARS, type Decision } from "./protocol.js";
import type { ViewState } from "./view.js";

export type ChatVerdict = { ok: true } | { ok: false; reason: string };

export function chatInputGuard(text: string): ChatVerdict {
  if (text.length === 0) {
    return { ok: false, reason: "empty message" };
  }
  if (text.length > MAX_CHAT_CHARS) {
    return {
      ok: false,
      reason: `${text.length}/${MAX_CHAT_CHARS} characters`,
    };
  }
  return { ok: true };
}

export function chatPhaseAllowed(view: ViewState): boolean {
  return view.phase === "round" || view.phase === "feedback";
}

export function labelGuard(view: ViewState, imageId: number, decision: Decision): boolean {
  if (view.phase !== "round") return false;
  const tile = view.tiles.find((t) => t.imageId === imageId);
  if (!tile || !tile.highlighted) return false;
  if (tile.decision !== null) return false; // selection is final
  return decision === "common" || decision === "different";
}

export function submitGuard(view: ViewState): boolean {
  if (view.phase !== "round") return false;
  const highlighted = view.tiles.filter((t) => t.highlighted);
  return highlighted.length > 0 && highlighted.every((t) => t.decision !== null);
}

export function questionnaireGuard(q1: number, q2: number, q3: number): boolean {
  return [q1, q2, q3].every((q) => Number.isInteger(q) && q >= 1 && q <= 5);
}
