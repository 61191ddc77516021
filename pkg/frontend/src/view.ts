// The screen as a pure function of the ordered input history.
//
// Inputs are either server frames or the player's own local actions (their
// label selections and sent chat lines). Folding `applyInput` over the same
// inputs always rebuilds the identical ViewState.

import type { Decision, Role, ServerFrame } from "./protocol.js";

export type BarState =
  | "greyed"
  | "highlighted-unlabelled"
  | "labelled-common"
  | "labelled-different"
  | "feedback-green"
  | "feedback-red";

export interface Tile {
  imageId: number;
  uri: string;
  highlighted: boolean;
  bar: BarState;
  decision: Decision | null;
}

export type Phase =
  | "lobby"
  | "round"
  | "feedback"
  | "questionnaire"
  | "done"
  | "aborted";

export interface ChatLine {
  author: Role | "me";
  text: string;
}

export interface ViewState {
  phase: Phase;
  gameId: string | null;
  role: Role | null;
  partner: string | null;
  warmup: boolean;
  round: number;
  totalRounds: number;
  progressLabel: string;
  tiles: Tile[];
  chat: ChatLine[];
  statements: string[];
  score: number | null;
  payment: string | null;
  errorBanner: string | null;
}

export type LocalAction =
  | { type: "local_label"; imageId: number; decision: Decision }
  | { type: "local_chat"; text: string };

export type Input = ServerFrame | LocalAction;

export function initialView(): ViewState {
  return {
    phase: "lobby",
    gameId: null,
    role: null,
    partner: null,
    warmup: false,
    round: 0,
    totalRounds: 5,
    progressLabel: "Waiting for a partner…",
    tiles: [],
    chat: [],
    statements: [],
    score: null,
    payment: null,
    errorBanner: null,
  };
}

function progressLabel(round: number, totalRounds: number, warmup: boolean): string {
  return warmup ? "Warming up" : `Page ${round} of ${totalRounds}`;
}

export function applyInput(view: ViewState, input: Input): ViewState {
  switch (input.type) {
    case "paired":
      return {
        ...view,
        gameId: input.game_id,
        role: input.role,
        partner: input.partner,
        errorBanner: null,
      };

    case "round_start":
      return {
        ...view,
        phase: "round",
        warmup: input.warmup,
        round: input.round,
        totalRounds: input.total_rounds,
        progressLabel: progressLabel(input.round, input.total_rounds, input.warmup),
        tiles: input.images.map((image) => {
          const highlighted = input.highlights.includes(image.image_id);
          return {
            imageId: image.image_id,
            uri: image.uri,
            highlighted,
            bar: highlighted ? "highlighted-unlabelled" : "greyed",
            decision: null,
          } satisfies Tile;
        }),
        errorBanner: null,
      };

    case "local_label":
      return {
        ...view,
        tiles: view.tiles.map((tile) =>
          tile.imageId === input.imageId
            ? {
                ...tile,
                decision: input.decision,
                bar: input.decision === "common" ? "labelled-common" : "labelled-different",
              }
            : tile,
        ),
      };

    case "chat":
      return { ...view, chat: [...view.chat, { author: input.author, text: input.text }] };

    case "local_chat":
      return { ...view, chat: [...view.chat, { author: "me", text: input.text }] };

    case "feedback": {
      // decisions become immutable; bars recolour green/red per correctness
      const byImage = new Map(input.results.map((r) => [r.image_id, r]));
      return {
        ...view,
        phase: "feedback",
        tiles: view.tiles.map((tile) => {
          const result = byImage.get(tile.imageId);
          if (!result) return tile;
          return { ...tile, bar: result.correct ? "feedback-green" : "feedback-red" };
        }),
      };
    }

    case "next_round":
      return view; // the following round_start repopulates the grid

    case "questionnaire":
      return {
        ...view,
        phase: "questionnaire",
        progressLabel: "Questionnaire",
        statements: input.statements,
        tiles: [],
      };

    case "game_end":
      return {
        ...view,
        phase: "done",
        progressLabel: "Finished",
        score: input.score,
        payment: input.payment,
      };

    case "error":
      if (input.code === "partner_disconnected") {
        return { ...view, phase: "aborted", errorBanner: "Your partner disconnected." };
      }
      // visible banner, session preserved
      return { ...view, errorBanner: `${input.code}${input.detail ? `: ${input.detail}` : ""}` };

    default: {
      // unknown frame: keep the session, surface a banner
      const unknown = input as { type?: string };
      return { ...view, errorBanner: `unknown frame ${unknown.type ?? "?"}` };
    }
  }
}

export function replay(inputs: Input[]): ViewState {
  return inputs.reduce(applyInput, initialView());
}
