// Wire protocol frames (see the server's docs/protocol.md).

export type Decision = "common" | "different";
export type Role = "A" | "B";

export interface PairedFrame {
  type: "paired";
  game_id: string;
  partner: string;
  role: Role;
  warmup: boolean;
}

export interface RoundImage {
  image_id: number;
  uri: string;
}

export interface RoundStartFrame {
  type: "round_start";
  round: number; // 0 = warming-up
  total_rounds: number;
  warmup: boolean;
  images: RoundImage[]; // grid order
  highlights: number[];
}

export interface ChatFrame {
  type: "chat";
  text: string;
  author: Role;
}

export interface FeedbackResult {
  image_id: number;
  decision: Decision;
  correct: boolean;
}

export interface FeedbackFrame {
  type: "feedback";
  results: FeedbackResult[];
}

export interface NextRoundFrame {
  type: "next_round";
}

export interface QuestionnaireFrame {
  type: "questionnaire";
  statements: string[];
}

export interface GameEndFrame {
  type: "game_end";
  score: number;
  payment: string;
}

export interface ErrorFrame {
  type: "error";
  code: string;
  detail?: string;
}

export type ServerFrame =
  | PairedFrame
  | RoundStartFrame
  | ChatFrame
  | FeedbackFrame
  | NextRoundFrame
  | QuestionnaireFrame
  | GameEndFrame
  | ErrorFrame;

export type ClientFrame =
  | { type: "join"; worker_id: string }
  | { type: "chat"; text: string }
  | { type: "label"; image_id: number; decision: Decision }
  | { type: "submit" }
  | { type: "next_round" }
  | { type: "questionnaire"; q1: number; q2: number; q3: number };

export const MAX_CHAT_CHARS = 100;
