import { describe, expect, it } from "vitest";

import { GameClient } from "../src/client.js";
import { chatInputGuard, labelGuard, submitGuard } from "../src/guards.js";
import type { ClientFrame, RoundStartFrame } from "../src/protocol.js";
import { applyInput, initialView } from "../src/view.js";

function roundStart(highlights: number[], images: number[] = [1, 2, 3, 4, 5, 6], warmup = false): RoundStartFrame {
  return {
    type: "round_start",
    round: warmup ? 0 : 1,
    total_rounds: 5,
    warmup,
    images: images.map((i) => ({ image_id: i, uri: "" })),
    highlights,
  };
}

describe("chatInputGuard", () => {
  it("accepts exactly 100 characters", () => {
    expect(chatInputGuard("x".repeat(100)).ok).toBe(true);
  });
  it("rejects 101 characters", () => {
    expect(chatInputGuard("x".repeat(101)).ok).toBe(false);
  });
  it("rejects empty messages", () => {
    expect(chatInputGuard("").ok).toBe(false);
  });
});

describe("submitGuard", () => {
  it("is false with two of three labelled, true with all three", () => {
    let view = applyInput(initialView(), roundStart([1, 3, 5]));
    view = applyInput(view, { type: "local_label", imageId: 1, decision: "common" });
    view = applyInput(view, { type: "local_label", imageId: 3, decision: "different" });
    expect(submitGuard(view)).toBe(false);
    view = applyInput(view, { type: "local_label", imageId: 5, decision: "common" });
    expect(submitGuard(view)).toBe(true);
  });

  it("warming-up page with both of two highlights labelled is submittable", () => {
    let view = applyInput(initialView(), roundStart([101, 102], [101, 102, 103], true));
    view = applyInput(view, { type: "local_label", imageId: 101, decision: "common" });
    view = applyInput(view, { type: "local_label", imageId: 102, decision: "different" });
    expect(submitGuard(view)).toBe(true);
  });
});

describe("labelGuard", () => {
  it("rejects non-highlighted tiles and repeated decisions", () => {
    let view = applyInput(initialView(), roundStart([1, 3, 5]));
    expect(labelGuard(view, 2, "common")).toBe(false);
    expect(labelGuard(view, 1, "common")).toBe(true);
    view = applyInput(view, { type: "local_label", imageId: 1, decision: "common" });
    expect(labelGuard(view, 1, "different")).toBe(false); // selection is final
  });
});

describe("GameClient emission discipline", () => {
  function harness() {
    const sent: ClientFrame[] = [];
    const client = new GameClient((frame) => sent.push(frame));
    return { sent, client };
  }

  it("never emits unguarded frames", () => {
    const { sent, client } = harness();
    client.join("w1");
    expect(client.sendChat("hello")).toBe(false); // not in a round yet
    client.onFrame({ type: "paired", game_id: "g", partner: "P", role: "A", warmup: false });
    client.onFrame(roundStart([1, 3, 5]));
    expect(client.sendChat("")).toBe(false);
    expect(client.sendChat("y".repeat(101))).toBe(false);
    expect(client.label(2, "common")).toBe(false);
    expect(client.submit()).toBe(false); // nothing labelled
    expect(client.label(1, "common")).toBe(true);
    expect(client.label(1, "different")).toBe(false); // final
    expect(client.label(3, "common")).toBe(true);
    expect(client.label(5, "different")).toBe(true);
    expect(client.submit()).toBe(true);
    expect(client.submit()).toBe(false); // barrier: only once
    expect(client.label(5, "common")).toBe(false); // no revision after submit
    expect(sent.map((f) => f.type)).toEqual([
      "join", "label", "label", "label", "submit",
    ]);
  });

  it("chat stays available on the feedback screen, acks only once", () => {
    const { sent, client } = harness();
    client.join("w1");
    client.onFrame(roundStart([1, 3, 5]));
    client.label(1, "common");
    client.label(3, "common");
    client.label(5, "common");
    client.submit();
    client.onFrame({ type: "feedback", results: [] });
    expect(client.sendChat("oops, my mistake")).toBe(true);
    expect(client.acknowledgeFeedback()).toBe(true);
    expect(client.acknowledgeFeedback()).toBe(false);
    expect(sent.filter((f) => f.type === "next_round")).toHaveLength(1);
  });

  it("questionnaire answers validated and sent once", () => {
    const { sent, client } = harness();
    client.join("w1");
    client.onFrame({ type: "questionnaire", statements: ["a", "b", "c"] });
    expect(client.answerQuestionnaire(0, 3, 3)).toBe(false);
    expect(client.answerQuestionnaire(6, 3, 3)).toBe(false);
    expect(client.answerQuestionnaire(5, 4, 3)).toBe(true);
    expect(client.answerQuestionnaire(5, 4, 3)).toBe(false);
    expect(sent.filter((f) => f.type === "questionnaire")).toHaveLength(1);
  });
});
