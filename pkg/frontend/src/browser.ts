// DOM wiring for the single-page client. The page is re-rendered from the
// ViewState after every input; all game legality lives in the guards.

import { GameClient } from "./client.js";
import type { Decision, ServerFrame } from "./protocol.js";
import { MAX_CHAT_CHARS } from "./protocol.js";
import { chatInputGuard, submitGuard } from "./guards.js";
import type { Tile } from "./view.js";

const BAR_COLORS: Record<Tile["bar"], string> = {
  greyed: "#c7c7c7",
  "highlighted-unlabelled": "#f4c542",
  "labelled-common": "#f4c542",
  "labelled-different": "#f4c542",
  "feedback-green": "#3cb043",
  "feedback-red": "#d9534f",
};

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

export function start(root: HTMLElement, serverUrl: string, workerId: string): void {
  const socket = new WebSocket(serverUrl);
  const client = new GameClient((frame) => socket.send(JSON.stringify(frame)));
  const likert = [0, 0, 0];

  socket.addEventListener("open", () => {
    client.join(workerId);
    render();
  });
  socket.addEventListener("message", (event) => {
    client.onFrame(JSON.parse(String(event.data)) as ServerFrame);
    render();
  });
  socket.addEventListener("close", () => {
    if (client.view.phase !== "done" && client.view.phase !== "aborted") {
      client.view = { ...client.view, errorBanner: "Connection lost." };
      render();
    }
  });

  function labelTile(imageId: number, decision: Decision): void {
    if (client.label(imageId, decision)) render();
  }

  function tileNode(tile: Tile): HTMLElement {
    const bar = el("div", {
      class: "bar",
      style: `background:${BAR_COLORS[tile.bar]};`,
    });
    if (tile.highlighted && client.view.phase === "round") {
      for (const decision of ["common", "different"] as const) {
        const radio = el("input", {
          type: "radio",
          name: `decision-${tile.imageId}`,
        }) as HTMLInputElement;
        radio.checked = tile.decision === decision;
        radio.disabled = tile.decision !== null; // selection is final
        radio.addEventListener("change", () => labelTile(tile.imageId, decision));
        bar.append(el("label", {}, radio, decision));
      }
    }
    return el(
      "figure",
      { class: "tile" },
      el("img", { src: tile.uri, alt: `image ${tile.imageId}` }),
      bar,
    );
  }

  function render(): void {
    const view = client.view;
    root.replaceChildren();
    root.append(el("h2", {}, view.progressLabel));
    if (view.errorBanner) {
      root.append(el("div", { class: "banner" }, view.errorBanner));
    }

    if (view.phase === "lobby") {
      root.append(el("p", {}, "Waiting to be paired…"));
      return;
    }

    if (view.tiles.length > 0) {
      const grid = el("div", { class: "grid" });
      view.tiles.forEach((tile) => grid.append(tileNode(tile)));
      root.append(grid);
      const submit = el("button", {}, "Submit") as HTMLButtonElement;
      submit.disabled = !(submitGuard(view) && client.canSubmit());
      submit.addEventListener("click", () => {
        if (client.submit()) render();
      });
      root.append(submit);
    }

    if (view.phase === "feedback") {
      const next = el("button", {}, "Continue") as HTMLButtonElement;
      next.addEventListener("click", () => {
        if (client.acknowledgeFeedback()) render();
      });
      root.append(next);
    }

    if (view.phase === "questionnaire") {
      const form = el("div", { class: "questionnaire" });
      view.statements.forEach((statement, index) => {
        const row = el("div", {}, el("span", {}, statement));
        for (let score = 1; score <= 5; score++) {
          const radio = el("input", {
            type: "radio",
            name: `q${index}`,
          }) as HTMLInputElement;
          radio.addEventListener("change", () => {
            likert[index] = score;
          });
          row.append(el("label", {}, radio, String(score)));
        }
        form.append(row);
      });
      const done = el("button", {}, "Finish") as HTMLButtonElement;
      done.addEventListener("click", () => {
        const [q1 = 0, q2 = 0, q3 = 0] = likert;
        if (client.answerQuestionnaire(q1, q2, q3)) render();
      });
      root.append(form, done);
    }

    if (view.phase === "done") {
      root.append(
        el("p", {}, `Score: ${view.score} / 30`),
        el("p", {}, `Payment: $${view.payment}`),
      );
    }

    // chat panel (live in rounds and on the feedback screen)
    const log = el("div", { class: "chat-log" });
    view.chat.forEach((line) =>
      log.append(el("p", {}, `${line.author === "me" ? "you" : line.author}: ${line.text}`)),
    );
    const input = el("input", {
      type: "text",
      maxlength: String(MAX_CHAT_CHARS),
      placeholder: "Describe one image per message…",
    }) as HTMLInputElement;
    const counter = el("span", { class: "counter" }, `0/${MAX_CHAT_CHARS}`);
    input.addEventListener("input", () => {
      counter.textContent = `${input.value.length}/${MAX_CHAT_CHARS}`;
    });
    const sendButton = el("button", {}, "Send") as HTMLButtonElement;
    sendButton.addEventListener("click", () => {
      if (chatInputGuard(input.value).ok && client.sendChat(input.value)) {
        input.value = "";
        render();
      }
    });
    root.append(log, el("div", { class: "chat-input" }, input, counter, sendButton));
  }

  render();
}
