// Transport-agnostic game client: owns the ViewState, applies guards, and
// emits only frames the server will accept. The browser page and the test
// harness both drive this class; only the `send` callback differs.

import type { ClientFrame, Decision, ServerFrame } from "./protocol.js";
import {
  chatInputGuard,
  chatPhaseAllowed,
  labelGuard,
  questionnaireGuard,
  submitGuard,
} from "./guards.js";
import { applyInput, initialView, type Input, type ViewState } from "./view.js";

export class GameClient {
  view: ViewState = initialView();
  readonly inputs: Input[] = []; // full ordered history, for replay checks
  private submitted = false;
  private acknowledged = false;
  private answered = false;
  private joined = false;

  constructor(private readonly send: (frame: ClientFrame) => void) {}

  private apply(input: Input): void {
    this.view = applyInput(this.view, input);
    this.inputs.push(input);
  }

  onFrame(frame: ServerFrame): void {
    this.apply(frame);
    if (frame.type === "round_start") {
      this.submitted = false;
      this.acknowledged = false;
    }
  }

  join(workerId: string): boolean {
    if (this.joined || workerId.length === 0) return false;
    this.joined = true;
    this.send({ type: "join", worker_id: workerId });
    return true;
  }

  sendChat(text: string): boolean {
    const verdict = chatInputGuard(text);
    if (!verdict.ok || !chatPhaseAllowed(this.view)) return false;
    this.send({ type: "chat", text });
    this.apply({ type: "local_chat", text });
    return true;
  }

  label(imageId: number, decision: Decision): boolean {
    if (this.submitted || !labelGuard(this.view, imageId, decision)) return false;
    this.send({ type: "label", image_id: imageId, decision });
    this.apply({ type: "local_label", imageId, decision });
    return true;
  }

  canSubmit(): boolean {
    return !this.submitted && submitGuard(this.view);
  }

  submit(): boolean {
    if (!this.canSubmit()) return false;
    this.submitted = true;
    this.send({ type: "submit" });
    return true;
  }

  acknowledgeFeedback(): boolean {
    if (this.view.phase !== "feedback" || this.acknowledged) return false;
    this.acknowledged = true;
    this.send({ type: "next_round" });
    return true;
  }

  answerQuestionnaire(q1: number, q2: number, q3: number): boolean {
    if (this.view.phase !== "questionnaire" || this.answered) return false;
    if (!questionnaireGuard(q1, q2, q3)) return false;
    this.answered = true;
    this.send({ type: "questionnaire", q1, q2, q3 });
    return true;
  }
}
