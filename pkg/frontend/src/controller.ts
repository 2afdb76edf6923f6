import type { RecommendationCard } from "./cards";
import { activeAlternative, cycleAlternative, groupIntoCards } from "./cards";
import type { BufferSubmitter } from "./debounce";
import { createBufferSubmitter } from "./debounce";
import type {
  BufferResponse,
  FeedbackResponse,
  SessionInfo,
  Sensitivity,
  Verdict,
} from "./types";

export type ControllerStatus = "stopped" | "running";

/** What the controller needs from the HTTP client (satisfied by RecommendClient). */
export interface RecommendApi {
  createSession(sensitivity: Sensitivity): Promise<SessionInfo>;
  submitBuffer(sessionId: string, text: string): Promise<BufferResponse>;
  setSensitivity(sessionId: string, level: Sensitivity): Promise<SessionInfo>;
  sendFeedback(
    sessionId: string,
    recommendationId: string,
    verdict: Verdict
  ): Promise<FeedbackResponse>;
}

export interface ControllerView {
  renderCards(cards: RecommendationCard[]): void;
  setStatus(status: ControllerStatus): void;
  setSensitivity(level: Sensitivity): void;
  insertSnippet(snippet: string): void;
  showError(message: string): void;
}

export interface ControllerOptions {
  debounceMs?: number;
  sensitivity?: Sensitivity;
}

/**
 * UI state machine: start/stop, debounced buffer sync, sensitivity slider,
 * alternative cycling and feedback. All matching and ranking decisions stay
 * on the server; this only displays what comes back, in order.
 */
export class EditorController {
  status: ControllerStatus = "stopped";
  sessionId: string | null = null;
  sensitivity: Sensitivity;
  cards: RecommendationCard[] = [];

  private readonly submitter: BufferSubmitter;
  private lastBuffer = "";

  constructor(
    private readonly api: RecommendApi,
    private readonly view: ControllerView,
    options: ControllerOptions = {}
  ) {
    this.sensitivity = options.sensitivity ?? "medium";
    this.submitter = createBufferSubmitter(
      options.debounceMs ?? 750,
      (text, isCurrent) => this.deliver(text, isCurrent)
    );
  }

  /** Create the session; pressing start twice keeps the first session. */
  async start(): Promise<void> {
    if (this.status === "running") return;
    try {
      const info = await this.api.createSession(this.sensitivity);
      this.sessionId = info.session_id;
      this.status = "running";
      this.view.setStatus(this.status);
    } catch (err) {
      this.view.showError(`could not start: ${describe(err)}`);
    }
  }

  /** End submission and clear the cards; local buffer text is untouched. */
  stop(): void {
    if (this.status === "stopped") return;
    this.submitter.cancel();
    this.sessionId = null;
    this.status = "stopped";
    this.cards = [];
    this.view.renderCards(this.cards);
    this.view.setStatus(this.status);
  }

  /** Debounced entry point for editor keystrokes. */
  bufferChanged(text: string): void {
    if (this.status !== "running") return;
    this.lastBuffer = text;
    this.submitter.schedule(text);
  }

  /** Submit immediately (used by tests and the sensitivity refresh). */
  async submitNow(text: string): Promise<void> {
    if (this.status !== "running") return;
    this.lastBuffer = text;
    await this.submitter.flush(text);
  }

  private async deliver(text: string, isCurrent: () => boolean): Promise<void> {
    if (this.sessionId === null) return;
    try {
      const response = await this.api.submitBuffer(this.sessionId, text);
      if (!isCurrent() || this.status !== "running") return; // a newer buffer won
      this.cards = groupIntoCards(response.recommendations);
      this.view.renderCards(this.cards);
    } catch (err) {
      if (isCurrent()) this.view.showError(`submission failed: ${describe(err)}`);
    }
  }

  /** Slider movement; rejected levels revert the slider. */
  async changeSensitivity(level: Sensitivity): Promise<void> {
    if (this.status !== "running" || this.sessionId === null) return;
    const previous = this.sensitivity;
    try {
      await this.api.setSensitivity(this.sessionId, level);
      this.sensitivity = level;
      this.view.setSensitivity(level);
      await this.submitNow(this.lastBuffer);
    } catch (err) {
      this.view.setSensitivity(previous);
      this.view.showError(`sensitivity rejected: ${describe(err)}`);
    }
  }

  cycle(cardIndex: number, delta: 1 | -1): void {
    const card = this.cards[cardIndex];
    if (!card || card.alternatives.length < 2) return;
    this.cards = this.cards.map((c, i) => (i === cardIndex ? cycleAlternative(c, delta) : c));
    this.view.renderCards(this.cards);
  }

  /**
   * Feedback on the card's active alternative. `deleted` removes the card,
   * `copied` inserts the returned snippet (provenance comment included)
   * into the editor pane.
   */
  async sendFeedback(cardIndex: number, verdict: Verdict): Promise<void> {
    const card = this.cards[cardIndex];
    if (!card || this.sessionId === null) return;
    const alternative = activeAlternative(card);
    try {
      const response = await this.api.sendFeedback(
        this.sessionId,
        alternative.recommendationId,
        verdict
      );
      if (verdict === "copied" && response.snippet) {
        this.view.insertSnippet(response.snippet);
      }
      if (verdict === "deleted") {
        this.cards = this.cards.filter((_, i) => i !== cardIndex);
        this.view.renderCards(this.cards);
      }
    } catch (err) {
      this.view.showError(`feedback failed: ${describe(err)}`);
    }
  }
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : String(err);
}
