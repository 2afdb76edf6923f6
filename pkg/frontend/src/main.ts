import { RecommendClient } from "./api";
import type { RecommendationCard } from "./cards";
import { EditorController } from "./controller";
import type { Sensitivity } from "./types";

const LEVELS: Sensitivity[] = ["low", "medium", "high"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function main(): void {
  const pane = el<HTMLTextAreaElement>("code-pane");
  const cardsBox = el<HTMLDivElement>("cards");
  const startBtn = el<HTMLButtonElement>("start");
  const stopBtn = el<HTMLButtonElement>("stop");
  const slider = el<HTMLInputElement>("sensitivity");
  const sliderLabel = el<HTMLSpanElement>("sensitivity-label");
  const banner = el<HTMLDivElement>("banner");
  const serverInput = el<HTMLInputElement>("server-url");
  const sessionLabel = el<HTMLSpanElement>("session-label");

  let controller = makeController(serverInput.value);

  function makeController(baseUrl: string): EditorController {
    return new EditorController(new RecommendClient(baseUrl), {
      renderCards,
      setStatus(status) {
        startBtn.disabled = status === "running";
        stopBtn.disabled = status === "stopped";
        slider.disabled = status === "stopped";
        serverInput.disabled = status === "running";
        banner.textContent = "";
      },
      setSensitivity(level) {
        slider.value = String(LEVELS.indexOf(level));
        sliderLabel.textContent = level;
      },
      insertSnippet(snippet) {
        const sep = pane.value.endsWith("\n") || pane.value === "" ? "" : "\n\n";
        pane.value = pane.value + sep + snippet + "\n";
        pane.dispatchEvent(new Event("input"));
      },
      showError(message) {
        banner.textContent = message;
      },
    });
  }

  function renderCards(cards: RecommendationCard[]): void {
    cardsBox.replaceChildren();
    cards.forEach((card, index) => {
      cardsBox.appendChild(renderCard(card, index));
    });
    if (cards.length === 0) {
      const empty = document.createElement("p");
      empty.className = "empty";
      empty.textContent = "No recommendations yet.";
      cardsBox.appendChild(empty);
    }
  }

  function renderCard(card: RecommendationCard, index: number): HTMLElement {
    const alt = card.alternatives[card.activeIndex];
    const box = document.createElement("section");
    box.className = "card";

    const header = document.createElement("header");
    header.textContent = `Because you wrote: ${card.lhsSignatures.join(", ")}`;
    box.appendChild(header);

    const nav = document.createElement("div");
    nav.className = "nav";
    const prev = document.createElement("button");
    prev.textContent = "‹";
    prev.disabled = card.alternatives.length < 2;
    prev.onclick = () => controller.cycle(index, -1);
    const counter = document.createElement("span");
    counter.textContent = `${card.activeIndex + 1}/${card.alternatives.length}  (confidence ${alt.confidence.toFixed(2)})`;
    const next = document.createElement("button");
    next.textContent = "›";
    next.disabled = card.alternatives.length < 2;
    next.onclick = () => controller.cycle(index, 1);
    nav.append(prev, counter, next);
    box.appendChild(nav);

    const code = document.createElement("pre");
    code.textContent = alt.code;
    box.appendChild(code);

    const actions = document.createElement("div");
    actions.className = "actions";
    for (const [label, verdict] of [
      ["Useful", "useful"],
      ["Not useful", "not-useful"],
      ["Copy", "copied"],
      ["Delete", "deleted"],
    ] as const) {
      const btn = document.createElement("button");
      btn.textContent = label;
      btn.onclick = () => void controller.sendFeedback(index, verdict);
      actions.appendChild(btn);
    }
    box.appendChild(actions);
    return box;
  }

  startBtn.onclick = () => {
    controller = makeController(serverInput.value);
    controller.sensitivity = LEVELS[Number(slider.value)];
    void controller.start().then(() => {
      if (controller.status === "running") {
        sessionLabel.textContent = `session ${controller.sessionId}`;
        if (pane.value.trim()) controller.bufferChanged(pane.value);
      }
    });
  };
  stopBtn.onclick = () => {
    controller.stop();
    sessionLabel.textContent = "";
  };
  pane.addEventListener("input", () => controller.bufferChanged(pane.value));
  slider.oninput = () => {
    const level = LEVELS[Number(slider.value)];
    sliderLabel.textContent = level;
    void controller.changeSensitivity(level);
  };

  stopBtn.disabled = true;
  slider.disabled = true;
  sliderLabel.textContent = LEVELS[Number(slider.value)];
}

main();
