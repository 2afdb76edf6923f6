/**
 * Contract test against a real service instance running the planted-pattern
 * models: typing a planted method produces a card with that method's
 * signature as the LHS, arrows cycle alternatives, all feedback verdicts
 * land in the journal, and the low preset offers a subset of high's cards.
 */

import { execFileSync, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { RecommendClient } from "../src/api";
import { offeredCodes, type RecommendationCard } from "../src/cards";
import { EditorController, type ControllerView } from "../src/controller";
import type { Sensitivity } from "../src/types";

const PORT = 8531;
const BASE = `http://127.0.0.1:${PORT}`;
const FRONTEND_ROOT = join(dirname(fileURLToPath(import.meta.url)), "..");

let server: ChildProcess | null = null;
let outDir = "";
let fixture: { buffer: string; menuSignature: string; prefsSignature: string };

function journalEntries(): unknown[] {
  try {
    return readFileSync(join(outDir, "feedback.jsonl"), "utf-8")
      .split("\n")
      .filter((line) => line.trim())
      .map((line) => JSON.parse(line));
  } catch {
    return [];
  }
}

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${BASE}/health`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 250));
  }
  throw new Error(`service did not come up on ${BASE}`);
}

class HeadlessView implements ControllerView {
  cards: RecommendationCard[] = [];
  snippets: string[] = [];
  errors: string[] = [];
  renderCards(cards: RecommendationCard[]) {
    this.cards = cards;
  }
  setStatus() {}
  setSensitivity() {}
  insertSnippet(snippet: string) {
    this.snippets.push(snippet);
  }
  showError(message: string) {
    this.errors.push(message);
  }
}

function makeController(sensitivity: Sensitivity) {
  const view = new HeadlessView();
  const controller = new EditorController(new RecommendClient(BASE), view, {
    sensitivity,
    debounceMs: 50,
  });
  return { controller, view };
}

beforeAll(async () => {
  outDir = mkdtempSync(join(tmpdir(), "nextmethod-contract-"));
  execFileSync("python3", [join(FRONTEND_ROOT, "scripts", "make_fixture.py"), outDir], {
    stdio: "inherit",
  });
  fixture = JSON.parse(readFileSync(join(outDir, "fixture.json"), "utf-8"));
  server = spawn(
    "python3",
    [
      "-m",
      "nextmethod.cli",
      "serve",
      "--presets",
      `high=${outDir}/high.model,medium=${outDir}/medium.model,low=${outDir}/low.model`,
      "--port",
      String(PORT),
      "--data-dir",
      outDir,
    ],
    { stdio: "inherit" }
  );
  await waitForHealth(60_000);
}, 180_000);

afterAll(() => {
  server?.kill("SIGTERM");
});

describe("service contract", () => {
  it("typing planted methods yields cards whose LHS is the typed method", async () => {
    const { controller, view } = makeController("high");
    await controller.start();
    await controller.submitNow(fixture.buffer);
    expect(view.errors).toEqual([]);
    expect(controller.cards.length).toBe(2);
    const lhsGroups = controller.cards.map((c) => c.lhsSignatures.join(","));
    expect(lhsGroups).toContain(fixture.menuSignature);
    expect(lhsGroups).toContain(fixture.prefsSignature);
  });

  it("arrows cycle through a card's alternatives and wrap", async () => {
    const { controller } = makeController("high");
    await controller.start();
    await controller.submitNow(fixture.buffer);
    const index = controller.cards.findIndex((c) => c.alternatives.length === 2);
    expect(index).toBeGreaterThanOrEqual(0);
    const card = controller.cards[index];
    const codes = card.alternatives.map((a) => a.code);
    expect(card.alternatives[0].confidence).toBeGreaterThan(card.alternatives[1].confidence);
    controller.cycle(index, 1);
    expect(controller.cards[index].activeIndex).toBe(1);
    controller.cycle(index, 1);
    expect(controller.cards[index].activeIndex).toBe(0);
    expect(controller.cards[index].alternatives.map((a) => a.code)).toEqual(codes);
  });

  it("all three feedback actions append journal entries", async () => {
    const { controller, view } = makeController("high");
    await controller.start();
    await controller.submitNow(fixture.buffer);
    const before = journalEntries().length;

    await controller.sendFeedback(0, "useful");
    await controller.sendFeedback(0, "copied");
    expect(view.snippets).toHaveLength(1);
    expect(view.snippets[0].startsWith("// Source:")).toBe(true);
    await controller.sendFeedback(0, "deleted");

    const entries = journalEntries();
    expect(entries.length).toBe(before + 3);
    const verdicts = entries.slice(-3).map((e) => (e as { verdict: string }).verdict);
    expect(verdicts).toEqual(["useful", "copied", "deleted"]);
  });

  it("low sensitivity offers a subset of high's cards on the same buffer", async () => {
    const high = makeController("high");
    await high.controller.start();
    await high.controller.submitNow(fixture.buffer);
    const low = makeController("low");
    await low.controller.start();
    await low.controller.submitNow(fixture.buffer);

    const highCodes = offeredCodes(high.controller.cards);
    const lowCodes = offeredCodes(low.controller.cards);
    expect(lowCodes.size).toBeGreaterThan(0);
    expect(lowCodes.size).toBeLessThan(highCodes.size);
    for (const code of lowCodes) {
      expect(highCodes.has(code)).toBe(true);
    }
  });
});
