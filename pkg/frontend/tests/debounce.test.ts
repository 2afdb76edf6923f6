import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { createBufferSubmitter } from "../src/debounce";

describe("createBufferSubmitter", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("waits out the debounce window and submits the latest text", async () => {
    const sent: string[] = [];
    const submitter = createBufferSubmitter(750, async (text) => {
      sent.push(text);
    });
    submitter.schedule("one");
    await vi.advanceTimersByTimeAsync(500);
    submitter.schedule("two");
    await vi.advanceTimersByTimeAsync(500);
    expect(sent).toEqual([]); // first schedule was replaced before firing
    await vi.advanceTimersByTimeAsync(300);
    expect(sent).toEqual(["two"]);
  });

  it("flush bypasses the timer", async () => {
    const sent: string[] = [];
    const submitter = createBufferSubmitter(750, async (text) => {
      sent.push(text);
    });
    submitter.schedule("pending");
    await submitter.flush("now");
    expect(sent).toEqual(["now"]);
    await vi.advanceTimersByTimeAsync(1000);
    expect(sent).toEqual(["now"]); // the scheduled one was cancelled
  });

  it("cancel stops pending submissions and stales in-flight ones", async () => {
    let resolveCall: (() => void) | null = null;
    const outcomes: boolean[] = [];
    const submitter = createBufferSubmitter(100, async (_text, isCurrent) => {
      await new Promise<void>((resolve) => {
        resolveCall = resolve;
      });
      outcomes.push(isCurrent());
    });
    void submitter.flush("slow");
    submitter.cancel();
    resolveCall!();
    await vi.runAllTimersAsync();
    expect(outcomes).toEqual([false]); // response arrived after cancellation

    submitter.schedule("never");
    submitter.cancel();
    await vi.advanceTimersByTimeAsync(500);
    expect(outcomes).toEqual([false]);
  });

  it("a newer submission invalidates an older in-flight one", async () => {
    const applied: string[] = [];
    const resolvers = new Map<string, () => void>();
    const submitter = createBufferSubmitter(10, async (text, isCurrent) => {
      await new Promise<void>((resolve) => {
        resolvers.set(text, resolve);
      });
      if (isCurrent()) applied.push(text);
    });
    void submitter.flush("old");
    void submitter.flush("new");
    resolvers.get("new")!();
    resolvers.get("old")!();
    await vi.runAllTimersAsync();
    expect(applied).toEqual(["new"]);
  });
});
