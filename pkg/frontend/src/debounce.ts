export interface BufferSubmitter {
  schedule: (text: string) => void;
  flush: (text: string) => Promise<void>;
  cancel: () => void;
}

/**
 * Debounced buffer submission with latest-wins semantics: scheduling again
 * replaces the pending text, and a newer submission invalidates the result
 * of any older one still in flight (the submit callback receives a ticket
 * check to apply only fresh results).
 */
export function createBufferSubmitter(
  delayMs: number,
  submit: (text: string, isCurrent: () => boolean) => Promise<void>
): BufferSubmitter {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let ticket = 0;

  const cancel = () => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
    ticket += 1; // invalidate anything in flight
  };

  const fire = async (text: string) => {
    ticket += 1;
    const mine = ticket;
    await submit(text, () => ticket === mine);
  };

  const schedule = (text: string) => {
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      void fire(text);
    }, delayMs);
  };

  const flush = async (text: string) => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
    await fire(text);
  };

  return { schedule, flush, cancel };
}
