// Transcript polling: the API is buffered request/response, so while a
// message or run is in flight the view refreshes on a fixed interval.

export const POLL_INTERVAL_MS = 2000;

export interface PollHandle {
  stop(): void;
}

// Calls `tick` every `intervalMs` until it resolves false or stop() is
// called. Errors from `tick` stop the loop (callers surface them as
// notices).
export function pollWhile(
  tick: () => Promise<boolean>,
  intervalMs: number = POLL_INTERVAL_MS,
  schedule: (fn: () => void, ms: number) => unknown = setTimeout,
): PollHandle {
  let active = true;
  const loop = async () => {
    if (!active) return;
    let keepGoing = false;
    try {
      keepGoing = await tick();
    } catch {
      active = false;
      return;
    }
    if (active && keepGoing) schedule(loop, intervalMs);
  };
  schedule(loop, intervalMs);
  return {
    stop() {
      active = false;
    },
  };
}
