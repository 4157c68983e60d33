/** Chronon deadline countdown, driven entirely by the server's numbers. */

export function remainingMs(
  deadlineMs: number,
  openedAtMs: number,
  nowMs: number,
): number {
  if (deadlineMs <= 0) return 0; // untimed chronon: closes on resolution
  return Math.max(0, openedAtMs + deadlineMs - nowMs);
}

export function formatCountdown(ms: number): string {
  if (ms <= 0) return "0.0s";
  return `${(ms / 1000).toFixed(1)}s`;
}

/**
 * Call `tick` roughly every animation frame until the deadline passes.
 * Returns a stop function.
 */
export function startCountdown(
  deadlineMs: number,
  openedAtMs: number,
  tick: (remaining: number) => void,
  intervalMs = 100,
  clock: () => number = Date.now,
): () => void {
  const step = () => {
    const left = remainingMs(deadlineMs, openedAtMs, clock());
    tick(left);
    if (left <= 0) stop();
  };
  const handle = setInterval(step, intervalMs);
  const stop = () => clearInterval(handle);
  step();
  return stop;
}
