/**
 * Per-key trailing-edge throttle for slider overrides.
 *
 * The first push for a key goes out immediately; further pushes inside the
 * window replace a single pending value that is sent when the window ends.
 * At most one send per key per interval, and the newest value always lands.
 */

export class KeyedThrottle<T> {
  private lastSentAt = new Map<string, number>();
  private pending = new Map<string, T>();
  private timers = new Map<string, ReturnType<typeof setTimeout>>();

  constructor(
    private readonly intervalMs: number,
    private readonly send: (key: string, value: T) => void,
    private readonly now: () => number = Date.now,
  ) {}

  push(key: string, value: T): void {
    const at = this.now();
    const last = this.lastSentAt.get(key);
    if (last === undefined || at - last >= this.intervalMs) {
      // This value supersedes any pending flush; cancel it so a starved
      // trailing timer can never double the send rate.
      const timer = this.timers.get(key);
      if (timer !== undefined) {
        clearTimeout(timer);
        this.timers.delete(key);
      }
      this.pending.delete(key);
      this.fire(key, value, at);
      return;
    }
    this.pending.set(key, value);
    if (!this.timers.has(key)) {
      const delay = this.intervalMs - (at - last);
      this.timers.set(key, setTimeout(() => this.flushKey(key), delay));
    }
  }

  /** Pending values that have not been sent yet (newest per key). */
  pendingKeys(): string[] {
    return [...this.pending.keys()];
  }

  dispose(): void {
    for (const timer of this.timers.values()) clearTimeout(timer);
    this.timers.clear();
    this.pending.clear();
  }

  private flushKey(key: string): void {
    this.timers.delete(key);
    const value = this.pending.get(key);
    if (value !== undefined || this.pending.has(key)) {
      this.pending.delete(key);
      this.fire(key, value as T, this.now());
    }
  }

  private fire(key: string, value: T, at: number): void {
    this.lastSentAt.set(key, at);
    this.send(key, value);
  }
}
