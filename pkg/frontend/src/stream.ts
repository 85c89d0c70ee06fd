/**
 * NDJSON telemetry stream reader with automatic resume.
 *
 * On a network drop the stream reconnects with exponential backoff,
 * resubscribing from the tick after the last one delivered, so consumers
 * see every frame exactly once and in order across reconnects.
 */

import type { TelemetryMessage } from "./types.js";

export type StreamStatus = "connecting" | "live" | "reconnecting" | "closed";

export interface StreamCallbacks {
  onMessage(message: TelemetryMessage): void;
  onStatus?(status: StreamStatus, detail?: string): void;
}

export interface StreamOptions {
  baseUrl: string;
  sessionId: string;
  fromTick?: number;
  callbacks: StreamCallbacks;
  fetchImpl?: typeof fetch;
  /** Backoff base delay; exposed for tests. */
  backoffBaseMs?: number;
  backoffCapMs?: number;
  maxRetries?: number;
  sleep?: (ms: number) => Promise<void>;
}

export interface StreamHandle {
  close(): void;
  done: Promise<void>;
}

export function computeBackoffMs(attempt: number, baseMs = 250, capMs = 5000): number {
  return Math.min(capMs, baseMs * 2 ** Math.max(0, attempt));
}

/** Split a byte stream into complete newline-terminated lines. */
export async function* ndjsonLines(
  body: ReadableStream<Uint8Array>,
): AsyncGenerator<string> {
  const reader = body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  try {
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      for (;;) {
        const index = buffer.indexOf("\n");
        if (index < 0) break;
        const line = buffer.slice(0, index).trim();
        buffer = buffer.slice(index + 1);
        if (line) yield line;
      }
    }
    const tail = (buffer + decoder.decode()).trim();
    if (tail) yield tail;
  } finally {
    reader.releaseLock();
  }
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export function openTelemetryStream(options: StreamOptions): StreamHandle {
  const fetchImpl = options.fetchImpl ?? fetch;
  const sleep = options.sleep ?? defaultSleep;
  const maxRetries = options.maxRetries ?? 8;
  let closed = false;
  let lastTick: number | null = null;
  let controller: AbortController | null = null;

  const notify = (status: StreamStatus, detail?: string) =>
    options.callbacks.onStatus?.(status, detail);

  const streamUrl = (fromTick: number | undefined) => {
    const query = fromTick === undefined ? "" : `?from_tick=${fromTick}`;
    return `${options.baseUrl}/sessions/${options.sessionId}/stream${query}`;
  };

  const done = (async () => {
    let attempt = 0;
    let fromTick = options.fromTick;
    let sawFinished = false;
    notify("connecting");
    while (!closed && !sawFinished) {
      controller = new AbortController();
      try {
        const response = await fetchImpl(streamUrl(fromTick), {
          signal: controller.signal,
        });
        if (!response.ok || !response.body) {
          throw new Error(`stream request failed: ${response.status}`);
        }
        notify("live", attempt > 0 ? "reconnected" : undefined);
        attempt = 0;
        for await (const line of ndjsonLines(response.body)) {
          const message = JSON.parse(line) as TelemetryMessage;
          if (message.type === "frame") {
            // Drop anything not strictly after the last delivered tick so a
            // resumed stream can never reorder or duplicate.
            if (lastTick !== null && message.tick <= lastTick) continue;
            lastTick = message.tick;
          }
          options.callbacks.onMessage(message);
          if (message.type === "session_event" && message.event === "finished") {
            sawFinished = true;
          }
        }
        if (sawFinished || closed) break;
        // Server closed without a finished event: treat as a drop.
        throw new Error("stream ended unexpectedly");
      } catch (error) {
        if (closed) break;
        attempt += 1;
        if (attempt > maxRetries) {
          notify("closed", `gave up after ${maxRetries} retries`);
          return;
        }
        fromTick = lastTick === null ? options.fromTick : lastTick + 1;
        notify("reconnecting", String(error));
        await sleep(computeBackoffMs(attempt - 1, options.backoffBaseMs,
          options.backoffCapMs));
      }
    }
    notify("closed");
  })();

  return {
    close() {
      closed = true;
      controller?.abort();
    },
    done,
  };
}
