/** Incremental event-stream consumption.
 *
 * The server replays the log from `?from=` and then tails it as
 * server-sent-event frames. This module parses those frames from raw chunks
 * and manages exactly one live connection: reconnecting always resumes from
 * the last applied sequence number, and the reducer's duplicate check keeps
 * application exactly-once.
 */

import type { EventFrame } from "./types.js";

export interface SseFrame {
  id: number | null;
  data: string;
}

/** Stateful parser: feed arbitrary chunk boundaries, get completed frames. */
export function createSseParser(): { push(chunk: string): SseFrame[]; } {
  let buffer = "";
  return {
    push(chunk: string): SseFrame[] {
      buffer += chunk;
      const frames: SseFrame[] = [];
      let boundary = buffer.indexOf("\n\n");
      while (boundary >= 0) {
        const block = buffer.slice(0, boundary);
        buffer = buffer.slice(boundary + 2);
        const frame = parseBlock(block);
        if (frame !== null) {
          frames.push(frame);
        }
        boundary = buffer.indexOf("\n\n");
      }
      return frames;
    },
  };
}

function parseBlock(block: string): SseFrame | null {
  let id: number | null = null;
  const dataLines: string[] = [];
  for (const line of block.split("\n")) {
    if (line.startsWith(":")) {
      continue; // comment / keep-alive
    }
    if (line.startsWith("id:")) {
      const parsed = Number(line.slice(3).trim());
      id = Number.isFinite(parsed) ? parsed : null;
    } else if (line.startsWith("data:")) {
      dataLines.push(line.slice(5).replace(/^ /, ""));
    }
  }
  if (dataLines.length === 0) {
    return null;
  }
  return { id, data: dataLines.join("\n") };
}

export function toEventFrame(frame: SseFrame): EventFrame {
  const parsed = JSON.parse(frame.data) as EventFrame;
  if (typeof parsed.sequence_number !== "number" || typeof parsed.event?.kind !== "string") {
    throw new Error("malformed event frame");
  }
  return parsed;
}

export type StreamStatus = "connecting" | "live" | "closed" | "error";

export interface StreamConfig {
  /** Builds the stream URL for a resume point (exclusive of applied frames). */
  urlFor(fromSeq: number): string;
  /** Last applied sequence number; reconnects resume at this + 1. */
  getLastSeq(): number;
  onFrame(frame: EventFrame): void;
  onStatus?(status: StreamStatus): void;
  fetchImpl?: (input: string, init?: RequestInit) => Promise<Response>;
  /** Delay before an automatic reconnect; 0 disables auto-reconnect. */
  retryDelayMs?: number;
}

/** Owns the tab's single event-stream connection. */
export class EventStreamController {
  private readonly config: StreamConfig;
  private controller: AbortController | null = null;
  private retryTimer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;
  private generation = 0;

  constructor(config: StreamConfig) {
    this.config = config;
  }

  get connected(): boolean {
    return this.controller !== null;
  }

  /** Open the stream, closing any previous connection first. */
  connect(): void {
    this.stopped = false;
    this.closeCurrent();
    const generation = ++this.generation;
    const controller = new AbortController();
    this.controller = controller;
    this.setStatus("connecting");
    const url = this.config.urlFor(this.config.getLastSeq() + 1);
    const fetchImpl = this.config.fetchImpl ?? ((input, init) => fetch(input, init));
    void this.consume(fetchImpl, url, controller, generation);
  }

  /** Stop for good: abort the connection and cancel any pending retry. */
  stop(): void {
    this.stopped = true;
    if (this.retryTimer !== null) {
      clearTimeout(this.retryTimer);
      this.retryTimer = null;
    }
    this.closeCurrent();
    this.setStatus("closed");
  }

  private closeCurrent(): void {
    if (this.controller !== null) {
      this.controller.abort();
      this.controller = null;
    }
  }

  private setStatus(status: StreamStatus): void {
    this.config.onStatus?.(status);
  }

  private async consume(
    fetchImpl: NonNullable<StreamConfig["fetchImpl"]>,
    url: string,
    controller: AbortController,
    generation: number,
  ): Promise<void> {
    try {
      const response = await fetchImpl(url, {
        signal: controller.signal,
        headers: { Accept: "text/event-stream" },
      });
      if (!response.ok || response.body === null) {
        throw new Error(`event stream failed (HTTP ${response.status})`);
      }
      this.setStatus("live");
      const reader = response.body.getReader();
      const decoder = new TextDecoder();
      const parser = createSseParser();
      for (;;) {
        const { done, value } = await reader.read();
        if (done) {
          break;
        }
        for (const sse of parser.push(decoder.decode(value, { stream: true }))) {
          if (generation !== this.generation) {
            return; // a newer connection owns the state now
          }
          this.config.onFrame(toEventFrame(sse));
        }
      }
      this.finish(generation, "closed");
    } catch (error) {
      if (controller.signal.aborted) {
        return; // deliberate close; a newer connection or stop() owns status
      }
      this.finish(generation, "error");
    }
  }

  private finish(generation: number, status: StreamStatus): void {
    if (generation !== this.generation || this.stopped) {
      return;
    }
    this.controller = null;
    this.setStatus(status);
    const delay = this.config.retryDelayMs ?? 1000;
    if (delay > 0) {
      this.retryTimer = setTimeout(() => {
        this.retryTimer = null;
        if (!this.stopped) {
          this.connect();
        }
      }, delay);
    }
  }
}
