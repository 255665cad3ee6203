/** Typed HTTP client for the service API. The UI talks to the server only
 * through these calls plus the event stream in stream.ts. */

import type {
  ApiErrorBody,
  ExerciseResponse,
  IntakeForm,
  MaterialResponse,
  MessageResponse,
  ReportInfo,
  SessionDescriptor,
  SubmissionResponse,
} from "./types.js";

/** A non-2xx response, carrying the server's error envelope. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: unknown;

  constructor(status: number, code: string, message: string, detail?: unknown) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.detail = detail;
  }

  get isTurnLimit(): boolean {
    return this.code === "turn_limit" || this.status === 429;
  }
}

export function apiErrorFromBody(status: number, body: unknown): ApiError {
  const envelope = (body ?? {}) as Partial<ApiErrorBody>;
  const error = envelope.error;
  if (error && typeof error.code === "string" && typeof error.message === "string") {
    return new ApiError(status, error.code, error.message, error.detail);
  }
  return new ApiError(status, "internal", `unexpected server response (HTTP ${status})`);
}

/** Human-readable banner text for a failed call. */
export function surfaceError(error: unknown): string {
  if (error instanceof ApiError) {
    return error.isTurnLimit ? `Turn limit: ${error.message}` : `${error.code}: ${error.message}`;
  }
  if (error instanceof Error) {
    return error.message;
  }
  return String(error);
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = "", fetchImpl: FetchLike = (input, init) => fetch(input, init)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchImpl = fetchImpl;
  }

  eventsUrl(sessionId: string, fromSeq: number, follow?: 0): string {
    const params = new URLSearchParams({ from: String(fromSeq) });
    if (follow === 0) {
      params.set("follow", "0");
    }
    return `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/events?${params.toString()}`;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const payload = await response.json().catch(() => null);
    if (!response.ok) {
      throw apiErrorFromBody(response.status, payload);
    }
    return payload as T;
  }

  createSession(intake: IntakeForm): Promise<SessionDescriptor> {
    return this.request("POST", "/sessions", intake);
  }

  getSession(sessionId: string): Promise<SessionDescriptor> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  sendMessage(sessionId: string, text: string): Promise<MessageResponse> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/messages`, { text });
  }

  generateMaterial(sessionId: string, topic?: string): Promise<MaterialResponse> {
    return this.request(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/material`,
      topic ? { topic } : {},
    );
  }

  beginExercise(sessionId: string): Promise<ExerciseResponse> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/exercises`, {});
  }

  submitCode(
    sessionId: string,
    exerciseId: string,
    stepIndex: number,
    source: string,
  ): Promise<SubmissionResponse> {
    return this.request(
      "POST",
      `/sessions/${encodeURIComponent(sessionId)}/exercises/${encodeURIComponent(exerciseId)}/submissions`,
      { step_index: stepIndex, source },
    );
  }

  generateReport(sessionId: string): Promise<ReportInfo> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/report`, {});
  }

  /** Raw report bytes; the download writes these bytes unchanged. */
  async fetchReportBytes(sessionId: string): Promise<Uint8Array> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/sessions/${encodeURIComponent(sessionId)}/report`,
      { method: "GET" },
    );
    if (!response.ok) {
      const payload = await response.json().catch(() => null);
      throw apiErrorFromBody(response.status, payload);
    }
    return new Uint8Array(await response.arrayBuffer());
  }
}

/** Wrap report bytes for a browser download without transforming them. */
export function reportBlob(bytes: Uint8Array): Blob {
  // Copy into a plain ArrayBuffer-backed view; content is byte-identical.
  const view: Uint8Array<ArrayBuffer> = new Uint8Array(bytes);
  return new Blob([view], { type: "text/markdown; charset=utf-8" });
}
