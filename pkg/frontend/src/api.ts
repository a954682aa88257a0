/**
 * Thin fetch wrapper over the session HTTP API.
 *
 * Every method returns the engine's JSON untouched. Engine rejections
 * surface as EngineError with the server's own detail string, so views
 * can display them verbatim instead of inventing local messages.
 */

import type {
  FavoriteResult,
  PreviewResult,
  QueryView,
  Recommendation,
  ResponseResult,
  SessionInfo,
  SignalParams,
  ValidationResult,
  ValidationView,
} from "./types.js";

export class EngineError extends Error {
  readonly status: number;

  constructor(status: number, detail: string) {
    super(detail);
    this.name = "EngineError";
    this.status = status;
  }
}

export interface CreateSessionOptions {
  budget?: number;
  seed?: number;
  duration_ms?: number;
  strategy?: "info_gain" | "eubo" | "random";
  nominal_noise?: number;
  candidate_count?: number;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class EngineClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;
  private queue: Promise<unknown> = Promise.resolve();

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  /** All requests serialize per client so a session never races itself. */
  private request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const run = async (): Promise<T> => {
      const init: RequestInit = { method, headers: {} };
      if (body !== undefined) {
        init.headers = { "Content-Type": "application/json" };
        init.body = JSON.stringify(body);
      }
      const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
      const payload = await response.json().catch(() => ({}));
      if (!response.ok) {
        const detail =
          typeof (payload as { detail?: unknown }).detail === "string"
            ? (payload as { detail: string }).detail
            : `HTTP ${response.status}`;
        throw new EngineError(response.status, detail);
      }
      return payload as T;
    };
    const next = this.queue.then(run, run);
    this.queue = next.catch(() => undefined);
    return next;
  }

  createSession(options: CreateSessionOptions = {}): Promise<SessionInfo> {
    return this.request("POST", "/sessions", options);
  }

  getQuery(sessionId: string): Promise<QueryView> {
    return this.request("GET", `/sessions/${sessionId}/query`);
  }

  postResponse(
    sessionId: string,
    choice: "A" | "B",
    confidence: number,
    round?: number,
    fallback = false,
  ): Promise<ResponseResult> {
    return this.request("POST", `/sessions/${sessionId}/response`, {
      choice,
      confidence,
      round,
      fallback,
    });
  }

  getRecommendation(sessionId: string): Promise<Recommendation> {
    return this.request("GET", `/sessions/${sessionId}/recommendation`);
  }

  getValidation(sessionId: string): Promise<ValidationView> {
    return this.request("GET", `/sessions/${sessionId}/validation`);
  }

  postValidationResponse(
    sessionId: string,
    pairTag: string,
    chosenSide: "A" | "B",
    fallback = false,
  ): Promise<ValidationResult> {
    return this.request("POST", `/sessions/${sessionId}/validation/response`, {
      pair_tag: pairTag,
      chosen_side: chosenSide,
      fallback,
    });
  }

  postFavorite(sessionId: string, params: SignalParams): Promise<FavoriteResult> {
    return this.request("POST", `/sessions/${sessionId}/favorites`, { params });
  }

  postPreview(sessionId: string, params: SignalParams): Promise<PreviewResult> {
    return this.request("POST", `/sessions/${sessionId}/preview`, { params });
  }

  getLog(sessionId: string): Promise<Record<string, unknown>> {
    return this.request("GET", `/sessions/${sessionId}/log`);
  }
}
