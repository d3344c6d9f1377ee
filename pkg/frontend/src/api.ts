/** Thin typed client for the litsearch HTTP API. */

import type {
  FeedbackBody,
  MetricsBody,
  SearchRequestBody,
  SearchResponseBody,
  SessionBody,
} from "./models.js";

export class ApiError extends Error {
  status: number;
  stage: string | null;

  constructor(status: number, message: string, stage: string | null = null) {
    super(message);
    this.status = status;
    this.stage = stage;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Api {
  private baseUrl: string;
  private fetchFn: FetchLike;

  constructor(baseUrl = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.baseUrl = baseUrl.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (response.status === 204) {
      return undefined as T;
    }
    if (!response.ok) {
      let message = `${response.status}`;
      let stage: string | null = null;
      try {
        const body = await response.json();
        stage = body.stage ?? null;
        message = body.message ?? body.error ?? JSON.stringify(body.fields ?? body);
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, message, stage);
    }
    return (await response.json()) as T;
  }

  search(body: SearchRequestBody): Promise<SearchResponseBody> {
    return this.request("/api/search", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  session(queryId: string): Promise<SessionBody> {
    return this.request(`/api/session/${encodeURIComponent(queryId)}`);
  }

  submitFeedback(body: FeedbackBody): Promise<void> {
    return this.request("/api/feedback", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  metrics(): Promise<MetricsBody> {
    return this.request("/api/metrics");
  }

  health(): Promise<Record<string, unknown>> {
    return this.request("/api/health");
  }
}
