import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { Api, ApiError } from "../src/api.js";
import type { FeedbackBody, MetricsBody, SearchResponseBody } from "../src/models.js";
import { renderMetrics } from "../src/render.js";

function fixture<T>(name: string): T {
  const path = new URL(`../fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(path, "utf-8")) as T;
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("api client", () => {
  it("posts the search request body unchanged", async () => {
    const recorded = fixture<SearchResponseBody>("search_response.json");
    let captured: { url: string; init?: RequestInit } | null = null;
    const api = new Api("", async (url, init) => {
      captured = { url, init };
      return jsonResponse(200, recorded);
    });
    const response = await api.search({ query: "q", sentinels: [], k: 5, n_min: 5 });
    expect(captured!.url).toBe("/api/search");
    expect(JSON.parse(captured!.init!.body as string)).toEqual({
      query: "q", sentinels: [], k: 5, n_min: 5,
    });
    expect(response.results).toHaveLength(5);
    expect(response.rendered_query).toBe(recorded.rendered_query);
  });

  it("resolves 204 feedback responses with no body", async () => {
    const api = new Api("", async () => new Response(null, { status: 204 }));
    await expect(api.submitFeedback(fixture<FeedbackBody[]>(
      "feedback_submissions.json")[0])).resolves.toBeUndefined();
  });

  it("surfaces validation errors with their messages", async () => {
    const api = new Api("", async () =>
      jsonResponse(400, { error: "RequestInvalid", fields: { query: "must be non-empty" } }));
    await expect(api.search({ query: "", sentinels: [] })).rejects.toThrowError(ApiError);
  });

  it("carries the failing stage from 502 responses", async () => {
    const api = new Api("", async () =>
      jsonResponse(502, { error: "PipelineError", stage: "retrieve",
                          message: "stage 'retrieve': backend error" }));
    try {
      await api.search({ query: "q", sentinels: [] });
      expect.unreachable();
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).status).toBe(502);
      expect((error as ApiError).stage).toBe("retrieve");
    }
  });

  it("maps unknown sessions to a 404 ApiError", async () => {
    const api = new Api("", async () =>
      jsonResponse(404, { error: "UnknownSession", message: "unknown query session" }));
    await expect(api.session("nope")).rejects.toMatchObject({ status: 404 });
  });
});

describe("feedback flow against the recorded API", () => {
  it("submitting the 4-of-5 fixture updates the metrics widget to 80.0", async () => {
    const submissions = fixture<FeedbackBody[]>("feedback_submissions.json");
    const after = fixture<MetricsBody>("metrics_after.json");
    const empty = fixture<MetricsBody>("metrics_empty.json");
    expect(submissions.filter((s) => s.relevant)).toHaveLength(4);

    const accepted: FeedbackBody[] = [];
    const api = new Api("", async (url, init) => {
      if (url === "/api/feedback") {
        accepted.push(JSON.parse(init!.body as string));
        return new Response(null, { status: 204 });
      }
      if (url === "/api/metrics") {
        // the server owns the metric: recorded before/after snapshots
        return jsonResponse(200, accepted.length === submissions.length ? after : empty);
      }
      throw new Error(`unexpected call ${url}`);
    });

    expect(renderMetrics(await api.metrics())).toContain("No judged articles yet.");
    for (const submission of submissions) {
      await api.submitFeedback(submission);
    }
    expect(accepted).toHaveLength(5);
    const widget = renderMetrics(await api.metrics());
    expect(widget).toContain('data-role="overall">80.0</strong>%');
  });
});
