/** DOM wiring for the reviewer console. Pure rendering lives in
 * render.ts; API calls in api.ts. */

import { Api, ApiError } from "./api.js";
import { FEEDBACK_CATEGORIES } from "./models.js";
import type { FeedbackBody, SearchResponseBody, SentinelInput } from "./models.js";
import {
  renderError,
  renderMetrics,
  renderProgress,
  renderResults,
  renderTrace,
  validateQuery,
} from "./render.js";

const api = new Api("");

const PIPELINE_STAGES = ["extract", "expand", "retrieve", "rerank", "persist"];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function readSentinels(): SentinelInput[] {
  const sentinels: SentinelInput[] = [];
  document.querySelectorAll<HTMLElement>(".sentinel-row").forEach((row) => {
    const title = row.querySelector<HTMLInputElement>(".sentinel-title")?.value.trim() ?? "";
    const abstract = row.querySelector<HTMLTextAreaElement>(".sentinel-abstract")?.value ?? "";
    if (title) {
      sentinels.push({ title, abstract });
    }
  });
  return sentinels;
}

function readFeedbackForm(form: HTMLFormElement): FeedbackBody {
  const categories: Record<string, boolean> = {};
  for (const category of FEEDBACK_CATEGORIES) {
    categories[category] = false;
  }
  form.querySelectorAll<HTMLInputElement>('input[name="category"]').forEach((box) => {
    categories[box.value] = box.checked;
  });
  const relevant = form.querySelector<HTMLInputElement>('input[name="relevant"]');
  const missing = form.querySelector<HTMLTextAreaElement>('textarea[name="missing_concepts"]');
  return {
    query_id: form.dataset.queryId ?? "",
    article_id: form.dataset.articleId ?? "",
    relevant: relevant?.checked ?? false,
    categories,
    missing_concepts: missing?.value ?? "",
  };
}

async function refreshMetrics(): Promise<void> {
  try {
    el("metrics-widget").innerHTML = renderMetrics(await api.metrics());
  } catch (error) {
    el("metrics-widget").innerHTML = renderError(String(error), null);
  }
}

function attachFeedbackHandlers(container: HTMLElement): void {
  container.querySelectorAll<HTMLFormElement>('[data-role="feedback-form"]').forEach((form) => {
    form.addEventListener("submit", async (event) => {
      event.preventDefault();
      const status = form.querySelector<HTMLElement>('[data-role="feedback-status"]');
      if (status) status.textContent = "Saving…";
      try {
        await api.submitFeedback(readFeedbackForm(form));
        if (status) status.textContent = "Saved";
        await refreshMetrics();
      } catch (error) {
        // reconcile optimistic state with the server's answer
        if (status) status.textContent = error instanceof ApiError
          ? `Failed: ${error.message}`
          : "Failed";
      }
    });
  });
}

function attachCopyHandler(container: HTMLElement): void {
  const button = container.querySelector<HTMLButtonElement>('[data-role="copy-key"]');
  const key = container.querySelector<HTMLElement>('[data-role="search-key"]');
  if (button && key) {
    button.addEventListener("click", async () => {
      await navigator.clipboard.writeText(key.textContent ?? "");
      button.textContent = "Copied";
    });
  }
}

function showResults(response: SearchResponseBody): void {
  const results = el("results");
  results.innerHTML = renderResults(response);
  el("trace").innerHTML = renderTrace(response.trace);
  attachFeedbackHandlers(results);
  attachCopyHandler(results);
  window.location.hash = `#/session/${response.query_id}`;
}

async function loadSession(queryId: string): Promise<void> {
  const results = el("results");
  try {
    const body = await api.session(queryId);
    const judgments: Record<string, FeedbackBody> = {};
    for (const [articleId, record] of Object.entries(body.judgments)) {
      judgments[articleId] = record;
    }
    const ranked = body.session.ranked;
    results.innerHTML = [
      `<section class="results" data-query-id="${body.session.query_id}">`,
      `<p class="result-count">${ranked.length} stored results</p>`,
      renderResults(
        {
          query_id: body.session.query_id,
          rendered_query: body.session.rendered_query,
          trace: [],
          results: ranked.map((entry) => ({
            external_id: entry.id,
            title: entry.id,
            abstract: "",
            journal: null,
            mesh_terms: [],
            score_percent: entry.score,
            highlights: [],
          })),
          timing_ms: {},
        },
        judgments,
      ),
      "</section>",
    ].join("\n");
    attachFeedbackHandlers(results);
    attachCopyHandler(results);
  } catch (error) {
    if (error instanceof ApiError && error.status === 404) {
      results.innerHTML = renderError(`Unknown session ${queryId}`, null);
    } else {
      results.innerHTML = renderError(String(error), null);
    }
  }
}

function init(): void {
  const form = el<HTMLFormElement>("search-form");
  const queryInput = el<HTMLTextAreaElement>("query-input");
  const validation = el("query-validation");
  const progress = el("progress");

  el("add-sentinel").addEventListener("click", () => {
    const row = document.createElement("div");
    row.className = "sentinel-row";
    row.innerHTML =
      '<input class="sentinel-title" placeholder="Sentinel title">' +
      '<textarea class="sentinel-abstract" placeholder="Sentinel abstract"></textarea>';
    el("sentinels").appendChild(row);
  });

  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const query = queryInput.value.trim();
    const problem = validateQuery(query);
    if (problem) {
      validation.textContent = problem;
      return; // enforced client-side: no request is sent
    }
    validation.textContent = "";
    el("results").innerHTML = "";
    progress.innerHTML = renderProgress(PIPELINE_STAGES, 0);
    try {
      const response = await api.search({
        query,
        sentinels: readSentinels(),
        k: Number(el<HTMLInputElement>("k-input").value) || 5,
        n_min: Number(el<HTMLInputElement>("nmin-input").value) || 20,
      });
      progress.innerHTML = renderProgress(PIPELINE_STAGES, PIPELINE_STAGES.length);
      showResults(response);
    } catch (error) {
      progress.innerHTML = "";
      if (error instanceof ApiError) {
        el("results").innerHTML = renderError(error.message, error.stage);
      } else {
        el("results").innerHTML = renderError(String(error), null);
      }
    }
  });

  void refreshMetrics();

  const sessionMatch = window.location.hash.match(/^#\/session\/(.+)$/);
  if (sessionMatch) {
    void loadSession(sessionMatch[1]);
  }
}

document.addEventListener("DOMContentLoaded", init);
