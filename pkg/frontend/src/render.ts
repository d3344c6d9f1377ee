/** Pure HTML renderers. Everything here formats server data for
 * display; nothing recomputes scores or query strings client-side. */

import { FEEDBACK_CATEGORIES } from "./models.js";
import type {
  FeedbackBody,
  MetricsBody,
  RankedResult,
  SearchResponseBody,
  TraceEntry,
} from "./models.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Display formatting only: the server's score, two decimals. */
export function formatScore(scorePercent: number): string {
  return scorePercent.toFixed(2);
}

/** Relevance ratios display with one decimal (e.g. "80.0"). */
export function formatRatio(percent: number): string {
  return percent.toFixed(1);
}

/** Wrap the server-provided highlight spans in <mark>, escaping every
 * segment. Spans are sorted and non-overlapping by contract. */
export function highlightedAbstract(
  abstract: string,
  highlights: [number, number][],
): string {
  const parts: string[] = [];
  let cursor = 0;
  for (const [start, end] of highlights) {
    if (start < cursor || end > abstract.length) {
      continue; // defensive: never trust out-of-range spans
    }
    parts.push(escapeHtml(abstract.slice(cursor, start)));
    parts.push(`<mark>${escapeHtml(abstract.slice(start, end))}</mark>`);
    cursor = end;
  }
  parts.push(escapeHtml(abstract.slice(cursor)));
  return parts.join("");
}

export function renderSearchKey(renderedQuery: string): string {
  return [
    '<div class="search-key">',
    "<h3>Search key</h3>",
    `<pre class="search-key-text" data-role="search-key">${escapeHtml(renderedQuery)}</pre>`,
    '<button type="button" class="copy-key" data-role="copy-key">Copy to clipboard</button>',
    "</div>",
  ].join("\n");
}

export function renderFeedbackForm(
  queryId: string,
  articleId: string,
  existing?: FeedbackBody,
): string {
  const checkboxes = FEEDBACK_CATEGORIES.map((category) => {
    const checked = existing?.categories?.[category] ? " checked" : "";
    return (
      `<label class="category"><input type="checkbox" name="category" ` +
      `value="${escapeHtml(category)}"${checked}> ${escapeHtml(category)}</label>`
    );
  }).join("\n");
  const relevantChecked = existing?.relevant ? " checked" : "";
  const missing = existing ? escapeHtml(existing.missing_concepts) : "";
  const status = existing ? "Saved" : "";
  return [
    `<form class="feedback-form" data-role="feedback-form" data-query-id="${escapeHtml(queryId)}" ` +
      `data-article-id="${escapeHtml(articleId)}">`,
    "<fieldset><legend>Feedback</legend>",
    checkboxes,
    `<label class="relevant"><input type="checkbox" name="relevant"${relevantChecked}> Relevant</label>`,
    `<textarea name="missing_concepts" placeholder="Missing concepts">${missing}</textarea>`,
    '<button type="submit">Submit feedback</button>',
    `<span class="feedback-status" data-role="feedback-status">${status}</span>`,
    "</fieldset>",
    "</form>",
  ].join("\n");
}

export function renderResultCard(
  result: RankedResult,
  rank: number,
  queryId: string,
  existing?: FeedbackBody,
): string {
  const journal = result.journal ? `<span class="journal">${escapeHtml(result.journal)}</span>` : "";
  return [
    `<article class="result-card" data-article-id="${escapeHtml(result.external_id)}">`,
    `<header><span class="rank">${rank}</span>` +
      `<h3 class="title">${escapeHtml(result.title)}</h3>` +
      `<span class="score" data-role="score">${formatScore(result.score_percent)}</span></header>`,
    `<p class="meta">${escapeHtml(result.external_id)} ${journal}</p>`,
    `<p class="abstract">${highlightedAbstract(result.abstract, result.highlights)}</p>`,
    renderFeedbackForm(queryId, result.external_id, existing),
    "</article>",
  ].join("\n");
}

export function renderResults(
  response: SearchResponseBody,
  judgments: Record<string, FeedbackBody> = {},
): string {
  const cards = response.results
    .map((result, i) =>
      renderResultCard(result, i + 1, response.query_id, judgments[result.external_id]),
    )
    .join("\n");
  return [
    `<section class="results" data-query-id="${escapeHtml(response.query_id)}">`,
    `<p class="result-count">${response.results.length} results</p>`,
    renderSearchKey(response.rendered_query),
    cards,
    "</section>",
  ].join("\n");
}

export function renderTrace(trace: TraceEntry[]): string {
  const rows = trace
    .map((entry) => {
      const removed = entry.removed_entity
        ? `removed <em>${escapeHtml(entry.removed_entity)}</em>`
        : "final";
      return `<li>${entry.hit_count} hits &mdash; ${removed}</li>`;
    })
    .join("\n");
  return `<ol class="trace">${rows}</ol>`;
}

export function renderMetrics(metrics: MetricsBody): string {
  if (metrics.empty) {
    return '<div class="metrics" data-role="metrics"><p>No judged articles yet.</p></div>';
  }
  const perQuery = Object.entries(metrics.per_query)
    .map(
      ([queryId, ratio]) =>
        `<li><code>${escapeHtml(queryId.slice(0, 8))}</code> ` +
        `${formatRatio(ratio)}% of ${metrics.judged[queryId] ?? 0} judged</li>`,
    )
    .join("\n");
  return [
    '<div class="metrics" data-role="metrics">',
    `<p class="overall">Relevance: <strong data-role="overall">${formatRatio(metrics.overall)}</strong>%</p>`,
    `<ul>${perQuery}</ul>`,
    "</div>",
  ].join("\n");
}

export function renderError(message: string, stage: string | null): string {
  const where = stage ? ` (stage: ${escapeHtml(stage)})` : "";
  return `<div class="error-banner" data-role="error">${escapeHtml(message)}${where}</div>`;
}

/** Client-side gate for the query field: a validation message to show,
 * or null when the query may be submitted. */
export function validateQuery(query: string): string | null {
  return query.trim() ? null : "Enter a research question first.";
}

export function renderProgress(stages: string[], done: number): string {
  const items = stages
    .map((stage, i) => {
      const cls = i < done ? "done" : i === done ? "active" : "pending";
      return `<li class="${cls}">${escapeHtml(stage)}</li>`;
    })
    .join("");
  return `<ol class="progress">${items}</ol>`;
}
