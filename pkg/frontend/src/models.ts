/** JSON shapes mirrored one-to-one from the service API. */

export interface SentinelInput {
  title: string;
  abstract?: string;
  source_id?: string | null;
}

export interface SearchRequestBody {
  query: string;
  sentinels: SentinelInput[];
  k?: number;
  n_min?: number;
}

export interface RankedResult {
  external_id: string;
  title: string;
  abstract: string;
  journal: string | null;
  mesh_terms: string[];
  score_percent: number;
  highlights: [number, number][];
}

export interface TraceEntry {
  rendered: string;
  hit_count: number;
  removed_entity: string | null;
}

export interface SearchResponseBody {
  query_id: string;
  rendered_query: string;
  trace: TraceEntry[];
  results: RankedResult[];
  timing_ms: Record<string, number>;
}

export interface FeedbackBody {
  query_id: string;
  article_id: string;
  relevant: boolean;
  categories: Record<string, boolean>;
  missing_concepts: string;
}

export interface MetricsBody {
  overall: number;
  per_query: Record<string, number>;
  judged: Record<string, number>;
  empty: boolean;
}

export interface SessionBody {
  session: {
    query_id: string;
    query_text: string;
    rendered_query: string;
    ranked: { id: string; score: number }[];
    sentinels: SentinelInput[];
    created: string;
  };
  judgments: Record<string, FeedbackBody & { ts: string }>;
}

/** The fixed feedback categories; the form renders exactly these. */
export const FEEDBACK_CATEGORIES = [
  "Patient/Population/Problem",
  "Intervention/Exposure",
  "Comparison",
  "Outcome",
  "Study Design/Research Type",
  "Setting/Location",
  "Phenomenon of Interest",
  "Evaluation",
  "Captured All Relevant Concepts",
  "Other",
] as const;

export type FeedbackCategory = (typeof FEEDBACK_CATEGORIES)[number];
