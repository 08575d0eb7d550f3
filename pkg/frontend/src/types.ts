// Payload shapes for the monitor service HTTP API. Field names mirror the
// JSON emitted by the service verbatim; the UI never invents or renames them.

export const TAB_NAMES = ["report_in_region", "negative", "report_no_geo"] as const;

export type TabName = (typeof TAB_NAMES)[number];

export interface TabRow {
  post_id: string;
  text: string;
  created_at: string;
  author_location_text: string | null;
  author_bio: string | null;
  author_handle: string;
  score: number | null;
  matched_region: string | null;
  url: string | null;
  interacted: boolean;
  avatar_url?: string | null;
}

export interface TabPage {
  tab: string;
  rows: TabRow[];
  next_cursor: string | null;
  total: number;
}

export interface StatusPayload {
  last_success_at: string | null;
  last_batch_size: number;
  consecutive_failures: number;
  poll_interval: number;
}

export interface InteractionReceipt {
  post_id: string;
  region: string;
  sent_at: string;
  template_id: string;
  operator: string;
  rendered_text: string;
}

export interface KeywordAck {
  query: string;
}

export interface KeywordRejection {
  error: string;
  position: number;
}

export type KeywordResult =
  | { ok: true; query: string }
  | { ok: false; error: string; position: number };

export type ReplyOutcome = "sent" | "conflict" | "failed" | "skipped";
