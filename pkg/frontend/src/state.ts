// Pure view-state model for the triage console. Every transition is a plain
// function from old state to new state so behaviour is testable without a
// browser; the DOM layer only ever renders the latest snapshot.

import { TAB_NAMES } from "./types.js";
import type { StatusPayload, TabName, TabPage, TabRow } from "./types.js";

export interface RowState extends TabRow {
  /** An interaction POST for this row is in flight; blocks further sends. */
  pending: boolean;
  /** Non-fatal per-row message (e.g. a conflict notice). */
  notice: string | null;
}

export interface TabState {
  rows: RowState[];
  total: number;
  nextCursor: string | null;
  /** Last fetch failure for this tab; cached rows stay visible while set. */
  error: string | null;
}

export interface KeywordState {
  /** Query the server last acknowledged (null until first ack). */
  active: string | null;
  /** The query text a rejection applies to, kept so the error can be shown in place. */
  rejected: string | null;
  error: string | null;
  errorPosition: number | null;
  /** True right after an ack (including the unchanged-query no-op). */
  acknowledged: boolean;
}

export interface ViewState {
  activeTab: TabName;
  tabs: Record<TabName, TabState>;
  status: StatusPayload | null;
  /** Set when the status endpoint itself is unreachable. */
  statusError: string | null;
  keywords: KeywordState;
}

function emptyTab(): TabState {
  return { rows: [], total: 0, nextCursor: null, error: null };
}

export function initialState(): ViewState {
  return {
    activeTab: "report_in_region",
    tabs: {
      report_in_region: emptyTab(),
      negative: emptyTab(),
      report_no_geo: emptyTab(),
    },
    status: null,
    statusError: null,
    keywords: {
      active: null,
      rejected: null,
      error: null,
      errorPosition: null,
      acknowledged: false,
    },
  };
}

/** Newest first: created_at descending, post_id descending as tiebreak. */
function compareRows(a: RowState, b: RowState): number {
  if (a.created_at !== b.created_at) return a.created_at < b.created_at ? 1 : -1;
  if (a.post_id !== b.post_id) return a.post_id < b.post_id ? 1 : -1;
  return 0;
}

/**
 * Merge a fetched page into a tab. Rows are keyed by post_id: fresh server
 * fields replace stale ones, while local in-flight markers survive the
 * refresh. A row the server has marked interacted never reverts locally.
 */
export function applyTabPage(state: ViewState, tab: TabName, page: TabPage): ViewState {
  const previous = state.tabs[tab];
  const byId = new Map<string, RowState>();
  for (const row of previous.rows) byId.set(row.post_id, row);
  for (const row of page.rows) {
    const existing = byId.get(row.post_id);
    byId.set(row.post_id, {
      ...row,
      interacted: row.interacted || (existing?.interacted ?? false),
      pending: existing?.pending ?? false,
      notice: existing?.notice ?? null,
    });
  }
  const rows = [...byId.values()].sort(compareRows);
  return {
    ...state,
    tabs: {
      ...state.tabs,
      [tab]: { rows, total: page.total, nextCursor: page.next_cursor, error: null },
    },
  };
}

/** Record a tab fetch failure; previously fetched rows remain on screen. */
export function applyTabError(state: ViewState, tab: TabName, message: string): ViewState {
  const previous = state.tabs[tab];
  return { ...state, tabs: { ...state.tabs, [tab]: { ...previous, error: message } } };
}

export function applyStatus(state: ViewState, payload: StatusPayload): ViewState {
  return { ...state, status: payload, statusError: null };
}

export function applyStatusError(state: ViewState, message: string): ViewState {
  return { ...state, statusError: message };
}

export function setActiveTab(state: ViewState, tab: TabName): ViewState {
  return { ...state, activeTab: tab };
}

/**
 * Data is stale when the last successful poll is more than two poll
 * intervals in the past (or the service has never succeeded / cannot be
 * reached at all).
 */
export function isStale(state: ViewState, nowMs: number): boolean {
  if (state.statusError !== null) return true;
  if (state.status === null) return false;
  if (state.status.last_success_at === null) return true;
  const lastMs = Date.parse(state.status.last_success_at);
  return nowMs - lastMs > 2 * state.status.poll_interval * 1000;
}

function updateRow(
  state: ViewState,
  tab: TabName,
  postId: string,
  change: (row: RowState) => RowState,
): ViewState {
  const previous = state.tabs[tab];
  const rows = previous.rows.map((row) => (row.post_id === postId ? change(row) : row));
  return { ...state, tabs: { ...state.tabs, [tab]: { ...previous, rows } } };
}

export interface BeginReplyResult {
  state: ViewState;
  /** False when the send must not happen (already sent, in flight, or gone). */
  proceed: boolean;
}

/**
 * Gate an interaction send. The pending flag is set synchronously, so two
 * clicks on the same row — even before the first response arrives — yield
 * exactly one POST.
 */
export function beginReply(state: ViewState, tab: TabName, postId: string): BeginReplyResult {
  const row = state.tabs[tab].rows.find((r) => r.post_id === postId);
  if (!row || row.interacted || row.pending) {
    return { state, proceed: false };
  }
  return {
    state: updateRow(state, tab, postId, (r) => ({ ...r, pending: true, notice: null })),
    proceed: true,
  };
}

export type ReplyResolution =
  | { kind: "sent" }
  | { kind: "conflict"; detail: string }
  | { kind: "failed"; detail: string };

/**
 * Settle an in-flight interaction. A conflict means somebody already replied
 * to this post: the row is marked interacted (so the button stays disabled)
 * and carries a non-fatal notice instead of an error.
 */
export function resolveReply(
  state: ViewState,
  tab: TabName,
  postId: string,
  resolution: ReplyResolution,
): ViewState {
  return updateRow(state, tab, postId, (row) => {
    switch (resolution.kind) {
      case "sent":
        return { ...row, pending: false, interacted: true, notice: null };
      case "conflict":
        return { ...row, pending: false, interacted: true, notice: resolution.detail };
      case "failed":
        return { ...row, pending: false, notice: resolution.detail };
    }
  });
}

export function applyKeywordAck(state: ViewState, query: string): ViewState {
  return {
    ...state,
    keywords: {
      active: query,
      rejected: null,
      error: null,
      errorPosition: null,
      acknowledged: true,
    },
  };
}

export function applyKeywordRejection(
  state: ViewState,
  query: string,
  error: string,
  position: number,
): ViewState {
  return {
    ...state,
    keywords: {
      ...state.keywords,
      rejected: query,
      error,
      errorPosition: position,
      acknowledged: false,
    },
  };
}

/** Row-count badge for a tab header; server total wins once known. */
export function tabBadge(state: ViewState, tab: TabName): number {
  const t = state.tabs[tab];
  return Math.max(t.total, t.rows.length);
}

export function allTabs(): readonly TabName[] {
  return TAB_NAMES;
}
