// Orchestration between the API client and the pure view state: refresh
// scheduling, exactly-once interaction sends, and keyword submission. No DOM
// access here — the browser layer subscribes and re-renders on change.

import { ApiError } from "./api.js";
import type { ApiClient } from "./api.js";
import {
  allTabs,
  applyKeywordAck,
  applyKeywordRejection,
  applyStatus,
  applyStatusError,
  applyTabError,
  applyTabPage,
  beginReply,
  initialState,
  isStale,
  resolveReply,
  setActiveTab,
} from "./state.js";
import type { ViewState } from "./state.js";
import type { KeywordResult, ReplyOutcome, TabName } from "./types.js";

export const DEFAULT_REFRESH_MS = 60_000;

export interface ControllerOptions {
  /** Auto-refresh period in milliseconds (default one minute). */
  refreshIntervalMs?: number;
  /** Clock override for tests. */
  now?: () => number;
}

export interface Controller {
  readonly state: ViewState;
  /** Monotonic counter bumped on every state change. */
  readonly revision: number;
  subscribe(listener: (state: ViewState) => void): () => void;
  /** Fetch status and all tabs; failures set banners and keep cached rows. */
  refresh(): Promise<void>;
  selectTab(tab: TabName): void;
  /** Send the standard reply for one row; never issues a duplicate POST. */
  sendReply(tab: TabName, postId: string, operator: string): Promise<ReplyOutcome>;
  /** PUT the keyword query; an unchanged query is acknowledged without a request. */
  submitKeywords(query: string): Promise<KeywordResult>;
  isStaleNow(): boolean;
  /** Start the auto-refresh timer (idempotent). */
  start(): void;
  stop(): void;
}

export function createController(api: ApiClient, options: ControllerOptions = {}): Controller {
  const refreshMs = options.refreshIntervalMs ?? DEFAULT_REFRESH_MS;
  const now = options.now ?? Date.now;

  let state = initialState();
  let revision = 0;
  let timer: ReturnType<typeof setInterval> | null = null;
  const listeners = new Set<(state: ViewState) => void>();

  function commit(next: ViewState): void {
    state = next;
    revision += 1;
    for (const listener of listeners) listener(state);
  }

  async function refresh(): Promise<void> {
    const tabs = allTabs();
    const [statusResult, ...tabResults] = await Promise.allSettled([
      api.fetchStatus(),
      ...tabs.map((tab) => api.fetchTab(tab)),
    ]);
    let next = state;
    if (statusResult.status === "fulfilled") {
      next = applyStatus(next, statusResult.value);
    } else {
      next = applyStatusError(next, describeFailure(statusResult.reason));
    }
    tabResults.forEach((result, i) => {
      const tab = tabs[i] as TabName;
      if (result.status === "fulfilled") {
        next = applyTabPage(next, tab, result.value);
      } else {
        next = applyTabError(next, tab, describeFailure(result.reason));
      }
    });
    commit(next);
  }

  return {
    get state() {
      return state;
    },
    get revision() {
      return revision;
    },

    subscribe(listener) {
      listeners.add(listener);
      return () => listeners.delete(listener);
    },

    refresh,

    selectTab(tab) {
      commit(setActiveTab(state, tab));
    },

    async sendReply(tab, postId, operator) {
      const gate = beginReply(state, tab, postId);
      if (!gate.proceed) return "skipped";
      commit(gate.state);
      try {
        await api.sendInteraction(postId, operator);
        commit(resolveReply(state, tab, postId, { kind: "sent" }));
        return "sent";
      } catch (err) {
        if (err instanceof ApiError && err.status === 409) {
          commit(resolveReply(state, tab, postId, { kind: "conflict", detail: err.detail }));
          return "conflict";
        }
        commit(resolveReply(state, tab, postId, { kind: "failed", detail: describeFailure(err) }));
        return "failed";
      }
    },

    async submitKeywords(query) {
      if (state.keywords.active !== null && query === state.keywords.active) {
        commit(applyKeywordAck(state, query));
        return { ok: true, query };
      }
      const result = await api.updateKeywords(query);
      if (result.ok) {
        commit(applyKeywordAck(state, result.query));
      } else {
        commit(applyKeywordRejection(state, query, result.error, result.position));
      }
      return result;
    },

    isStaleNow() {
      return isStale(state, now());
    },

    start() {
      if (timer !== null) return;
      timer = setInterval(() => {
        void refresh();
      }, refreshMs);
    },

    stop() {
      if (timer !== null) {
        clearInterval(timer);
        timer = null;
      }
    },
  };
}

function describeFailure(reason: unknown): string {
  if (reason instanceof ApiError) return reason.detail;
  if (reason instanceof Error) return reason.message;
  return String(reason);
}
