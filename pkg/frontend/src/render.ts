// Pure HTML rendering of a view-state snapshot. Functions here return
// strings only; all interactivity is attached by the DOM layer through
// data-action attributes. Keeping this layer pure lets tests assert on the
// exact markup users see.

import { isStale, tabBadge } from "./state.js";
import type { RowState, ViewState } from "./state.js";
import type { TabName } from "./types.js";

export const TAB_LABELS: Record<TabName, string> = {
  report_in_region: "Reports in region",
  negative: "Negatives",
  report_no_geo: "Reports without region",
};

export const COLUMN_HEADERS = ["Text", "Timestamp", "User location", "Profile bio"] as const;

export function escapeHtml(value: string): string {
  return value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function formatTimestamp(isoText: string): string {
  const ms = Date.parse(isoText);
  if (Number.isNaN(ms)) return isoText;
  return new Date(ms).toISOString().replace("T", " ").replace(/\.\d+Z$/, " UTC");
}

function formatScore(score: number | null): string {
  return score === null ? "–" : score.toFixed(3);
}

export function renderStatusBanner(state: ViewState, nowMs: number): string {
  const parts: string[] = [];
  if (state.statusError !== null) {
    parts.push(
      `<div class="banner banner-error" data-banner="api-down">` +
        `Service unreachable: ${escapeHtml(state.statusError)} ` +
        `<button type="button" data-action="refresh">Retry</button></div>`,
    );
  }
  if (isStale(state, nowMs)) {
    const last = state.status?.last_success_at;
    const lastText = last === null || last === undefined ? "never" : formatTimestamp(last);
    parts.push(
      `<div class="banner banner-stale" data-banner="stale">` +
        `Data may be stale — last successful poll: ${escapeHtml(lastText)}</div>`,
    );
  }
  if (state.status !== null) {
    const last = state.status.last_success_at;
    parts.push(
      `<div class="status-line" data-role="status-line">` +
        `Last poll: ${escapeHtml(last === null ? "never" : formatTimestamp(last))} · ` +
        `batch ${state.status.last_batch_size} · ` +
        `failures ${state.status.consecutive_failures}</div>`,
    );
  }
  return parts.join("\n");
}

export function renderTabBar(state: ViewState): string {
  const buttons = (Object.keys(TAB_LABELS) as TabName[])
    .map((tab) => {
      const active = tab === state.activeTab ? " tab-active" : "";
      return (
        `<button type="button" class="tab${active}" data-action="select-tab" data-tab="${tab}">` +
        `${escapeHtml(TAB_LABELS[tab])} ` +
        `<span class="badge" data-role="badge" data-tab="${tab}">${tabBadge(state, tab)}</span>` +
        `</button>`
      );
    })
    .join("");
  return `<nav class="tab-bar">${buttons}</nav>`;
}

function renderAvatar(row: RowState): string {
  if (!row.avatar_url) return "";
  return `<img class="avatar" src="${escapeHtml(row.avatar_url)}" alt="">`;
}

function renderActions(row: RowState): string {
  const parts: string[] = [];
  if (row.url !== null) {
    parts.push(
      `<a href="${escapeHtml(row.url)}" target="_blank" rel="noopener" ` +
        `data-action="open-original">Open original</a>`,
    );
  }
  const disabled = row.interacted || row.pending ? " disabled" : "";
  const label = row.interacted ? "Reply sent" : row.pending ? "Sending…" : "Send standard reply";
  parts.push(
    `<button type="button" data-action="send-reply" data-post-id="${escapeHtml(row.post_id)}"` +
      `${disabled}>${label}</button>`,
  );
  if (row.notice !== null) {
    parts.push(`<span class="row-notice" data-role="notice">${escapeHtml(row.notice)}</span>`);
  }
  return parts.join(" ");
}

export function renderRow(row: RowState): string {
  const cells = [
    `<td class="cell-text">${renderAvatar(row)}${escapeHtml(row.text)}</td>`,
    `<td class="cell-time">${escapeHtml(formatTimestamp(row.created_at))}</td>`,
    `<td class="cell-location">${escapeHtml(row.author_location_text ?? "")}</td>`,
    `<td class="cell-bio">${escapeHtml(row.author_bio ?? "")}</td>`,
    `<td class="cell-score">${formatScore(row.score)}</td>`,
    `<td class="cell-actions">${renderActions(row)}</td>`,
  ];
  return `<tr data-post-id="${escapeHtml(row.post_id)}">${cells.join("")}</tr>`;
}

export function renderTable(state: ViewState, tab: TabName): string {
  const tabState = state.tabs[tab];
  const pieces: string[] = [];
  if (tabState.error !== null) {
    pieces.push(
      `<div class="banner banner-error" data-banner="tab-error">` +
        `Could not refresh this tab: ${escapeHtml(tabState.error)} ` +
        `<button type="button" data-action="refresh">Retry</button></div>`,
    );
  }
  if (tabState.rows.length === 0) {
    pieces.push(`<p class="empty" data-role="empty">No posts in this tab yet.</p>`);
    return pieces.join("\n");
  }
  const headers = [...COLUMN_HEADERS, "Score", "Actions"]
    .map((h) => `<th>${escapeHtml(h)}</th>`)
    .join("");
  const body = tabState.rows.map(renderRow).join("\n");
  pieces.push(
    `<table class="post-table" data-tab="${tab}">` +
      `<thead><tr>${headers}</tr></thead><tbody>${body}</tbody></table>`,
  );
  return pieces.join("\n");
}

export function renderKeywordEditor(state: ViewState): string {
  const kw = state.keywords;
  const value = kw.rejected ?? kw.active ?? "";
  const parts = [
    `<form class="keyword-editor" data-role="keyword-editor">`,
    `<label>Tracked keywords ` +
      `<input type="text" name="query" value="${escapeHtml(value)}"></label>`,
    `<button type="submit" data-action="save-keywords">Save</button>`,
  ];
  if (kw.error !== null && kw.errorPosition !== null && kw.rejected !== null) {
    // Point at the offending offset within the rejected query.
    const marker = `${escapeHtml(kw.rejected.slice(0, kw.errorPosition))}<mark>▲</mark>`;
    parts.push(
      `<div class="kw-error" data-role="keyword-error" data-position="${kw.errorPosition}">` +
        `${escapeHtml(kw.error)}<br><code>${marker}</code></div>`,
    );
  } else if (kw.acknowledged && kw.active !== null) {
    parts.push(`<span class="kw-ok" data-role="keyword-ok">Saved</span>`);
  }
  parts.push(`</form>`);
  return parts.join("\n");
}

export function renderApp(state: ViewState, nowMs: number): string {
  return [
    `<header class="console-header"><h1>Monitor triage console</h1>` +
      `<button type="button" data-action="refresh">Refresh now</button></header>`,
    renderStatusBanner(state, nowMs),
    renderTabBar(state),
    renderTable(state, state.activeTab),
    renderKeywordEditor(state),
  ].join("\n");
}
