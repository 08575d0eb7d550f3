// Thin typed client for the monitor service. All network access goes through
// an injectable fetch so tests can replay recorded responses; nothing here
// interprets the data beyond decoding JSON and classifying status codes.

import type {
  InteractionReceipt,
  KeywordResult,
  StatusPayload,
  TabName,
  TabPage,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  readonly status: number;
  readonly detail: string;

  constructor(status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
    this.status = status;
    this.detail = detail;
  }
}

export interface ApiClient {
  fetchStatus(): Promise<StatusPayload>;
  fetchTab(tab: TabName, cursor?: string, limit?: number): Promise<TabPage>;
  sendInteraction(postId: string, operator: string): Promise<InteractionReceipt>;
  updateKeywords(query: string): Promise<KeywordResult>;
}

async function readDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown; error?: unknown };
    if (typeof body.detail === "string") return body.detail;
    if (typeof body.error === "string") return body.error;
  } catch {
    // fall through: non-JSON error body
  }
  return response.statusText || "request failed";
}

export function createApiClient(baseUrl: string, fetchImpl?: FetchLike): ApiClient {
  const doFetch: FetchLike = fetchImpl ?? ((url, init) => fetch(url, init));
  const base = baseUrl.replace(/\/+$/, "");

  async function getJson<T>(path: string): Promise<T> {
    const response = await doFetch(`${base}${path}`);
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    return (await response.json()) as T;
  }

  return {
    fetchStatus(): Promise<StatusPayload> {
      return getJson<StatusPayload>("/status");
    },

    fetchTab(tab: TabName, cursor?: string, limit?: number): Promise<TabPage> {
      const params = new URLSearchParams();
      if (cursor !== undefined) params.set("cursor", cursor);
      if (limit !== undefined) params.set("limit", String(limit));
      const qs = params.toString();
      return getJson<TabPage>(`/tabs/${tab}${qs ? `?${qs}` : ""}`);
    },

    async sendInteraction(postId: string, operator: string): Promise<InteractionReceipt> {
      const response = await doFetch(`${base}/interactions`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ post_id: postId, operator }),
      });
      if (response.status !== 201) {
        throw new ApiError(response.status, await readDetail(response));
      }
      return (await response.json()) as InteractionReceipt;
    },

    async updateKeywords(query: string): Promise<KeywordResult> {
      const response = await doFetch(`${base}/config/keywords`, {
        method: "PUT",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ query }),
      });
      if (response.status === 200) {
        const body = (await response.json()) as { query: string };
        return { ok: true, query: body.query };
      }
      if (response.status === 400) {
        const body = (await response.json()) as { error: string; position: number };
        return { ok: false, error: body.error, position: body.position };
      }
      throw new ApiError(response.status, await readDetail(response));
    },
  };
}
