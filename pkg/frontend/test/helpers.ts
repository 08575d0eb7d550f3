// Shared test plumbing: loads the fixtures recorded from a live service run
// and provides a FakeTransport that replays them through the client's
// injectable fetch, logging every request for exactly-once assertions.

import { readFileSync } from "node:fs";

import type { FetchLike } from "../src/api.js";

export interface RecordedFixture {
  status_code: number;
  body: unknown;
}

export type Fixtures = Record<string, RecordedFixture>;

export function loadFixtures(): Fixtures {
  const path = new URL("./fixtures/api_fixtures.json", import.meta.url);
  return JSON.parse(readFileSync(path, "utf-8")) as Fixtures;
}

export interface RequestLogEntry {
  method: string;
  path: string;
  search: string;
  body: unknown;
}

type RouteHandler = (entry: RequestLogEntry) => RecordedFixture | Promise<RecordedFixture>;

export function deferred<T>(): { promise: Promise<T>; resolve: (value: T) => void } {
  let resolve!: (value: T) => void;
  const promise = new Promise<T>((r) => {
    resolve = r;
  });
  return { promise, resolve };
}

export class FakeTransport {
  readonly log: RequestLogEntry[] = [];
  private readonly routes = new Map<string, RouteHandler>();

  route(method: string, path: string, handler: RecordedFixture | RouteHandler): void {
    this.routes.set(`${method} ${path}`, typeof handler === "function" ? handler : () => handler);
  }

  /** Make a route reject as if the network were down. */
  routeFailure(method: string, path: string, message: string): void {
    this.routes.set(`${method} ${path}`, () => {
      throw new Error(message);
    });
  }

  requests(method: string, path: string): RequestLogEntry[] {
    return this.log.filter((entry) => entry.method === method && entry.path === path);
  }

  fetch: FetchLike = async (url, init) => {
    const parsed = new URL(url, "http://service.test");
    const entry: RequestLogEntry = {
      method: init?.method ?? "GET",
      path: parsed.pathname,
      search: parsed.search,
      body: typeof init?.body === "string" ? JSON.parse(init.body) : undefined,
    };
    this.log.push(entry);
    const handler = this.routes.get(`${entry.method} ${entry.path}`);
    if (!handler) {
      throw new Error(`unrouted request: ${entry.method} ${entry.path}`);
    }
    const fixture = await handler(entry);
    return new Response(JSON.stringify(fixture.body), {
      status: fixture.status_code,
      headers: { "Content-Type": "application/json" },
    });
  };
}

/**
 * Transport pre-wired to behave like the recorded service: status and tab
 * endpoints replay their fixtures, interactions return 201 once per post and
 * 409 on repeats (post 1003 is already interacted in the recording), and the
 * keyword endpoint accepts anything except the recorded malformed query.
 */
export function recordedTransport(fixtures: Fixtures): FakeTransport {
  const transport = new FakeTransport();
  const interacted = new Set<string>(["1003"]);

  transport.route("GET", "/status", fixtures.status!);
  for (const tab of ["report_in_region", "negative", "report_no_geo"]) {
    transport.route("GET", `/tabs/${tab}`, fixtures[`tab_${tab}`]!);
  }
  transport.route("GET", "/tabs/nonsense", fixtures.tab_unknown!);

  transport.route("POST", "/interactions", (entry) => {
    const postId = (entry.body as { post_id: string }).post_id;
    if (interacted.has(postId)) {
      return {
        status_code: 409,
        body: { detail: `post '${postId}' already has an interaction` },
      };
    }
    interacted.add(postId);
    const receipt = fixtures.interaction_created!.body as Record<string, unknown>;
    return { status_code: 201, body: { ...receipt, post_id: postId } };
  });

  transport.route("PUT", "/config/keywords", (entry) => {
    const query = (entry.body as { query: string }).query;
    if (query === "((") return fixtures.keywords_rejected!;
    return { status_code: 200, body: { query } };
  });

  return transport;
}
