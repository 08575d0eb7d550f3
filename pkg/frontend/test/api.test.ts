// The API client against recorded service responses: decoding, query-string
// construction, and status-code classification.

import { describe, expect, it } from "vitest";

import { ApiError, createApiClient } from "../src/api.js";
import type { TabName } from "../src/types.js";
import { FakeTransport, loadFixtures, recordedTransport } from "./helpers.js";

const fixtures = loadFixtures();

function client(transport: FakeTransport) {
  return createApiClient("http://service.test", transport.fetch);
}

describe("fetchStatus", () => {
  it("decodes the recorded payload", async () => {
    const transport = recordedTransport(fixtures);
    const status = await client(transport).fetchStatus();
    expect(status.poll_interval).toBe(300.0);
    expect(status.last_batch_size).toBe(7);
    expect(status.consecutive_failures).toBe(0);
    expect(typeof status.last_success_at).toBe("string");
  });
});

describe("fetchTab", () => {
  it("decodes rows with nullable fields intact", async () => {
    const transport = recordedTransport(fixtures);
    const page = await client(transport).fetchTab("report_in_region");
    expect(page.tab).toBe("report_in_region");
    expect(page.total).toBe(3);
    const byId = new Map(page.rows.map((r) => [r.post_id, r]));
    expect(byId.get("1003")?.author_bio).toBeNull();
    expect(byId.get("abc-2")?.url).toBeNull();
    expect(byId.get("1001")?.url).toContain("/status/1001");
  });

  it("passes cursor and limit as query parameters", async () => {
    const transport = recordedTransport(fixtures);
    await client(transport).fetchTab("negative", "2023-05-02T09:04:00+00:00|2002", 50);
    const [request] = transport.requests("GET", "/tabs/negative");
    const params = new URLSearchParams(request!.search);
    expect(params.get("cursor")).toBe("2023-05-02T09:04:00+00:00|2002");
    expect(params.get("limit")).toBe("50");
  });

  it("raises ApiError with the server detail for an unknown tab", async () => {
    const transport = recordedTransport(fixtures);
    const err = await client(transport)
      .fetchTab("nonsense" as TabName)
      .then(
        () => null,
        (e: unknown) => e,
      );
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(404);
    expect((err as ApiError).detail).toContain("unknown tab");
  });

  it("falls back to a generic detail when the error body is not an object", async () => {
    const transport = new FakeTransport();
    transport.route("GET", "/status", { status_code: 503, body: "down" });
    const err = await client(transport)
      .fetchStatus()
      .then(
        () => null,
        (e: unknown) => e,
      );
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).detail).toBe("request failed");
  });
});

describe("sendInteraction", () => {
  it("returns the receipt on 201", async () => {
    const transport = recordedTransport(fixtures);
    const receipt = await client(transport).sendInteraction("1001", "op1");
    expect(receipt.post_id).toBe("1001");
    expect(receipt.template_id).toBe("standard-followup");
    expect(receipt.rendered_text.length).toBeGreaterThan(0);
    const [request] = transport.requests("POST", "/interactions");
    expect(request!.body).toEqual({ post_id: "1001", operator: "op1" });
  });

  it("raises ApiError 409 when the post already has an interaction", async () => {
    const transport = recordedTransport(fixtures);
    const err = await client(transport)
      .sendInteraction("1003", "op1")
      .then(
        () => null,
        (e: unknown) => e,
      );
    expect(err).toBeInstanceOf(ApiError);
    expect((err as ApiError).status).toBe(409);
    expect((err as ApiError).detail).toContain("already has an interaction");
  });
});

describe("updateKeywords", () => {
  it("returns ok with the acknowledged query", async () => {
    const transport = recordedTransport(fixtures);
    const result = await client(transport).updateKeywords(
      "(bala voando) OR tiro OR tiroteio OR baleado",
    );
    expect(result).toEqual({ ok: true, query: "(bala voando) OR tiro OR tiroteio OR baleado" });
  });

  it("returns the rejection with its parse position", async () => {
    const transport = recordedTransport(fixtures);
    const result = await client(transport).updateKeywords("((");
    expect(result.ok).toBe(false);
    if (!result.ok) {
      expect(result.position).toBe(2);
      expect(result.error).toContain("offset 2");
    }
  });
});
