import { describe, expect, it, vi } from "vitest";

import { classify, health, predict, SERVICE_UNAVAILABLE } from "../src/api.js";

const BODY = { temperature: 22, ph: 7, ec: 400, do: 6.5 };

function jsonResponse(status: number, payload: unknown): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("predict", () => {
  it("returns the server payload on 200", async () => {
    const fetchFn = vi.fn(async () => jsonResponse(200, { wqi: 80, label: "Average" }));
    const outcome = await predict(BODY, fetchFn);
    expect(outcome).toEqual({ ok: true, data: { wqi: 80, label: "Average" } });
    expect(fetchFn).toHaveBeenCalledWith(
      "/api/predict",
      expect.objectContaining({ method: "POST" }),
    );
  });

  it("maps an unreachable server to the unavailable banner", async () => {
    const fetchFn = vi.fn(async () => {
      throw new TypeError("fetch failed");
    });
    const outcome = await predict(BODY, fetchFn);
    expect(outcome).toEqual({ ok: false, error: SERVICE_UNAVAILABLE });
  });
});

describe("classify", () => {
  it("surfaces the server's error and field on 400", async () => {
    const fetchFn = vi.fn(async () =>
      jsonResponse(400, { error: "missing_field", field: "do" }),
    );
    const outcome = await classify(BODY, fetchFn);
    expect(outcome).toEqual({ ok: false, error: "missing_field: do" });
  });

  it("surfaces bare error objects", async () => {
    const fetchFn = vi.fn(async () => jsonResponse(503, { error: "model_unavailable" }));
    const outcome = await classify(BODY, fetchFn);
    expect(outcome).toEqual({ ok: false, error: "model_unavailable" });
  });

  it("copes with non-JSON error bodies", async () => {
    const fetchFn = vi.fn(async () => new Response("boom", { status: 500 }));
    const outcome = await classify(BODY, fetchFn);
    expect(outcome).toEqual({ ok: false, error: "request failed (HTTP 500)" });
  });
});

describe("health", () => {
  it("reports loaded flags", async () => {
    const payload = { status: "ok", classifier_loaded: true, regressor_loaded: false };
    const fetchFn = vi.fn(async () => jsonResponse(200, payload));
    const outcome = await health(fetchFn);
    expect(outcome).toEqual({ ok: true, data: payload });
  });
});
