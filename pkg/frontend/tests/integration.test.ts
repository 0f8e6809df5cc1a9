// @vitest-environment node
//
// End-to-end parity: start the real prediction service and verify the
// numbers the UI would display for the worked example.

import { spawn, type ChildProcess } from "node:child_process";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { initialForm, toRequest, withShape } from "../src/form.js";
import { formatSig4 } from "../src/format.js";

const PORT = 8097;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | undefined;

async function waitForHealth(timeoutMs: number): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  let lastError: unknown = null;
  while (Date.now() < deadline) {
    try {
      const r = await fetch(`${BASE}/api/v1/health`);
      if (r.ok) return;
    } catch (err) {
      lastError = err;
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
  throw new Error(`service did not come up on :${PORT}: ${String(lastError)}`);
}

describe("live service parity", () => {
  beforeAll(async () => {
    server = spawn("colmp", ["serve", "--port", String(PORT)], {
      stdio: "ignore",
    });
    await waitForHealth(20_000);
  }, 30_000);

  afterAll(() => {
    server?.kill();
  });

  it("displays the worked example exactly as the service computes it", async () => {
    const api = new ApiClient(BASE);
    const response = await api.predict(toRequest(initialForm(), "ui-parity"));
    expect(response.id).toBe("ui-parity");
    const gm = response.estimates.gm;
    expect(formatSig4(gm?.a)).toBe("0.01563");
    expect(formatSig4(gm?.b)).toBe("0.03540");
    expect(response.classification.mode).toBe("FSC");
  });

  it("round-trips a circular-column classification", async () => {
    const api = new ApiClient(BASE);
    const form = withShape(initialForm(), "C");
    const response = await api.predict(toRequest(form));
    const probs = response.classification.probabilities;
    for (const mode of ["FC", "FSC", "SC"] as const) {
      expect(probs[mode]).toBeGreaterThan(0);
      expect(probs[mode]).toBeLessThan(1);
    }
  });

  it("surfaces service-side validation as ApiError", async () => {
    const api = new ApiClient(BASE);
    const req = toRequest(initialForm());
    req.features.axial_ratio = -1 as number;
    await expect(api.predict(req)).rejects.toThrow(/InvalidFeatures/);
  });

  it("rejects unknown models with a 400", async () => {
    const api = new ApiClient(BASE);
    const req = toRequest(initialForm());
    req.models = ["xyz"];
    await expect(api.predict(req)).rejects.toThrow(/UnknownModel/);
  });
});
