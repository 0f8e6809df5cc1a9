import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiError } from "../src/api.js";
import { DEBOUNCE_MS, WhatIfController } from "../src/controller.js";
import { formatSig4 } from "../src/format.js";
import { FakeApi, workedResponse } from "./helpers.js";

describe("WhatIfController", () => {
  let api: FakeApi;
  let controller: WhatIfController;

  beforeEach(() => {
    vi.useFakeTimers();
    api = new FakeApi();
    controller = new WhatIfController(api);
  });
  afterEach(() => vi.useRealTimers());

  async function flush(): Promise<void> {
    await vi.runAllTimersAsync();
  }

  it("displays the service numbers at four significant figures", async () => {
    controller.refresh();
    await flush();
    const est = controller.state.lastResponse?.estimates.gm;
    expect(formatSig4(est?.a)).toBe("0.01563");
    expect(formatSig4(est?.b)).toBe("0.03540");
    expect(controller.state.stale).toBe(false);
  });

  it("editing a field sends exactly one request after the debounce", async () => {
    controller.refresh();
    await flush();
    expect(api.calls.length).toBe(1);

    controller.setField("axial_ratio", "0.25");
    expect(controller.state.stale).toBe(true);
    expect(api.calls.length).toBe(1); // nothing yet
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS - 1);
    expect(api.calls.length).toBe(1);
    await vi.advanceTimersByTimeAsync(1);
    expect(api.calls.length).toBe(2);
    await flush();
    expect(api.calls.length).toBe(2); // and no more
    expect(api.calls[1]?.features.axial_ratio).toBe(0.25);
  });

  it("a burst of edits coalesces into a single request", async () => {
    controller.setField("rho_t", "0.012");
    controller.setField("rho_t", "0.013");
    controller.setShape("C");
    await flush();
    expect(api.calls.length).toBe(1);
    expect(api.calls[0]?.shape).toBe("C");
    expect(api.calls[0]?.features.rho_t).toBe(0.013);
  });

  it("a failed request keeps the previous results and reports the error", async () => {
    controller.refresh();
    await flush();
    const before = controller.state.lastResponse;
    expect(before).not.toBeNull();

    api.failWith = new ApiError("service unreachable: down");
    controller.setField("vy_over_vo", "0.9");
    await flush();
    expect(controller.state.error).toContain("unreachable");
    expect(controller.state.lastResponse).toBe(before);

    // recovery clears the banner
    api.failWith = null;
    controller.setField("vy_over_vo", "1.0");
    await flush();
    expect(controller.state.error).toBeNull();
    expect(controller.state.stale).toBe(false);
  });

  it("invalid input never sends a request and flags the field", async () => {
    controller.refresh();
    await flush();
    const sent = api.calls.length;
    controller.setField("axial_ratio", "-1");
    await flush();
    expect(api.calls.length).toBe(sent);
    expect(controller.state.form.fields.axial_ratio.valid).toBe(false);
    expect(controller.state.stale).toBe(true); // view marked out of date
  });

  it("a new request aborts the one in flight", async () => {
    api.manual = true;
    controller.setField("rho_l", "0.021");
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    expect(api.pending.length).toBe(1);
    const first = api.pending[0];

    controller.setField("rho_l", "0.03");
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    expect(api.pending.length).toBe(2);
    expect(first?.signal?.aborted).toBe(true); // superseded request canceled

    api.pending[1]?.resolve(workedResponse("rev-current"));
    await flush();
    expect(controller.state.lastResponse?.id).toBe("rev-current");
    expect(controller.state.stale).toBe(false);
  });

  it("a response from before the latest edit is never applied", async () => {
    api.manual = true;
    controller.setField("rho_l", "0.021");
    await vi.advanceTimersByTimeAsync(DEBOUNCE_MS);
    const first = api.pending[0];
    expect(first).toBeDefined();

    // an edit makes the form invalid: no new request fires, nothing aborts
    // the in-flight one, but its revision is now stale
    controller.setField("axial_ratio", "bogus");
    first?.resolve(workedResponse("rev-stale"));
    await flush();
    expect(controller.state.lastResponse).toBeNull(); // not applied
  });

  it("notifies subscribers on every transition", async () => {
    const seen: boolean[] = [];
    controller.subscribe((s) => seen.push(s.stale));
    controller.setField("s_over_d", "0.6");
    await flush();
    expect(seen.length).toBeGreaterThanOrEqual(3); // init, edit, applied
    expect(seen[seen.length - 1]).toBe(false);
  });
});
