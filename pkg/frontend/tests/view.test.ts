import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import { beforeEach, describe, expect, it } from "vitest";

import { initialForm, withField } from "../src/form.js";
import {
  collectElements,
  pickEnvelopeParams,
  render,
  renderEnvelope,
} from "../src/view.js";
import type { ViewState } from "../src/controller.js";
import { workedResponse } from "./helpers.js";

const HERE = dirname(fileURLToPath(import.meta.url));
const HTML = readFileSync(join(HERE, "..", "index.html"), "utf-8");

function mountPage(): void {
  const bodyMatch = HTML.match(/<body>([\s\S]*)<\/body>/);
  document.body.innerHTML = bodyMatch?.[1] ?? "";
}

function baseState(): ViewState {
  return {
    form: initialForm(),
    lastResponse: workedResponse(),
    stale: false,
    pending: false,
    error: null,
  };
}

describe("view rendering", () => {
  beforeEach(mountPage);

  it("shows the worked example at four significant figures", () => {
    const els = collectElements(document);
    render(els, baseState());
    const cells = [...document.querySelectorAll("#results-body td")].map(
      (td) => td.textContent,
    );
    expect(cells).toEqual(["GM", "0.01563", "0.03540"]);
  });

  it("renders the mode badge and probability bars", () => {
    const els = collectElements(document);
    render(els, baseState());
    expect(document.getElementById("mode-badge")?.textContent).toBe("FSC");
    const bars = document.querySelectorAll("#prob-bars .prob-row");
    expect(bars.length).toBe(3);
  });

  it("draws a and b markers with b to the right", () => {
    const els = collectElements(document);
    renderEnvelope(els.envelopeSvg, els.envelopeCaption, 0.015, 0.035);
    const a = document.querySelector("[data-marker=a]");
    const b = document.querySelector("[data-marker=b]");
    expect(a).not.toBeNull();
    expect(b).not.toBeNull();
    expect(Number(b?.getAttribute("cx"))).toBeGreaterThan(
      Number(a?.getAttribute("cx")),
    );
    expect(els.envelopeCaption.textContent).toContain("0.01500");
    expect(els.envelopeCaption.textContent).toContain("0.03500");
  });

  it("highlights invalid fields and keeps prior results on error", () => {
    const els = collectElements(document);
    render(els, baseState()); // populate the table first

    const broken: ViewState = {
      ...baseState(),
      form: withField(initialForm(), "axial_ratio", "-1"),
      error: "service unreachable",
      stale: true,
    };
    render(els, broken);

    const input = document.getElementById("field-axial_ratio");
    expect(input?.classList.contains("invalid")).toBe(true);
    const banner = document.getElementById("error-banner");
    expect(banner?.hidden).toBe(false);
    expect(banner?.textContent).toContain("unreachable");
    // previous numbers still on screen
    const cells = [...document.querySelectorAll("#results-body td")].map(
      (td) => td.textContent,
    );
    expect(cells).toContain("0.01563");
  });

  it("pickEnvelopeParams skips single-target estimates", () => {
    const resp = workedResponse();
    resp.estimates = {
      trained: { a: 0.02, b: null, raw_a: 0.02, raw_b: null, target: "a" },
      gm: { a: 0.01, b: 0.03, raw_a: 0.01, raw_b: 0.03 },
    };
    expect(pickEnvelopeParams(resp)).toEqual({ a: 0.01, b: 0.03 });
  });

  it("reports x_test when the service provides it", () => {
    const els = collectElements(document);
    const state = baseState();
    if (state.lastResponse) state.lastResponse.x_test = 0.40825;
    render(els, state);
    expect(document.getElementById("x-test")?.textContent).toContain("0.4083");
  });
});
