/** DOM rendering: results table, probability bars, backbone sketch. */

import { FEATURE_KEYS, type Mode, type PredictResponse } from "./api.js";
import { envelopeGeometry, polylinePoints } from "./envelope.js";
import { formatPercent, formatSig4 } from "./format.js";
import type { ViewState } from "./controller.js";

const MODES: Mode[] = ["FC", "FSC", "SC"];

const MODE_TITLES: Record<Mode, string> = {
  FC: "Flexure critical",
  FSC: "Flexure-shear critical",
  SC: "Shear critical",
};

export interface ViewElements {
  fields: Record<string, HTMLInputElement>;
  fieldErrors: Record<string, HTMLElement>;
  resultsBody: HTMLElement;
  resultsSection: HTMLElement;
  modeBadge: HTMLElement;
  probBars: HTMLElement;
  envelopeSvg: SVGSVGElement;
  envelopeCaption: HTMLElement;
  errorBanner: HTMLElement;
  xTest: HTMLElement;
  staleFlag: HTMLElement;
}

export function collectElements(root: Document): ViewElements {
  const byId = <T extends Element>(id: string): T => {
    const el = root.getElementById(id);
    if (!el) throw new Error(`missing element #${id}`);
    return el as unknown as T;
  };
  const fields: Record<string, HTMLInputElement> = {};
  const fieldErrors: Record<string, HTMLElement> = {};
  for (const key of FEATURE_KEYS) {
    fields[key] = byId<HTMLInputElement>(`field-${key}`);
    fieldErrors[key] = byId<HTMLElement>(`error-${key}`);
  }
  return {
    fields,
    fieldErrors,
    resultsBody: byId("results-body"),
    resultsSection: byId("results-section"),
    modeBadge: byId("mode-badge"),
    probBars: byId("prob-bars"),
    envelopeSvg: byId<SVGSVGElement>("envelope"),
    envelopeCaption: byId("envelope-caption"),
    errorBanner: byId("error-banner"),
    xTest: byId("x-test"),
    staleFlag: byId("stale-flag"),
  };
}

export function renderResultsTable(body: HTMLElement, response: PredictResponse): void {
  body.replaceChildren();
  for (const [name, est] of Object.entries(response.estimates)) {
    const tr = body.ownerDocument.createElement("tr");
    for (const text of [name.toUpperCase(), formatSig4(est.a), formatSig4(est.b)]) {
      const td = body.ownerDocument.createElement("td");
      td.textContent = text;
      tr.appendChild(td);
    }
    body.appendChild(tr);
  }
}

export function renderProbabilities(
  container: HTMLElement,
  badge: HTMLElement,
  response: PredictResponse,
): void {
  const cls = response.classification;
  badge.textContent = cls.mode;
  badge.title = MODE_TITLES[cls.mode];
  badge.dataset.mode = cls.mode;

  container.replaceChildren();
  const doc = container.ownerDocument;
  for (const mode of MODES) {
    const p = cls.probabilities[mode];
    const row = doc.createElement("div");
    row.className = "prob-row";
    const label = doc.createElement("span");
    label.className = "prob-label";
    label.textContent = mode;
    const track = doc.createElement("div");
    track.className = "prob-track";
    const fill = doc.createElement("div");
    fill.className = `prob-fill mode-${mode.toLowerCase()}`;
    fill.style.width = `${Math.round(1000 * p) / 10}%`;
    track.appendChild(fill);
    const value = doc.createElement("span");
    value.className = "prob-value";
    value.textContent = formatPercent(p);
    row.append(label, track, value);
    container.appendChild(row);
  }
}

const SVG_NS = "http://www.w3.org/2000/svg";

/** First estimate with both parameters present drives the sketch. */
export function pickEnvelopeParams(response: PredictResponse): { a: number; b: number } | null {
  for (const est of Object.values(response.estimates)) {
    if (est.a !== null && est.b !== null) return { a: est.a, b: est.b };
  }
  return null;
}

export function renderEnvelope(
  svg: SVGSVGElement,
  caption: HTMLElement,
  a: number,
  b: number,
): void {
  const doc = svg.ownerDocument;
  const geo = envelopeGeometry(a, b);
  svg.replaceChildren();

  const make = (tag: string, attrs: Record<string, string>) => {
    const el = doc.createElementNS(SVG_NS, tag);
    for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, v);
    svg.appendChild(el);
    return el;
  };

  // rotation axis
  make("line", {
    x1: "12", y1: String(geo.axisY), x2: "348", y2: String(geo.axisY),
    class: "axis",
  });
  // strength envelope and the degradation drop at a
  make("polyline", { points: polylinePoints(geo.curve), class: "backbone" });
  make("line", {
    x1: String(geo.drop[0].x), y1: String(geo.drop[0].y),
    x2: String(geo.drop[1].x), y2: String(geo.drop[1].y),
    class: "backbone-drop",
  });
  // axis markers for a and b
  for (const [marker, label] of [
    [geo.aMarker, "a"],
    [geo.bMarker, "b"],
  ] as const) {
    make("circle", {
      cx: String(marker.x), cy: String(marker.y), r: "4",
      class: `marker marker-${label}`, "data-marker": label,
    });
    const text = make("text", {
      x: String(marker.x), y: String(marker.y + 16),
      class: "marker-label", "text-anchor": "middle",
    });
    text.textContent = label;
  }
  caption.textContent =
    `a = ${formatSig4(a)} rad, b = ${formatSig4(b)} rad`;
}

export function render(els: ViewElements, state: ViewState): void {
  // per-field validity highlighting
  for (const key of FEATURE_KEYS) {
    const field = state.form.fields[key];
    els.fields[key]?.classList.toggle("invalid", !field.valid);
    const errorEl = els.fieldErrors[key];
    if (errorEl) errorEl.textContent = field.valid ? "" : (field.message ?? "");
  }

  els.errorBanner.textContent = state.error ?? "";
  els.errorBanner.hidden = state.error === null;
  els.staleFlag.hidden = !(state.stale || state.pending);
  els.resultsSection.classList.toggle("stale", state.stale || state.pending);

  const response = state.lastResponse;
  if (!response) return;
  renderResultsTable(els.resultsBody, response);
  renderProbabilities(els.probBars, els.modeBadge, response);
  els.xTest.textContent =
    response.x_test === null
      ? "x_test: n/a (no dataset statistics loaded)"
      : `x_test: ${formatSig4(response.x_test)} (separation from dataset mean)`;
  const params = pickEnvelopeParams(response);
  if (params) renderEnvelope(els.envelopeSvg, els.envelopeCaption, params.a, params.b);
}
