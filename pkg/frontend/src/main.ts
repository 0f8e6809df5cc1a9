import { ApiClient, FEATURE_KEYS, type FeatureKey, type Shape } from "./api.js";
import { WhatIfController } from "./controller.js";
import { collectElements, render } from "./view.js";

function bind(doc: Document): void {
  const controller = new WhatIfController(new ApiClient());
  const els = collectElements(doc);

  for (const key of FEATURE_KEYS) {
    const input = els.fields[key];
    input?.addEventListener("input", () => {
      controller.setField(key as FeatureKey, input.value);
    });
  }

  for (const radio of doc.querySelectorAll<HTMLInputElement>("input[name=shape]")) {
    radio.addEventListener("change", () => {
      if (radio.checked) controller.setShape(radio.value as Shape);
    });
  }

  for (const box of doc.querySelectorAll<HTMLInputElement>("input[name=model]")) {
    box.addEventListener("change", () => {
      const chosen = [...doc.querySelectorAll<HTMLInputElement>("input[name=model]:checked")]
        .map((el) => el.value);
      controller.setModels(chosen);
    });
  }

  controller.subscribe((state) => render(els, state));
  controller.refresh();
}

document.addEventListener("DOMContentLoaded", () => bind(document));
