/**
 * What-if loop orchestration.
 *
 * Any edit marks the view stale and (when the form is valid) schedules
 * exactly one re-query after the debounce window.  A single request is in
 * flight at a time: firing a new one aborts its predecessor, and a
 * response is applied only if no edit happened after it was sent.  A
 * failed request surfaces an error banner but keeps the previous results.
 */

import { ApiError, type PredictRequest, type PredictResponse, type Shape } from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import {
  canSubmit,
  initialForm,
  toRequest,
  withField,
  withModels,
  withShape,
  type FormState,
} from "./form.js";
import type { FeatureKey } from "./api.js";

export interface ViewState {
  form: FormState;
  lastResponse: PredictResponse | null;
  stale: boolean;
  pending: boolean;
  error: string | null;
}

export type Listener = (state: ViewState) => void;

/** The slice of the API client the controller needs (swappable in tests). */
export interface PredictApi {
  predict(req: PredictRequest, signal?: AbortSignal): Promise<PredictResponse>;
}

export const DEBOUNCE_MS = 300;

export class WhatIfController {
  private form: FormState = initialForm();
  private lastResponse: PredictResponse | null = null;
  private stale = false;
  private pending = false;
  private error: string | null = null;

  private revision = 0;
  private inflight: AbortController | null = null;
  private readonly scheduleQuery: Debounced<[]>;
  private readonly listeners: Listener[] = [];

  constructor(
    private readonly api: PredictApi,
    debounceMs: number = DEBOUNCE_MS,
  ) {
    this.scheduleQuery = debounce(() => {
      void this.fire();
    }, debounceMs);
  }

  get state(): ViewState {
    return {
      form: this.form,
      lastResponse: this.lastResponse,
      stale: this.stale,
      pending: this.pending,
      error: this.error,
    };
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
    listener(this.state);
  }

  private notify(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  setField(key: FeatureKey, raw: string): void {
    this.edited(withField(this.form, key, raw));
  }

  setShape(shape: Shape): void {
    this.edited(withShape(this.form, shape));
  }

  setModels(models: string[]): void {
    this.edited(withModels(this.form, models));
  }

  /** Immediate re-query (used on startup); still respects validity. */
  refresh(): void {
    this.revision += 1;
    void this.fire();
  }

  private edited(next: FormState): void {
    this.form = next;
    this.revision += 1;
    this.stale = true;
    if (canSubmit(next)) {
      this.scheduleQuery();
    } else {
      // never send a malformed request; drop any scheduled one
      this.scheduleQuery.cancel();
    }
    this.notify();
  }

  private async fire(): Promise<void> {
    if (!canSubmit(this.form)) return;
    const sentRevision = this.revision;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.pending = true;
    this.notify();
    try {
      const response = await this.api.predict(
        toRequest(this.form, `rev-${sentRevision}`),
        controller.signal,
      );
      if (sentRevision !== this.revision) return; // superseded by an edit
      this.lastResponse = response;
      this.stale = false;
      this.error = null;
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") return;
      if (sentRevision !== this.revision) return;
      this.error = err instanceof ApiError ? err.message : String(err);
      // previous results stay on screen
    } finally {
      if (this.inflight === controller) {
        this.inflight = null;
        this.pending = false;
      }
      if (sentRevision === this.revision) this.notify();
    }
  }
}
