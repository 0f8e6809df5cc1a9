/**
 * Form state: six numeric inputs with per-field validity, shape selector
 * and the selected model set.  Submission is gated on every field being a
 * finite nonnegative number (a/d and s/d strictly positive), mirroring the
 * service's validation so malformed requests are never sent.
 */

import { FEATURE_KEYS, type FeatureKey, type FeaturesPayload, type PredictRequest, type Shape } from "./api.js";

export interface FieldState {
  raw: string;
  value: number | null;
  valid: boolean;
  message: string | null;
}

export interface FormState {
  shape: Shape;
  fields: Record<FeatureKey, FieldState>;
  models: string[];
}

const STRICTLY_POSITIVE: ReadonlySet<FeatureKey> = new Set(["a_over_d", "s_over_d"]);

export const FIELD_LABELS: Record<FeatureKey, string> = {
  a_over_d: "Span-to-depth a/d",
  axial_ratio: "Axial load ratio P/(A₉f'c)".replace("₉", "g"),
  rho_l: "Longitudinal ratio ρl",
  rho_t: "Transverse ratio ρt",
  s_over_d: "Spacing-to-depth s/d",
  vy_over_vo: "Shear ratio Vy/Vo",
};

export function parseField(key: FeatureKey, raw: string): FieldState {
  const trimmed = raw.trim();
  if (trimmed === "") {
    return { raw, value: null, valid: false, message: "required" };
  }
  const value = Number(trimmed);
  if (!Number.isFinite(value)) {
    return { raw, value: null, valid: false, message: "not a number" };
  }
  if (value < 0) {
    return { raw, value: null, valid: false, message: "must be ≥ 0" };
  }
  if (value === 0 && STRICTLY_POSITIVE.has(key)) {
    return { raw, value: null, valid: false, message: "must be > 0" };
  }
  return { raw, value, valid: true, message: null };
}

export function initialForm(models: string[] = ["gm", "mlr", "prm", "rlr"]): FormState {
  const fields = {} as Record<FeatureKey, FieldState>;
  const defaults: Record<FeatureKey, string> = {
    a_over_d: "3",
    axial_ratio: "0.2",
    rho_l: "0.02",
    rho_t: "0.01",
    s_over_d: "0.5",
    vy_over_vo: "0.8",
  };
  for (const key of FEATURE_KEYS) {
    fields[key] = parseField(key, defaults[key]);
  }
  return { shape: "R", fields, models: [...models] };
}

export function withField(state: FormState, key: FeatureKey, raw: string): FormState {
  return { ...state, fields: { ...state.fields, [key]: parseField(key, raw) } };
}

export function withShape(state: FormState, shape: Shape): FormState {
  return { ...state, shape };
}

export function withModels(state: FormState, models: string[]): FormState {
  return { ...state, models: [...models] };
}

export function canSubmit(state: FormState): boolean {
  return FEATURE_KEYS.every((key) => state.fields[key].valid) && state.models.length > 0;
}

/** Build the request body; only callable when canSubmit(state) holds. */
export function toRequest(state: FormState, id?: string): PredictRequest {
  if (!canSubmit(state)) {
    throw new Error("form is not submittable");
  }
  const features = {} as FeaturesPayload;
  for (const key of FEATURE_KEYS) {
    features[key] = state.fields[key].value as number;
  }
  return { shape: state.shape, features, models: [...state.models], ...(id ? { id } : {}) };
}
