/**
 * Typed client for the prediction service.
 *
 * The UI is a thin client: every displayed number originates from these
 * responses, never from local recomputation.
 */

export type Shape = "R" | "C";
export type Mode = "FC" | "FSC" | "SC";

export const FEATURE_KEYS = [
  "a_over_d",
  "axial_ratio",
  "rho_l",
  "rho_t",
  "s_over_d",
  "vy_over_vo",
] as const;

export type FeatureKey = (typeof FEATURE_KEYS)[number];

export type FeaturesPayload = Record<FeatureKey, number>;

export interface PredictRequest {
  shape: Shape;
  features: FeaturesPayload;
  models: string[];
  id?: string;
}

export interface ModelEstimate {
  a: number | null;
  b: number | null;
  raw_a: number | null;
  raw_b: number | null;
  target?: "a" | "b";
}

export interface Classification {
  scores: Record<Mode, number>;
  probabilities: Record<Mode, number>;
  mode: Mode;
}

export interface PredictResponse {
  id: string | null;
  shape: Shape;
  estimates: Record<string, ModelEstimate>;
  classification: Classification;
  x_test: number | null;
}

export interface ModelsResponse {
  models: Array<{
    name: string;
    kind: "closed-form" | "artifact";
    model_type: string;
    shape: string | null;
    target: string;
  }>;
}

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status?: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Service origin: same origin when served from /ui, localhost otherwise. */
export function resolveBaseUrl(loc?: { protocol: string; origin: string }): string {
  const l = loc ?? (typeof location !== "undefined" ? location : undefined);
  if (!l || l.protocol === "file:") return "http://127.0.0.1:8080";
  return "";
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = resolveBaseUrl(),
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  async predict(req: PredictRequest, signal?: AbortSignal): Promise<PredictResponse> {
    let response: Response;
    try {
      response = await this.fetchFn(`${this.baseUrl}/api/v1/predict`, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(req),
        signal,
      });
    } catch (err) {
      if (err instanceof DOMException && err.name === "AbortError") throw err;
      throw new ApiError(`service unreachable: ${String(err)}`);
    }
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const doc = await response.json();
        const d = doc?.detail;
        if (d?.message) detail = `${d.error ?? "error"}: ${d.message}`;
      } catch {
        /* non-JSON error body; keep the status line */
      }
      throw new ApiError(detail, response.status);
    }
    return (await response.json()) as PredictResponse;
  }

  async models(): Promise<ModelsResponse> {
    const response = await this.fetchFn(`${this.baseUrl}/api/v1/models`);
    if (!response.ok) throw new ApiError(`HTTP ${response.status}`, response.status);
    return (await response.json()) as ModelsResponse;
  }
}
