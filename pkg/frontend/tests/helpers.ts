import type { PredictRequest, PredictResponse } from "../src/api.js";

/** Service response for the worked example (GM model, rectangular). */
export function workedResponse(id: string | null = null): PredictResponse {
  return {
    id,
    shape: "R",
    estimates: {
      gm: {
        a: 0.015629999999999998,
        b: 0.0354,
        raw_a: 0.015629999999999998,
        raw_b: 0.0354,
      },
    },
    classification: {
      scores: { FC: -1.2216, FSC: -0.8264, SC: -2.1985 },
      probabilities: { FC: 0.2277, FSC: 0.3044, SC: 0.0999 },
      mode: "FSC",
    },
    x_test: null,
  };
}

export class FakeApi {
  calls: PredictRequest[] = [];
  failWith: Error | null = null;
  resolver: ((req: PredictRequest) => PredictResponse) | null = null;
  pending: Array<{
    req: PredictRequest;
    resolve: (r: PredictResponse) => void;
    signal?: AbortSignal;
  }> = [];
  manual = false;

  async predict(req: PredictRequest, signal?: AbortSignal): Promise<PredictResponse> {
    this.calls.push(req);
    if (this.failWith) throw this.failWith;
    if (this.manual) {
      return new Promise<PredictResponse>((resolve, reject) => {
        signal?.addEventListener("abort", () =>
          reject(new DOMException("aborted", "AbortError")),
        );
        this.pending.push({ req, resolve, signal });
      });
    }
    return (this.resolver ?? workedResponse)(req) as PredictResponse;
  }
}
