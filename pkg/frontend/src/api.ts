// Thin client for the prediction service. Errors never throw; they come
// back as banner-ready messages, with network failures mapped to the
// "service unavailable" banner.

export interface ClassifyResponse {
  class_index: 0 | 1 | 2;
  label: string;
  probabilities: number[];
}

export interface PredictResponse {
  wqi: number;
  label: string;
}

export interface HealthResponse {
  status: string;
  classifier_loaded: boolean;
  regressor_loaded: boolean;
}

export type ApiResult<T> = { ok: true; data: T } | { ok: false; error: string };

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export const SERVICE_UNAVAILABLE = "service unavailable";

async function postJson<T>(url: string, body: unknown, fetchFn: FetchLike): Promise<ApiResult<T>> {
  let response: Response;
  try {
    response = await fetchFn(url, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  } catch {
    return { ok: false, error: SERVICE_UNAVAILABLE };
  }
  let payload: unknown = null;
  try {
    payload = await response.json();
  } catch {
    payload = null;
  }
  if (!response.ok) {
    const err = payload as { error?: string; field?: string } | null;
    if (err && err.error) {
      return { ok: false, error: err.field ? `${err.error}: ${err.field}` : err.error };
    }
    return { ok: false, error: `request failed (HTTP ${response.status})` };
  }
  return { ok: true, data: payload as T };
}

export function classify(
  body: Record<string, number>,
  fetchFn: FetchLike = fetch,
): Promise<ApiResult<ClassifyResponse>> {
  return postJson("/api/classify", body, fetchFn);
}

export function predict(
  body: Record<string, number>,
  fetchFn: FetchLike = fetch,
): Promise<ApiResult<PredictResponse>> {
  return postJson("/api/predict", body, fetchFn);
}

export async function health(fetchFn: FetchLike = fetch): Promise<ApiResult<HealthResponse>> {
  try {
    const response = await fetchFn("/api/health");
    if (!response.ok) return { ok: false, error: `request failed (HTTP ${response.status})` };
    return { ok: true, data: (await response.json()) as HealthResponse };
  } catch {
    return { ok: false, error: SERVICE_UNAVAILABLE };
  }
}
