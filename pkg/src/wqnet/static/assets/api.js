// Thin client for the prediction service. Errors never throw; they come
// back as banner-ready messages, with network failures mapped to the
// "service unavailable" banner.
export const SERVICE_UNAVAILABLE = "service unavailable";
async function postJson(url, body, fetchFn) {
    let response;
    try {
        response = await fetchFn(url, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
    }
    catch {
        return { ok: false, error: SERVICE_UNAVAILABLE };
    }
    let payload = null;
    try {
        payload = await response.json();
    }
    catch {
        payload = null;
    }
    if (!response.ok) {
        const err = payload;
        if (err && err.error) {
            return { ok: false, error: err.field ? `${err.error}: ${err.field}` : err.error };
        }
        return { ok: false, error: `request failed (HTTP ${response.status})` };
    }
    return { ok: true, data: payload };
}
export function classify(body, fetchFn = fetch) {
    return postJson("/api/classify", body, fetchFn);
}
export function predict(body, fetchFn = fetch) {
    return postJson("/api/predict", body, fetchFn);
}
export async function health(fetchFn = fetch) {
    try {
        const response = await fetchFn("/api/health");
        if (!response.ok)
            return { ok: false, error: `request failed (HTTP ${response.status})` };
        return { ok: true, data: (await response.json()) };
    }
    catch {
        return { ok: false, error: SERVICE_UNAVAILABLE };
    }
}
