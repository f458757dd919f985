// Client-side mirror of the server's numeric contract: a request is only
// sent when all four fields parse as finite numbers.
export const FIELDS = ["temperature", "ph", "ec", "do"];
export const FIELD_LABELS = {
    temperature: "Temperature (°C)",
    ph: "pH",
    ec: "EC (µS/cm)",
    do: "DO (mg/L)",
};
/** Strict numeric parse: trimmed, `.` decimal only. "7,5" is invalid. */
export function parseFiniteNumber(raw) {
    const trimmed = raw.trim();
    if (trimmed === "")
        return null;
    const n = Number(trimmed);
    return Number.isFinite(n) ? n : null;
}
export function validate(values) {
    const perField = {};
    const numbers = {};
    let allValid = true;
    for (const field of FIELDS) {
        const parsed = parseFiniteNumber(values[field] ?? "");
        perField[field] = parsed !== null;
        if (parsed === null) {
            allValid = false;
        }
        else {
            numbers[field] = parsed;
        }
    }
    return { perField, allValid, numbers: allValid ? numbers : null };
}
export function emptyForm() {
    return { temperature: "", ph: "", ec: "", do: "" };
}
