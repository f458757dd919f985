// Client-side mirror of the server's numeric contract: a request is only
// sent when all four fields parse as finite numbers.

export const FIELDS = ["temperature", "ph", "ec", "do"] as const;
export type Field = (typeof FIELDS)[number];

export const FIELD_LABELS: Record<Field, string> = {
  temperature: "Temperature (°C)",
  ph: "pH",
  ec: "EC (µS/cm)",
  do: "DO (mg/L)",
};

export type FormValues = Record<Field, string>;

/** Strict numeric parse: trimmed, `.` decimal only. "7,5" is invalid. */
export function parseFiniteNumber(raw: string): number | null {
  const trimmed = raw.trim();
  if (trimmed === "") return null;
  const n = Number(trimmed);
  return Number.isFinite(n) ? n : null;
}

export interface Validity {
  perField: Record<Field, boolean>;
  allValid: boolean;
  numbers: Record<Field, number> | null;
}

export function validate(values: FormValues): Validity {
  const perField = {} as Record<Field, boolean>;
  const numbers = {} as Record<Field, number>;
  let allValid = true;
  for (const field of FIELDS) {
    const parsed = parseFiniteNumber(values[field] ?? "");
    perField[field] = parsed !== null;
    if (parsed === null) {
      allValid = false;
    } else {
      numbers[field] = parsed;
    }
  }
  return { perField, allValid, numbers: allValid ? numbers : null };
}

export function emptyForm(): FormValues {
  return { temperature: "", ph: "", ec: "", do: "" };
}
