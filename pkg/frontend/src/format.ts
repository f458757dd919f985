// View-model builders: everything the result panes show, as plain data,
// so rendering is a dumb DOM write and the logic is testable without one.

import type { ClassifyResponse, PredictResponse } from "./api.js";

export type BadgeTone = "good" | "average" | "poor" | "unknown";

/** Server labels map to badge colors; anything unexpected stays neutral. */
export function badgeTone(label: string): BadgeTone {
  switch (label.toLowerCase()) {
    case "good":
      return "good";
    case "average":
      return "average";
    case "poor":
      return "poor";
    default:
      return "unknown";
  }
}

export interface ClassifyView {
  label: string; // server's label, verbatim
  tone: BadgeTone;
  probabilityLines: string[]; // one per class, 3 decimals
}

const CLASS_ORDER = ["Average", "Good", "Poor"];

export function classifyView(response: ClassifyResponse): ClassifyView {
  return {
    label: response.label,
    tone: badgeTone(response.label),
    probabilityLines: response.probabilities.map(
      (p, i) => `${CLASS_ORDER[i] ?? `class ${i}`}: ${p.toFixed(3)}`,
    ),
  };
}

export interface PredictView {
  text: string; // e.g. "80.00 - Average"
  label: string;
  tone: BadgeTone;
}

export function predictView(response: PredictResponse): PredictView {
  return {
    text: `${response.wqi.toFixed(2)} - ${response.label}`,
    label: response.label,
    tone: badgeTone(response.label),
  };
}
