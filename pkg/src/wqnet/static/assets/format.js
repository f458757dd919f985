// View-model builders: everything the result panes show, as plain data,
// so rendering is a dumb DOM write and the logic is testable without one.
/** Server labels map to badge colors; anything unexpected stays neutral. */
export function badgeTone(label) {
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
const CLASS_ORDER = ["Average", "Good", "Poor"];
export function classifyView(response) {
    return {
        label: response.label,
        tone: badgeTone(response.label),
        probabilityLines: response.probabilities.map((p, i) => `${CLASS_ORDER[i] ?? `class ${i}`}: ${p.toFixed(3)}`),
    };
}
export function predictView(response) {
    return {
        text: `${response.wqi.toFixed(2)} - ${response.label}`,
        label: response.label,
        tone: badgeTone(response.label),
    };
}
