import { describe, expect, it } from "vitest";

import { badgeTone, classifyView, predictView } from "../src/format.js";

describe("predictView", () => {
  it("renders wqi to 2 decimals with the server's label", () => {
    const view = predictView({ wqi: 80, label: "Average" });
    expect(view.text).toBe("80.00 - Average");
    expect(view.tone).toBe("average");
  });

  it("keeps the label verbatim, no client-side re-thresholding", () => {
    const view = predictView({ wqi: 250.129, label: "Poor" });
    expect(view.text).toBe("250.13 - Poor");
    expect(view.label).toBe("Poor");
  });
});

describe("classifyView", () => {
  it("shows probabilities to 3 decimals in code order", () => {
    const view = classifyView({
      class_index: 2,
      label: "Poor",
      probabilities: [0.1234, 0.4, 0.4766],
    });
    expect(view.label).toBe("Poor");
    expect(view.tone).toBe("poor");
    expect(view.probabilityLines).toEqual([
      "Average: 0.123",
      "Good: 0.400",
      "Poor: 0.477",
    ]);
  });
});

describe("badgeTone", () => {
  it("maps the three labels and defaults to neutral", () => {
    expect(badgeTone("Good")).toBe("good");
    expect(badgeTone("Average")).toBe("average");
    expect(badgeTone("Poor")).toBe("poor");
    expect(badgeTone("Mystery")).toBe("unknown");
  });
});
