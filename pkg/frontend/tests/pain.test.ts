import { describe, expect, it } from "vitest";

import { FACE_GLYPHS, FACE_LABELS } from "../src/panels/pain.js";

describe("pain scale data", () => {
  it("offers exactly 11 selectable points, scores 0..10", () => {
    expect(FACE_LABELS.length).toBe(11);
    expect(FACE_GLYPHS.length).toBe(11);
  });

  it("anchors the scale ends", () => {
    expect(FACE_LABELS[0]).toBe("no hurt");
    expect(FACE_LABELS[10]).toBe("hurts worst");
  });
});
