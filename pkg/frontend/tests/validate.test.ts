import { describe, expect, it } from "vitest";

import { isValid, validateSingular } from "../src/validate.js";
import type { SingularDraft } from "../src/validate.js";

function draft(overrides: Partial<SingularDraft> = {}): SingularDraft {
  return {
    name: "Priya Sharma",
    app_id: "EN555",
    gender: "Female",
    percent: "89.17",
    merit: "157",
    type: "OTHER",
    algorithm: "C4.5",
    ...overrides,
  };
}

describe("validateSingular", () => {
  it("accepts a complete in-range draft", () => {
    expect(isValid(validateSingular(draft()))).toBe(true);
  });

  it("rejects percent above 100", () => {
    const errors = validateSingular(draft({ percent: "123" }));
    expect(errors.percent).toBe("PCM percent must be between 0 and 100");
    expect(isValid(errors)).toBe(false);
  });

  it("rejects merit outside 0..200", () => {
    expect(validateSingular(draft({ merit: "250" })).merit)
      .toBe("merit marks must be between 0 and 200");
    expect(validateSingular(draft({ merit: "-1" })).merit)
      .toMatch(/between 0 and 200/);
  });

  it("accepts boundary values", () => {
    expect(isValid(validateSingular(draft({ percent: "0" })))).toBe(true);
    expect(isValid(validateSingular(draft({ percent: "100" })))).toBe(true);
    expect(isValid(validateSingular(draft({ merit: "200" })))).toBe(true);
  });

  it("flags missing fields as required", () => {
    const errors = validateSingular(draft({ merit: "", name: "  " }));
    expect(errors.merit).toBe("required");
    expect(errors.name).toBe("required");
  });

  it("rejects non-numeric scores", () => {
    expect(validateSingular(draft({ percent: "ninety" })).percent)
      .toBe("PCM percent must be a number");
    expect(validateSingular(draft({ merit: "12x" })).merit)
      .toBe("merit marks must be a number");
  });

  it("reports every broken field at once", () => {
    const errors = validateSingular(
      draft({ percent: "123", merit: "", app_id: "" }));
    expect(Object.keys(errors).sort())
      .toEqual(["app_id", "merit", "percent"]);
  });
});
