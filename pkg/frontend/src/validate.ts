// Client-side checks for the singular evaluation form. Ranges mirror the
// server's bounds (percent within 0-100, merit marks within 0-200); the
// server revalidates everything, this layer only stops obvious garbage
// before a request is made.

export interface SingularDraft {
  name: string;
  app_id: string;
  gender: string;
  percent: string;
  merit: string;
  type: string;
  algorithm: string;
}

export type FieldErrors = Partial<Record<keyof SingularDraft, string>>;

const REQUIRED: Array<keyof SingularDraft> = [
  "name", "app_id", "gender", "percent", "merit", "type", "algorithm",
];

function numeric(raw: string, label: string, low: number,
                 high: number): string | null {
  const value = Number(raw);
  if (raw.trim() === "" || !Number.isFinite(value)) {
    return `${label} must be a number`;
  }
  if (value < low || value > high) {
    return `${label} must be between ${low} and ${high}`;
  }
  return null;
}

export function validateSingular(draft: SingularDraft): FieldErrors {
  const errors: FieldErrors = {};
  for (const field of REQUIRED) {
    if (draft[field].trim() === "") {
      errors[field] = "required";
    }
  }
  if (!errors.percent) {
    const message = numeric(draft.percent, "PCM percent", 0, 100);
    if (message) errors.percent = message;
  }
  if (!errors.merit) {
    const message = numeric(draft.merit, "merit marks", 0, 200);
    if (message) errors.merit = message;
  }
  return errors;
}

export function isValid(errors: FieldErrors): boolean {
  return Object.keys(errors).length === 0;
}
