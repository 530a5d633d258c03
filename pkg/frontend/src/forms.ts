// Client-side form validation. Deliberately a strict subset of the server
// rules: anything that passes here is accepted by the server schema.

export interface Category1Form {
  states: string[];
  featureLeft: string;
  featureRight: string;
  rangeStart: string; // ISO date
  rangeEnd: string;
}

export interface Category2Form {
  feature: string;
  periodAStart: string;
  periodAEnd: string;
  periodBStart: string;
  periodBEnd: string;
}

export const MAX_STATES = 5;
export const MAX_PERIOD_DAYS = 31;

const ISO_DATE = /^\d{4}-\d{2}-\d{2}$/;

function parseDate(value: string): Date | null {
  if (!ISO_DATE.test(value)) return null;
  const date = new Date(`${value}T00:00:00Z`);
  return Number.isNaN(date.getTime()) ? null : date;
}

function daysBetween(a: Date, b: Date): number {
  return Math.round((b.getTime() - a.getTime()) / 86_400_000);
}

export function validateCategory1(form: Category1Form): string[] {
  const errors: string[] = [];
  if (form.states.length < 1 || form.states.length > MAX_STATES) {
    errors.push(`select between 1 and ${MAX_STATES} states`);
  }
  if (!form.featureLeft || !form.featureRight) {
    errors.push("choose both features");
  } else if (form.featureLeft === form.featureRight) {
    errors.push("choose two distinct features");
  }
  const start = parseDate(form.rangeStart);
  const end = parseDate(form.rangeEnd);
  if (!start || !end) {
    errors.push("enter valid dates");
  } else if (start.getTime() > end.getTime()) {
    errors.push("range start must not be after end");
  }
  return errors;
}

export function validateCategory2(form: Category2Form): string[] {
  const errors: string[] = [];
  if (!form.feature) {
    errors.push("choose a feature");
  }
  const aStart = parseDate(form.periodAStart);
  const aEnd = parseDate(form.periodAEnd);
  const bStart = parseDate(form.periodBStart);
  const bEnd = parseDate(form.periodBEnd);
  if (!aStart || !aEnd || !bStart || !bEnd) {
    errors.push("enter valid dates for both periods");
    return errors;
  }
  for (const [label, s, e] of [
    ["period A", aStart, aEnd],
    ["period B", bStart, bEnd],
  ] as const) {
    if (s.getTime() > e.getTime()) {
      errors.push(`${label} start must not be after end`);
    } else if (daysBetween(s, e) + 1 > MAX_PERIOD_DAYS) {
      errors.push(`${label} must be at most ${MAX_PERIOD_DAYS} days`);
    }
  }
  if (aStart.getTime() <= bEnd.getTime() && bStart.getTime() <= aEnd.getTime()) {
    errors.push("periods overlap");
  } else if (bEnd.getTime() < aStart.getTime()) {
    errors.push("period B must come after period A");
  }
  return errors;
}
