import { describe, expect, it } from "vitest";
import {
  validateCategory1,
  validateCategory2,
  type Category1Form,
  type Category2Form,
} from "../src/forms.js";

function cat1(overrides: Partial<Category1Form> = {}): Category1Form {
  return {
    states: ["CA", "TX"],
    featureLeft: "vaccinations",
    featureRight: "trips",
    rangeStart: "2020-12-01",
    rangeEnd: "2021-01-31",
    ...overrides,
  };
}

function cat2(overrides: Partial<Category2Form> = {}): Category2Form {
  return {
    feature: "new_cases",
    periodAStart: "2020-02-18",
    periodAEnd: "2020-03-02",
    periodBStart: "2020-03-20",
    periodBEnd: "2020-04-02",
    ...overrides,
  };
}

describe("validateCategory1", () => {
  it("accepts a well-formed query", () => {
    expect(validateCategory1(cat1())).toEqual([]);
  });

  it("rejects zero and more than five states", () => {
    expect(validateCategory1(cat1({ states: [] }))).toHaveLength(1);
    expect(
      validateCategory1(cat1({ states: ["CA", "TX", "FL", "NY", "WV", "OR"] })),
    ).toHaveLength(1);
    expect(
      validateCategory1(cat1({ states: ["CA", "TX", "FL", "NY", "WV"] })),
    ).toEqual([]);
  });

  it("rejects identical left and right features", () => {
    expect(
      validateCategory1(cat1({ featureRight: "vaccinations" })),
    ).toEqual(["choose two distinct features"]);
  });

  it("rejects malformed and inverted date ranges", () => {
    expect(validateCategory1(cat1({ rangeStart: "12/01/2020" }))).toEqual([
      "enter valid dates",
    ]);
    expect(
      validateCategory1(cat1({ rangeStart: "2021-02-01", rangeEnd: "2021-01-01" })),
    ).toEqual(["range start must not be after end"]);
  });
});

describe("validateCategory2", () => {
  it("accepts a well-formed query", () => {
    expect(validateCategory2(cat2())).toEqual([]);
  });

  it("rejects a period longer than 31 days", () => {
    const errors = validateCategory2(
      cat2({ periodAStart: "2020-01-01", periodAEnd: "2020-02-05" }),
    );
    expect(errors).toEqual(["period A must be at most 31 days"]);
  });

  it("accepts a period of exactly 31 days", () => {
    expect(
      validateCategory2(
        cat2({ periodAStart: "2020-01-01", periodAEnd: "2020-01-31" }),
      ),
    ).toEqual([]);
  });

  it("rejects overlapping periods", () => {
    const errors = validateCategory2(
      cat2({ periodBStart: "2020-02-25", periodBEnd: "2020-03-10" }),
    );
    expect(errors).toEqual(["periods overlap"]);
  });

  it("rejects period B entirely before period A", () => {
    const errors = validateCategory2(
      cat2({ periodBStart: "2020-01-01", periodBEnd: "2020-01-10" }),
    );
    expect(errors).toEqual(["period B must come after period A"]);
  });

  it("stops at date parsing when any date is malformed", () => {
    expect(validateCategory2(cat2({ periodBEnd: "soon" }))).toEqual([
      "enter valid dates for both periods",
    ]);
  });
});
