import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import type { TickerRow } from "../src/api.js";
import { createTicker } from "../src/ticker.js";

const ROWS: TickerRow[] = [
  { region: "CA", cases: 120000, deaths: 2100, as_of: "2021-01-28" },
  { region: "US", cases: 990000, deaths: 31000, as_of: "2021-01-28" },
  { region: "WORLD", cases: 5200000, deaths: 140000, as_of: "2021-01-27" },
];

describe("createTicker", () => {
  let host: HTMLElement;

  beforeEach(() => {
    vi.useFakeTimers();
    host = document.createElement("div");
    document.body.appendChild(host);
  });

  afterEach(() => {
    vi.useRealTimers();
    host.remove();
  });

  it("renders one tile per region", async () => {
    const handle = createTicker(host, () => ["CA"], async () => ROWS);
    await vi.advanceTimersByTimeAsync(0);
    const tiles = host.querySelectorAll(".ticker-tile");
    expect(tiles).toHaveLength(3);
    expect(tiles[0].textContent).toContain("CA");
    expect(tiles[2].textContent).toContain("WORLD");
    expect(host.querySelector(".stale-dot")).toBeNull();
    handle.stop();
  });

  it("keeps last values and marks them stale when a poll fails", async () => {
    let fail = false;
    const handle = createTicker(host, () => ["CA"], async () => {
      if (fail) throw new Error("offline");
      return ROWS;
    });
    await vi.advanceTimersByTimeAsync(0);
    expect(host.querySelectorAll(".ticker-tile")).toHaveLength(3);

    fail = true;
    await vi.advanceTimersByTimeAsync(60_000);
    expect(host.querySelectorAll(".ticker-tile")).toHaveLength(3);
    expect(host.querySelector(".stale-dot")).not.toBeNull();

    fail = false;
    await vi.advanceTimersByTimeAsync(60_000);
    expect(host.querySelector(".stale-dot")).toBeNull();
    handle.stop();
  });
});
