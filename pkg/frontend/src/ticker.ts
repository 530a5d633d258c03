// Auto-refreshing header strip of latest cumulative counts.

import type { TickerRow } from "./api.js";

const POLL_MS = 60_000;

export interface TickerHandle {
  stop(): void;
  refresh(): Promise<void>;
}

export function createTicker(
  container: HTMLElement,
  states: () => string[],
  fetcher: (states: string[]) => Promise<TickerRow[]>,
): TickerHandle {
  container.className = "ticker-strip";
  let stale = false;

  function render(rows: TickerRow[]): void {
    container.textContent = "";
    for (const row of rows) {
      const tile = document.createElement("span");
      tile.className = "ticker-tile";
      tile.dataset.region = row.region;
      tile.textContent =
        `${row.region}: ${row.cases.toLocaleString()} cases / ` +
        `${row.deaths.toLocaleString()} deaths (as of ${row.as_of})`;
      container.appendChild(tile);
    }
    if (stale) {
      const dot = document.createElement("span");
      dot.className = "stale-dot";
      dot.title = "showing last known values";
      container.appendChild(dot);
    }
  }

  let lastRows: TickerRow[] = [];

  async function refresh(): Promise<void> {
    try {
      lastRows = await fetcher(states());
      stale = false;
    } catch {
      stale = true; // keep last values, mark them stale
    }
    render(lastRows);
  }

  const timer = setInterval(refresh, POLL_MS);
  void refresh();
  return {
    stop: () => clearInterval(timer),
    refresh,
  };
}
