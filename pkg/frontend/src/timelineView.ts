// Two side-by-side animated line charts sharing one slider: play advances both
// frame-by-frame, clicking a tick pauses at that date, double-clicking a state
// in the legend isolates its curves on both charts.

import type { TimelinePayload, TimelineSide } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const FRAMES_PER_SECOND = 4;

const STATE_COLORS = [
  "#1f77b4",
  "#ff7f0e",
  "#2ca02c",
  "#d62728",
  "#9467bd",
];

const CHART_W = 420;
const CHART_H = 220;
const MARGIN = { top: 10, right: 10, bottom: 24, left: 48 };

export class TimelineView {
  private focusIndex = 0;
  private playing: ReturnType<typeof setInterval> | null = null;
  private isolated: string | null = null;
  private readonly states: string[];
  private readonly charts: { svg: SVGSVGElement; cursor: SVGLineElement }[] = [];
  private readonly dateLabels: HTMLElement[] = [];
  private readonly playButton: HTMLButtonElement;
  private readonly ticks: HTMLButtonElement[] = [];

  constructor(
    private readonly container: HTMLElement,
    private readonly payload: TimelinePayload,
  ) {
    if (payload.dates.length === 0) {
      throw new Error("timeline payload has no dates");
    }
    assertSharedAxis(payload);
    this.states = Object.keys(payload.left.series);
    container.textContent = "";

    const chartsRow = document.createElement("div");
    chartsRow.className = "timeline-charts";
    for (const side of [payload.left, payload.right]) {
      chartsRow.appendChild(this.buildChart(side));
    }
    container.appendChild(chartsRow);

    const controls = document.createElement("div");
    controls.className = "timeline-controls";
    this.playButton = document.createElement("button");
    this.playButton.textContent = "Play";
    this.playButton.addEventListener("click", () => {
      if (this.playing) {
        this.pause();
      } else {
        this.play();
      }
    });
    controls.appendChild(this.playButton);

    const slider = document.createElement("div");
    slider.className = "timeline-slider";
    payload.dates.forEach((date, i) => {
      const tick = document.createElement("button");
      tick.className = "slider-tick";
      tick.title = date;
      tick.addEventListener("click", () => {
        this.pause();
        this.setFocus(i);
      });
      slider.appendChild(tick);
      this.ticks.push(tick);
    });
    controls.appendChild(slider);
    container.appendChild(controls);
    container.appendChild(this.buildLegend());

    this.setFocus(0);
  }

  get focusedIndex(): number {
    return this.focusIndex;
  }

  get focusedDate(): string {
    return this.payload.dates[this.focusIndex];
  }

  get isPlaying(): boolean {
    return this.playing !== null;
  }

  play(): void {
    if (this.playing) return;
    this.playButton.textContent = "Pause";
    this.playing = setInterval(() => {
      this.setFocus((this.focusIndex + 1) % this.payload.dates.length);
    }, 1000 / FRAMES_PER_SECOND);
  }

  pause(): void {
    if (this.playing) {
      clearInterval(this.playing);
      this.playing = null;
    }
    this.playButton.textContent = "Play";
  }

  clickTick(index: number): void {
    this.ticks[index].click();
  }

  setFocus(index: number): void {
    this.focusIndex = Math.max(0, Math.min(index, this.payload.dates.length - 1));
    const x = this.xForIndex(this.focusIndex);
    for (const { cursor } of this.charts) {
      cursor.setAttribute("x1", String(x));
      cursor.setAttribute("x2", String(x));
    }
    for (const label of this.dateLabels) {
      label.textContent = this.payload.dates[this.focusIndex];
    }
    this.ticks.forEach((tick, i) =>
      tick.classList.toggle("active", i === this.focusIndex),
    );
  }

  toggleIsolate(state: string): void {
    this.isolated = this.isolated === state ? null : state;
    const visible = (s: string) => this.isolated === null || this.isolated === s;
    for (const { svg } of this.charts) {
      svg
        .querySelectorAll<SVGElement>("[data-state]")
        .forEach((el) =>
          el.setAttribute(
            "visibility",
            visible(el.dataset.state as string) ? "visible" : "hidden",
          ),
        );
    }
    this.container
      .querySelectorAll<HTMLElement>(".timeline-legend [data-state]")
      .forEach((el) =>
        el.classList.toggle(
          "dimmed",
          !visible(el.dataset.state as string),
        ),
      );
  }

  visibleStates(): string[] {
    return this.isolated === null ? [...this.states] : [this.isolated];
  }

  valueAt(sideName: "left" | "right", state: string): number | null {
    return this.payload[sideName].series[state][this.focusIndex];
  }

  private buildChart(side: TimelineSide): HTMLElement {
    const box = document.createElement("div");
    box.className = "timeline-chart";

    const heading = document.createElement("h4");
    heading.textContent = side.feature;
    box.appendChild(heading);

    const svg = document.createElementNS(SVG_NS, "svg");
    svg.setAttribute("viewBox", `0 0 ${CHART_W} ${CHART_H}`);
    svg.setAttribute("class", "timeline-svg");

    const values = Object.values(side.series)
      .flat()
      .filter((v): v is number => v !== null);
    const maxValue = values.length ? Math.max(...values) : 1;

    this.states.forEach((state, idx) => {
      const line = document.createElementNS(SVG_NS, "polyline");
      line.setAttribute("fill", "none");
      line.setAttribute("stroke", STATE_COLORS[idx % STATE_COLORS.length]);
      line.setAttribute("stroke-width", "1.5");
      line.dataset.state = state;
      const points: string[] = [];
      side.series[state].forEach((value, i) => {
        if (value === null) return; // gaps stay gaps
        const x = this.xForIndex(i);
        const y =
          CHART_H - MARGIN.bottom -
          (value / Math.max(maxValue, 1e-9)) * (CHART_H - MARGIN.top - MARGIN.bottom);
        points.push(`${x},${y}`);
      });
      line.setAttribute("points", points.join(" "));
      svg.appendChild(line);
    });

    const cursor = document.createElementNS(SVG_NS, "line");
    cursor.setAttribute("class", "focus-cursor");
    cursor.setAttribute("y1", String(MARGIN.top));
    cursor.setAttribute("y2", String(CHART_H - MARGIN.bottom));
    cursor.setAttribute("stroke", "#555");
    cursor.setAttribute("stroke-dasharray", "3,3");
    svg.appendChild(cursor);

    box.appendChild(svg);

    const dateLabel = document.createElement("div");
    dateLabel.className = "focused-date";
    box.appendChild(dateLabel);
    this.dateLabels.push(dateLabel);

    this.charts.push({ svg, cursor });
    return box;
  }

  private buildLegend(): HTMLElement {
    const legend = document.createElement("div");
    legend.className = "timeline-legend";
    this.states.forEach((state, idx) => {
      const item = document.createElement("button");
      item.dataset.state = state;
      item.style.color = STATE_COLORS[idx % STATE_COLORS.length];
      item.textContent = state;
      item.title = "double-click to isolate";
      item.addEventListener("dblclick", () => this.toggleIsolate(state));
      legend.appendChild(item);
    });
    return legend;
  }

  private xForIndex(i: number): number {
    const span = Math.max(this.payload.dates.length - 1, 1);
    return MARGIN.left + (i / span) * (CHART_W - MARGIN.left - MARGIN.right);
  }
}

function assertSharedAxis(payload: TimelinePayload): void {
  const n = payload.dates.length;
  for (const side of [payload.left, payload.right]) {
    for (const [state, series] of Object.entries(side.series)) {
      if (series.length !== n) {
        throw new Error(
          `series ${side.feature}/${state} has ${series.length} points, axis has ${n}`,
        );
      }
    }
  }
}
