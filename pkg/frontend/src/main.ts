// Tabbed single-page dashboard: category I (timelines) and category II
// (community map), with ticker and articles strips.

import {
  RequestFailed,
  fetchArticles,
  fetchMap,
  fetchTicker,
  fetchTimeline,
} from "./api.js";
import { validateCategory1, validateCategory2 } from "./forms.js";
import { renderMap, type CountyGeo } from "./mapView.js";
import { TimelineView } from "./timelineView.js";
import { createTicker } from "./ticker.js";

const STATE_OPTIONS = ["CA", "TX", "FL", "NY", "WV"];
const TIMELINE_FEATURES = [
  "new_cases",
  "new_tests",
  "trips",
  "vaccinations",
  "cases",
  "deaths",
];
const MAP_FEATURES = ["new_cases", "new_deaths"];

let geo: CountyGeo | null = null;
let inFlight = false;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function showErrors(box: HTMLElement, errors: string[]): void {
  box.textContent = "";
  for (const message of errors) {
    box.appendChild(el("div", "field-error", message));
  }
}

function showBanner(box: HTMLElement, message: string, retry: () => void): void {
  box.textContent = "";
  const banner = el("div", "error-banner", message + " ");
  const button = el("button", "", "Retry");
  button.addEventListener("click", retry);
  banner.appendChild(button);
  box.appendChild(banner);
}

function cacheNote(target: HTMLElement, status: string): void {
  target.textContent = status ? `cache: ${status.toLowerCase()}` : "";
}

async function loadArticles(strip: HTMLElement, period: string): Promise<void> {
  try {
    const articles = await fetchArticles(period);
    strip.textContent = "";
    strip.appendChild(el("h4", "", "Related articles"));
    if (articles.length === 0) {
      strip.appendChild(el("div", "", "No matching articles for this period."));
      return;
    }
    for (const article of articles) {
      const row = el("div", "article-row");
      const link = el("a", "", article.title);
      link.setAttribute("href", article.url);
      link.setAttribute("target", "_blank");
      row.appendChild(link);
      row.appendChild(
        el("span", "article-date", ` (${article.published.slice(0, 10)})`),
      );
      strip.appendChild(row);
    }
  } catch {
    strip.textContent = "articles unavailable";
  }
}

function buildCategory1(panel: HTMLElement): void {
  const form = el("form", "query-form");
  const errorBox = el("div", "error-box");
  const statusNote = el("span", "cache-note");
  const chartHost = el("div", "chart-host");

  const stateSelect = el("select") as HTMLSelectElement;
  stateSelect.multiple = true;
  stateSelect.size = STATE_OPTIONS.length;
  for (const s of STATE_OPTIONS) {
    const opt = document.createElement("option");
    opt.value = s;
    opt.textContent = s;
    stateSelect.appendChild(opt);
  }
  const leftSelect = featureSelect(TIMELINE_FEATURES, "vaccinations");
  const rightSelect = featureSelect(TIMELINE_FEATURES, "trips");
  const startInput = dateInput("2020-12-01");
  const endInput = dateInput("2021-01-31");
  const submit = el("button", "", "Show timelines");
  submit.setAttribute("type", "submit");

  form.append(
    labeled("States (up to 5)", stateSelect),
    labeled("Left feature", leftSelect),
    labeled("Right feature", rightSelect),
    labeled("From", startInput),
    labeled("To", endInput),
    submit,
    statusNote,
  );

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void submitCategory1();
  });

  async function submitCategory1(): Promise<void> {
    const states = [...stateSelect.selectedOptions].map((o) => o.value);
    const errors = validateCategory1({
      states,
      featureLeft: leftSelect.value,
      featureRight: rightSelect.value,
      rangeStart: startInput.value,
      rangeEnd: endInput.value,
    });
    showErrors(errorBox, errors);
    if (errors.length || inFlight) return;
    inFlight = true;
    chartHost.textContent = "loading…";
    try {
      const { payload, cacheStatus } = await fetchTimeline(
        states,
        leftSelect.value,
        rightSelect.value,
        `${startInput.value}:${endInput.value}`,
      );
      new TimelineView(chartHost, payload);
      cacheNote(statusNote, cacheStatus);
      void tickerHandle?.refresh();
    } catch (err) {
      if (err instanceof RequestFailed && err.status === 400 && err.body) {
        showErrors(errorBox, [err.body.detail]);
        chartHost.textContent = "";
      } else {
        showBanner(chartHost, "Request failed.", () => void submitCategory1());
      }
    } finally {
      inFlight = false;
    }
  }

  panel.append(form, errorBox, chartHost);
}

function buildCategory2(panel: HTMLElement): void {
  const form = el("form", "query-form");
  const errorBox = el("div", "error-box");
  const statusNote = el("span", "cache-note");
  const mapHost = el("div", "map-host");
  const articlesStrip = el("div", "articles-strip");

  const featureSel = featureSelect(MAP_FEATURES, "new_cases");
  const paStart = dateInput("2020-02-18");
  const paEnd = dateInput("2020-03-02");
  const pbStart = dateInput("2020-03-20");
  const pbEnd = dateInput("2020-04-02");
  const submit = el("button", "", "Show communities");
  submit.setAttribute("type", "submit");

  form.append(
    labeled("Feature", featureSel),
    labeled("Period A start", paStart),
    labeled("Period A end", paEnd),
    labeled("Period B start", pbStart),
    labeled("Period B end", pbEnd),
    submit,
    statusNote,
  );

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    void submitCategory2();
  });

  async function submitCategory2(): Promise<void> {
    const errors = validateCategory2({
      feature: featureSel.value,
      periodAStart: paStart.value,
      periodAEnd: paEnd.value,
      periodBStart: pbStart.value,
      periodBEnd: pbEnd.value,
    });
    showErrors(errorBox, errors);
    if (errors.length || inFlight || !geo) return;
    inFlight = true;
    mapHost.textContent = "loading…";
    const pb = `${pbStart.value}:${pbEnd.value}`;
    try {
      const { payload, cacheStatus } = await fetchMap(
        featureSel.value,
        `${paStart.value}:${paEnd.value}`,
        pb,
      );
      renderMap(mapHost, payload, geo);
      cacheNote(statusNote, cacheStatus);
      void loadArticles(articlesStrip, pb); // articles track the later period
      void tickerHandle?.refresh();
    } catch (err) {
      if (err instanceof RequestFailed && err.status === 400 && err.body) {
        showErrors(errorBox, [err.body.detail]);
        mapHost.textContent = "";
      } else {
        showBanner(mapHost, "Request failed.", () => void submitCategory2());
      }
    } finally {
      inFlight = false;
    }
  }

  panel.append(form, errorBox, mapHost, articlesStrip);
}

function featureSelect(options: string[], selected: string): HTMLSelectElement {
  const select = el("select") as HTMLSelectElement;
  for (const name of options) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    opt.selected = name === selected;
    select.appendChild(opt);
  }
  return select;
}

function dateInput(value: string): HTMLInputElement {
  const input = el("input") as HTMLInputElement;
  input.type = "date";
  input.value = value;
  return input;
}

function labeled(text: string, control: HTMLElement): HTMLElement {
  const label = el("label");
  label.appendChild(el("span", "", text));
  label.appendChild(control);
  return label;
}

let tickerHandle: ReturnType<typeof createTicker> | null = null;

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;

  const tickerBox = el("div");
  root.appendChild(tickerBox);
  tickerHandle = createTicker(tickerBox, () => ["CA", "TX"], fetchTicker);

  const tabBar = el("div", "tab-bar");
  const panels: Record<string, HTMLElement> = {
    "Base data (timelines)": el("div", "tab-panel"),
    "Analysis (community map)": el("div", "tab-panel"),
  };
  const names = Object.keys(panels);
  names.forEach((name, idx) => {
    const button = el("button", "tab-button", name);
    button.addEventListener("click", () => {
      names.forEach((other, j) => {
        panels[other].style.display = other === name ? "" : "none";
        tabBar.children[j].classList.toggle("active", other === name);
      });
    });
    tabBar.appendChild(button);
    panels[name].style.display = idx === 0 ? "" : "none";
  });
  root.appendChild(tabBar);

  buildCategory1(panels[names[0]]);
  buildCategory2(panels[names[1]]);
  for (const name of names) root.appendChild(panels[name]);

  try {
    const resp = await fetch("./assets/us-counties.demo.geo.json");
    geo = (await resp.json()) as CountyGeo;
  } catch {
    console.warn("county geometry unavailable; map disabled");
  }
}

void boot();
