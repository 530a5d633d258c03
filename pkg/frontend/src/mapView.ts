// Interactive choropleth: county polygons from a bundled GeoJSON keyed by
// FIPS, filled with payload colors, with hover text, legend, and pan/zoom.

import type { MapPayload } from "./api.js";

export interface CountyFeature {
  type: "Feature";
  id: string; // 5-digit FIPS
  properties: { name?: string };
  geometry: { type: "Polygon"; coordinates: number[][][] };
}

export interface CountyGeo {
  type: "FeatureCollection";
  features: CountyFeature[];
}

const SVG_NS = "http://www.w3.org/2000/svg";

export interface MapRenderResult {
  svg: SVGSVGElement;
  filled: number;
  skipped: number;
}

export function renderMap(
  container: HTMLElement,
  payload: MapPayload,
  geo: CountyGeo,
): MapRenderResult {
  container.textContent = "";

  const title = document.createElement("h3");
  title.className = "map-title";
  title.textContent = payload.title;
  container.appendChild(title);

  const byFips = new Map(geo.features.map((f) => [f.id, f]));
  const bounds = geoBounds(geo);
  const viewBox = { ...bounds };

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("class", "county-map");
  svg.setAttribute("viewBox", formatViewBox(viewBox));
  svg.setAttribute("preserveAspectRatio", "xMidYMid meet");

  // unfilled base layer so unmentioned counties stay visible
  for (const feature of geo.features) {
    const path = polygonPath(feature);
    path.setAttribute("class", "county county-base");
    path.setAttribute("fill", "#e8e8e8");
    path.setAttribute("stroke", "#ffffff");
    svg.appendChild(path);
  }

  let filled = 0;
  let skipped = 0;
  for (const county of payload.counties) {
    const feature = byFips.get(county.fips);
    if (!feature) {
      skipped += 1;
      console.warn(`county ${county.fips} missing from base geometry, skipped`);
      continue;
    }
    const path = polygonPath(feature);
    path.setAttribute("class", "county county-filled");
    path.setAttribute("fill", county.color);
    path.setAttribute("stroke", "#ffffff");
    path.setAttribute("data-fips", county.fips);
    path.setAttribute("data-band", county.band);
    const tooltip = document.createElementNS(SVG_NS, "title");
    tooltip.textContent = county.hover;
    path.appendChild(tooltip);
    svg.appendChild(path);
    filled += 1;
  }

  attachPanZoom(svg, viewBox, bounds);
  container.appendChild(svg);
  container.appendChild(buildLegend(payload.legend));
  if (skipped > 0) {
    const badge = document.createElement("span");
    badge.className = "debug-badge";
    badge.textContent = `${skipped} counties skipped (no geometry)`;
    container.appendChild(badge);
  }
  return { svg, filled, skipped };
}

function buildLegend(legend: Record<string, string>): HTMLElement {
  const box = document.createElement("div");
  box.className = "map-legend";
  for (const [band, color] of Object.entries(legend)) {
    const item = document.createElement("span");
    item.className = "legend-item";
    const swatch = document.createElement("span");
    swatch.className = "legend-swatch";
    swatch.style.backgroundColor = color;
    item.appendChild(swatch);
    item.appendChild(document.createTextNode(band));
    box.appendChild(item);
  }
  return box;
}

interface ViewBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

function geoBounds(geo: CountyGeo): ViewBox {
  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const f of geo.features) {
    for (const ring of f.geometry.coordinates) {
      for (const [x, y] of ring) {
        minX = Math.min(minX, x);
        maxX = Math.max(maxX, x);
        minY = Math.min(minY, y);
        maxY = Math.max(maxY, y);
      }
    }
  }
  const pad = 0.02 * Math.max(maxX - minX, maxY - minY, 1);
  return {
    x: minX - pad,
    y: minY - pad,
    w: maxX - minX + 2 * pad,
    h: maxY - minY + 2 * pad,
  };
}

function polygonPath(feature: CountyFeature): SVGPathElement {
  const path = document.createElementNS(SVG_NS, "path");
  const d = feature.geometry.coordinates
    .map(
      (ring) =>
        "M" + ring.map(([x, y]) => `${x},${y}`).join("L") + "Z",
    )
    .join("");
  path.setAttribute("d", d);
  return path;
}

function formatViewBox(vb: ViewBox): string {
  return `${vb.x} ${vb.y} ${vb.w} ${vb.h}`;
}

function attachPanZoom(svg: SVGSVGElement, vb: ViewBox, full: ViewBox): void {
  svg.addEventListener("wheel", (ev: WheelEvent) => {
    ev.preventDefault();
    const factor = ev.deltaY < 0 ? 0.85 : 1 / 0.85;
    const w = Math.min(vb.w * factor, full.w * 4);
    const h = Math.min(vb.h * factor, full.h * 4);
    vb.x += (vb.w - w) / 2;
    vb.y += (vb.h - h) / 2;
    vb.w = w;
    vb.h = h;
    svg.setAttribute("viewBox", formatViewBox(vb));
  });

  let dragging: { x: number; y: number } | null = null;
  svg.addEventListener("pointerdown", (ev: PointerEvent) => {
    dragging = { x: ev.clientX, y: ev.clientY };
  });
  svg.addEventListener("pointermove", (ev: PointerEvent) => {
    if (!dragging) return;
    const rect = svg.getBoundingClientRect();
    const scale = vb.w / Math.max(rect.width, 1);
    vb.x -= (ev.clientX - dragging.x) * scale;
    vb.y -= (ev.clientY - dragging.y) * scale;
    dragging = { x: ev.clientX, y: ev.clientY };
    svg.setAttribute("viewBox", formatViewBox(vb));
  });
  svg.addEventListener("pointerup", () => {
    dragging = null;
  });
}
