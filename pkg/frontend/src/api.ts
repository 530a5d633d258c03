// Typed client for the dashboard backend's JSON endpoints.

export interface MapCounty {
  fips: string;
  band: string;
  color: string;
  hover: string;
}

export interface MapPayload {
  kind: "map";
  title: string;
  legend: Record<string, string>;
  counties: MapCounty[];
}

export interface TimelineSide {
  feature: string;
  series: Record<string, (number | null)[]>;
}

export interface TimelinePayload {
  kind: "timeline";
  dates: string[];
  left: TimelineSide;
  right: TimelineSide;
}

export interface TickerRow {
  region: string;
  cases: number;
  deaths: number;
  as_of: string;
}

export interface ArticleRow {
  id: string;
  published: string;
  title: string;
  abstract: string;
  url: string;
}

export interface ApiError {
  error: string;
  detail: string;
}

export class RequestFailed extends Error {
  constructor(
    public readonly status: number,
    public readonly body: ApiError | null,
  ) {
    super(body ? `${body.error}: ${body.detail}` : `HTTP ${status}`);
  }
}

export interface CacheTagged<T> {
  payload: T;
  cacheStatus: string; // "HIT" | "MISS" | ""
}

const BASE = "/api/v1";

async function getJson<T>(url: string): Promise<CacheTagged<T>> {
  const resp = await fetch(url);
  if (!resp.ok) {
    let body: ApiError | null = null;
    try {
      body = (await resp.json()) as ApiError;
    } catch {
      // non-JSON error body
    }
    throw new RequestFailed(resp.status, body);
  }
  return {
    payload: (await resp.json()) as T,
    cacheStatus: resp.headers.get("X-Cache") ?? "",
  };
}

export function fetchMap(
  feature: string,
  pa: string,
  pb: string,
): Promise<CacheTagged<MapPayload>> {
  const q = new URLSearchParams({ feature, pa, pb });
  return getJson(`${BASE}/map?${q}`);
}

export function fetchTimeline(
  states: string[],
  left: string,
  right: string,
  range: string,
): Promise<CacheTagged<TimelinePayload>> {
  const q = new URLSearchParams({ states: states.join(","), left, right, range });
  return getJson(`${BASE}/timeline?${q}`);
}

export async function fetchTicker(states: string[]): Promise<TickerRow[]> {
  const q = new URLSearchParams({ states: states.join(",") });
  return (await getJson<TickerRow[]>(`${BASE}/ticker?${q}`)).payload;
}

export async function fetchArticles(period: string): Promise<ArticleRow[]> {
  const q = new URLSearchParams({ period });
  return (await getJson<ArticleRow[]>(`${BASE}/articles?${q}`)).payload;
}
