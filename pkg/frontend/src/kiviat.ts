import type { ComparePayload, PolygonDump } from "./types.js";

export interface PolygonPath {
  label: string;
  /** canvas-space points, straight from the API's vertices */
  points: [number, number][];
  /** the API vertices this path was built from, untouched */
  vertices: [number, number][];
  color: string;
  emphasized: boolean;
}

export const POLYGON_ORDER = ["distance", "time", "transfers", "hops", "real"] as const;

const COLORS: Record<string, string> = {
  real: "#d62728",
  distance: "#1f77b4",
  time: "#2ca02c",
  transfers: "#9467bd",
  hops: "#ff7f0e",
};

/**
 * Scale the API's normalized radar vertices (unit diamond) onto a square
 * canvas. The geometry is a pure transform of the service's vertices; no
 * metric is renormalized client-side.
 */
export function polygonPaths(payload: ComparePayload, size: number): PolygonPath[] {
  const half = size / 2;
  const scale = half * 0.9;
  const out: PolygonPath[] = [];
  for (const label of POLYGON_ORDER) {
    const dump: PolygonDump | undefined = payload.polygons[label];
    if (!dump) continue;
    const points = dump.vertices.map(
      ([vx, vy]) => [half + vx * scale, half - vy * scale] as [number, number],
    );
    out.push({
      label,
      points,
      vertices: dump.vertices.map(([vx, vy]) => [vx, vy]),
      color: COLORS[label] ?? "#444",
      emphasized: label === "real",
    });
  }
  return out;
}

export interface RouteRow {
  label: string;
  lines: string;
  distance_km: number;
  time_s: number;
  transfers: number;
  hops: number;
}

/** Table rows for the five routes, straight from the payload metrics. */
export function routeTable(payload: ComparePayload): RouteRow[] {
  const rows: RouteRow[] = [];
  const add = (label: string, dump: ComparePayload["real"]) => {
    rows.push({
      label,
      lines: dump.legs.map((l) => l.line).join(" > "),
      distance_km: dump.metrics.distance_km,
      time_s: dump.metrics.time_s,
      transfers: dump.metrics.transfers,
      hops: dump.metrics.hops,
    });
  };
  add("ridden", payload.real);
  for (const k of ["distance", "time", "transfers", "hops"] as const) {
    add(`best ${k}`, payload.optimal[k]);
  }
  return rows;
}

/** Objectives tied with the winner under the given method. */
export function tiedBadges(payload: ComparePayload, method = "pi"): string[] {
  const pref = payload.preference[method];
  if (!pref) return [];
  return pref.tied.length > 1 ? [...pref.tied] : [];
}
