import type { HeatEntry } from "./types.js";
import type { Viewport } from "./state.js";

export interface HeatMarker {
  stopId: string;
  x: number; // canvas px
  y: number;
  radius: number;
  color: string;
  p: number;
  qr: number;
  qb: number;
}

export interface HeatLayer {
  markers: HeatMarker[];
  empty: boolean;
  viewport: Viewport | null;
}

/** Probability 0..1 to a cold->hot color. */
export function heatColor(p: number): string {
  const t = Math.max(0, Math.min(1, p));
  const r = Math.round(40 + 215 * t);
  const g = Math.round(90 * (1 - t) + 40);
  const b = Math.round(200 * (1 - t) + 30);
  return `rgb(${r},${g},${b})`;
}

export function viewportOf(entries: HeatEntry[], pad = 0.08): Viewport | null {
  if (entries.length === 0) return null;
  let minX = Infinity, maxX = -Infinity, minY = Infinity, maxY = -Infinity;
  for (const e of entries) {
    minX = Math.min(minX, e.lat);
    maxX = Math.max(maxX, e.lat);
    minY = Math.min(minY, e.lon);
    maxY = Math.max(maxY, e.lon);
  }
  const spanX = Math.max(maxX - minX, 1e-9);
  const spanY = Math.max(maxY - minY, 1e-9);
  return {
    minX: minX - pad * spanX,
    maxX: maxX + pad * spanX,
    minY: minY - pad * spanY,
    maxY: maxY + pad * spanY,
  };
}

export function project(
  viewport: Viewport,
  width: number,
  height: number,
  x: number,
  y: number,
): [number, number] {
  const px = ((y - viewport.minY) / (viewport.maxY - viewport.minY)) * width;
  const py = height - ((x - viewport.minX) / (viewport.maxX - viewport.minX)) * height;
  return [px, py];
}

/**
 * Turn a heat response into drawable markers. Marker size scales with
 * departure volume, color with the unsatisfied probability; all values
 * are carried through untouched from the API payload.
 */
export function buildHeatLayer(
  entries: HeatEntry[],
  width: number,
  height: number,
  viewport?: Viewport | null,
): HeatLayer {
  const box = viewport ?? viewportOf(entries);
  if (box === null || entries.length === 0) {
    return { markers: [], empty: true, viewport: box };
  }
  const maxTotal = Math.max(...entries.map((e) => e.Qr + e.Qb), 1);
  const markers = entries.map((e) => {
    const [x, y] = project(box, width, height, e.lat, e.lon);
    const total = e.Qr + e.Qb;
    return {
      stopId: e.stop_id,
      x,
      y,
      radius: 4 + 10 * Math.sqrt(total / maxTotal),
      color: heatColor(e.p),
      p: e.p,
      qr: e.Qr,
      qb: e.Qb,
    };
  });
  return { markers, empty: false, viewport: box };
}

export function markerAt(layer: HeatLayer, px: number, py: number): HeatMarker | null {
  // topmost (last drawn) marker wins
  for (let i = layer.markers.length - 1; i >= 0; i--) {
    const m = layer.markers[i];
    const dx = m.x - px;
    const dy = m.y - py;
    if (dx * dx + dy * dy <= m.radius * m.radius) return m;
  }
  return null;
}
