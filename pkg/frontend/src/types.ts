/** Payload shapes of the /api/v1 endpoints. */

export type Criterion = "distance" | "time" | "transfers" | "hops";

export interface MetaPayload {
  config: { lambda?: number; criterion?: string | null; [key: string]: unknown };
  counts: { stops: number; lines: number; rides: number };
  seed: number | null;
}

export interface HeatEntry {
  stop_id: string;
  lat: number;
  lon: number;
  Qr: number;
  Qb: number;
  p: number;
}

export interface StopRider {
  rider_id: string;
  destination: string;
  criterion: Criterion;
  gap: number;
  gap_units: string;
  unsatisfied: boolean;
}

export interface RouteDump {
  legs: { line: string; board: string; alight: string; stops: string[] }[];
  metrics: { distance_km: number; time_s: number; transfers: number; hops: number };
}

export interface PolygonDump {
  normalized: [number, number, number, number];
  /** four [x, y] vertices on the +x, +y, -x, -y axes */
  vertices: [number, number][];
}

export interface PreferenceDump {
  preferred: string;
  tied: string[];
  scores: Record<string, number>;
}

export interface ComparePayload {
  rider_id: string;
  origin: string;
  destination: string;
  real: RouteDump;
  optimal: Record<Criterion, RouteDump>;
  gaps: Record<Criterion, number>;
  polygons: Record<string, PolygonDump>;
  preference: Record<string, PreferenceDump>;
}
