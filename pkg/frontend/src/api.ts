import type { ComparePayload, Criterion, HeatEntry, MetaPayload, StopRider } from "./types.js";

export type FetchLike = (url: string) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

/**
 * Thin typed client for the analysis service. Every number shown in the
 * dashboard comes through here; nothing is recomputed client-side.
 */
export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: FetchLike = (url) => fetch(url),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path);
    if (!resp.ok) {
      throw new ApiError(resp.status, `${path} -> ${resp.status}`);
    }
    return (await resp.json()) as T;
  }

  private static query(params: Record<string, string | number | undefined>): string {
    const parts = Object.entries(params)
      .filter(([, v]) => v !== undefined && v !== "")
      .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(String(v))}`);
    return parts.length ? `?${parts.join("&")}` : "";
  }

  meta(): Promise<MetaPayload> {
    return this.getJson("/api/v1/meta");
  }

  heat(lambda: number, criterion?: Criterion | "preferred", minSample = 1): Promise<HeatEntry[]> {
    const q = ApiClient.query({ lambda, criterion, min_sample: minSample });
    return this.getJson(`/api/v1/stops/heat${q}`);
  }

  stopRiders(stopId: string, lambda: number, criterion?: Criterion | "preferred"): Promise<StopRider[]> {
    const q = ApiClient.query({ lambda, criterion });
    return this.getJson(`/api/v1/stops/${encodeURIComponent(stopId)}/riders${q}`);
  }

  compare(riderId: string): Promise<ComparePayload> {
    return this.getJson(`/api/v1/riders/${encodeURIComponent(riderId)}/compare`);
  }

  /**
   * Raw report body, byte for byte as the service sent it, so an export
   * can reproduce the payload exactly.
   */
  async reportRaw(riderId: string, lambda: number, criterion?: Criterion | "preferred"): Promise<string> {
    const q = ApiClient.query({ lambda, criterion });
    const resp = await this.fetchFn(
      `${this.baseUrl}/api/v1/riders/${encodeURIComponent(riderId)}/report${q}`,
    );
    if (!resp.ok) {
      throw new ApiError(resp.status, `report for ${riderId} -> ${resp.status}`);
    }
    return await resp.text();
  }

  simulate(): Promise<Record<string, string>[]> {
    return this.getJson("/api/v1/simulate");
  }
}
