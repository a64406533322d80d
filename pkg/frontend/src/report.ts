import { ApiClient } from "./api.js";
import type { Criterion } from "./types.js";

export interface ReportExport {
  filename: string;
  /** exact bytes of the API response body */
  body: string;
  mediaType: string;
}

/**
 * Fetch a rider's survey report for download. The body is the raw
 * response text so the exported file is byte-identical to the API
 * payload.
 */
export async function exportReport(
  client: ApiClient,
  riderId: string,
  lambda: number,
  criterion?: Criterion | "preferred",
): Promise<ReportExport> {
  const body = await client.reportRaw(riderId, lambda, criterion);
  return {
    filename: `report_${riderId}.json`,
    body,
    mediaType: "application/json",
  };
}

/** Survey plan: every selected stop with its exported rider reports. */
export async function exportSurveyPlan(
  client: ApiClient,
  stops: string[],
  lambda: number,
  criterion?: Criterion | "preferred",
): Promise<{ stop: string; reports: ReportExport[] }[]> {
  const plan = [];
  for (const stop of stops) {
    const riders = await client.stopRiders(stop, lambda, criterion);
    const reports: ReportExport[] = [];
    for (const rider of riders) {
      if (!rider.unsatisfied) continue;
      reports.push(await exportReport(client, rider.rider_id, lambda, criterion));
    }
    plan.push({ stop, reports });
  }
  return plan;
}
