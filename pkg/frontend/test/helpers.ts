import { readFileSync } from "node:fs";

import { ApiClient, FetchLike } from "../src/api.js";

interface CannedResponse {
  status: number;
  body: string;
}

const fixturePath = new URL("../../test/fixture.json", import.meta.url);
export const fixture: Record<string, CannedResponse> = JSON.parse(
  readFileSync(fixturePath, "utf8"),
);

export interface StubApi {
  client: ApiClient;
  fetchFn: FetchLike;
  /** URLs requested, in order */
  requests: string[];
}

/** A fetch stub that serves the canned service responses verbatim. */
export function stubApi(): StubApi {
  const requests: string[] = [];
  const fetchFn: FetchLike = async (url: string) => {
    requests.push(url);
    const canned = fixture[url];
    if (!canned) {
      return new Response(JSON.stringify({ detail: `no fixture for ${url}` }), {
        status: 404,
        headers: { "content-type": "application/json" },
      });
    }
    return new Response(canned.body, {
      status: canned.status,
      headers: { "content-type": "application/json" },
    });
  };
  return { client: new ApiClient("", fetchFn), fetchFn, requests };
}

export function cannedJson<T>(url: string): T {
  const canned = fixture[url];
  if (!canned) throw new Error(`no fixture for ${url}`);
  return JSON.parse(canned.body) as T;
}
