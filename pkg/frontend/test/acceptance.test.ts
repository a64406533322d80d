/**
 * Dashboard contract against a stubbed service carrying the six-rider
 * fixture snapshot: threshold moves refetch heat layers whose counts
 * equal the stub's payloads, report export is byte-identical, and the
 * rider view renders exactly the service's polygon vertices.
 */
import assert from "node:assert/strict";
import { test } from "node:test";

import { Dashboard, Renderers } from "../src/controller.js";
import type { HeatLayer } from "../src/heat.js";
import type { PolygonPath, RouteRow } from "../src/kiviat.js";
import { exportReport } from "../src/report.js";
import type { ComparePayload, HeatEntry, StopRider } from "../src/types.js";
import { cannedJson, fixture, stubApi } from "./helpers.js";

interface Captured {
  heat: { layer: HeatLayer; entries: HeatEntry[] }[];
  riders: StopRider[][];
  compare: { payload: ComparePayload; polygons: PolygonPath[]; rows: RouteRow[] }[];
  errors: string[];
}

function capture(): { renderers: Renderers; seen: Captured } {
  const seen: Captured = { heat: [], riders: [], compare: [], errors: [] };
  return {
    seen,
    renderers: {
      onHeat: (layer, entries) => seen.heat.push({ layer, entries }),
      onRiders: (riders) => seen.riders.push(riders),
      onCompare: (payload, polygons, rows) => seen.compare.push({ payload, polygons, rows }),
      onError: (message) => seen.errors.push(message),
    },
  };
}

test("threshold sweep: rendered counts equal the stub's responses", async () => {
  const { client, requests } = stubApi();
  const { renderers, seen } = capture();
  const dash = new Dashboard(client, renderers);

  await dash.start(); // meta says lambda=2; initial criterion is "preferred"
  assert.equal(dash.state.lambda, 2);
  assert.ok(requests.includes("/api/v1/stops/heat?lambda=2&criterion=preferred&min_sample=1"));

  await dash.setCriterion("distance");
  for (const lambda of [0, 1, 2.5]) {
    await dash.setLambda(lambda);
  }
  assert.equal(seen.errors.length, 0);

  const sweeps: [string, number][] = [
    ["/api/v1/stops/heat?lambda=2&criterion=preferred&min_sample=1", 0],
    ["/api/v1/stops/heat?lambda=2&criterion=distance&min_sample=1", 1],
    ["/api/v1/stops/heat?lambda=0&criterion=distance&min_sample=1", 2],
    ["/api/v1/stops/heat?lambda=1&criterion=distance&min_sample=1", 3],
    ["/api/v1/stops/heat?lambda=2.5&criterion=distance&min_sample=1", 4],
  ];
  for (const [url, i] of sweeps) {
    const want = cannedJson<HeatEntry[]>(url);
    const got = seen.heat[i];
    assert.deepEqual(got.entries, want, url);
    assert.equal(got.layer.markers.length, want.length);
    for (let j = 0; j < want.length; j++) {
      assert.equal(got.layer.markers[j].qr, want[j].Qr);
      assert.equal(got.layer.markers[j].qb, want[j].Qb);
      assert.equal(got.layer.markers[j].p, want[j].p);
    }
  }
});

test("stop drill-down lists riders sorted by gap", async () => {
  const { client } = stubApi();
  const { renderers, seen } = capture();
  const dash = new Dashboard(client, renderers);
  await dash.start();
  await dash.setCriterion("distance");
  await dash.setLambda(2.5);
  await dash.selectStop("A");
  const riders = seen.riders.at(-1)!;
  assert.deepEqual(
    riders,
    cannedJson<StopRider[]>("/api/v1/stops/A/riders?lambda=2.5&criterion=distance"),
  );
  const gaps = riders.map((r) => r.gap);
  assert.deepEqual(gaps, [...gaps].sort((a, b) => b - a));
});

test("rider view renders the five polygons with the service's vertices", async () => {
  const { client } = stubApi();
  const { renderers, seen } = capture();
  const dash = new Dashboard(client, renderers);
  await dash.start();
  await dash.selectRider("r1");
  const { payload, polygons } = seen.compare.at(-1)!;
  const want = cannedJson<ComparePayload>("/api/v1/riders/r1/compare");
  assert.equal(polygons.length, 5);
  for (const poly of polygons) {
    assert.deepEqual(poly.vertices, want.polygons[poly.label].vertices, poly.label);
  }
  assert.deepEqual(payload, want);
});

test("exported report equals the service payload byte for byte", async () => {
  const { client } = stubApi();
  // r1's 2.0 km gap sits exactly on the threshold, which still qualifies
  const exported = await exportReport(client, "r1", 2, "distance");
  assert.equal(
    exported.body,
    fixture["/api/v1/riders/r1/report?lambda=2&criterion=distance"].body,
  );
  const parsed = JSON.parse(exported.body);
  assert.equal(parsed.rider_id, "r1");
  assert.equal(parsed.difference, 2.0);
});

test("service failures surface as a banner, not a crash", async () => {
  const { renderers, seen } = capture();
  const failing = stubApi();
  const dash = new Dashboard(failing.client, renderers);
  await dash.start();
  await assert.doesNotReject(dash.selectRider("missing-rider"));
  assert.ok(seen.errors.some((e) => e.includes("404")));
});
