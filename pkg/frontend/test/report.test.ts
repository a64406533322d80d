import assert from "node:assert/strict";
import { test } from "node:test";

import { ApiError } from "../src/api.js";
import { exportReport, exportSurveyPlan } from "../src/report.js";
import { fixture, stubApi } from "./helpers.js";

test("export reproduces the service payload byte for byte", async () => {
  const { client } = stubApi();
  const exported = await exportReport(client, "r1", 2, "distance");
  assert.equal(
    exported.body,
    fixture["/api/v1/riders/r1/report?lambda=2&criterion=distance"].body,
  );
  assert.equal(exported.filename, "report_r1.json");
});

test("satisfied riders have no report to export", async () => {
  const { client } = stubApi();
  await assert.rejects(
    exportReport(client, "r2", 2, "distance"),
    (err: unknown) => err instanceof ApiError && err.status === 404,
  );
});

test("survey plan collects reports only for unsatisfied riders", async () => {
  const { client } = stubApi();
  const plan = await exportSurveyPlan(client, ["A"], 2, "distance");
  assert.equal(plan.length, 1);
  const riders = JSON.parse(fixture["/api/v1/stops/A/riders?lambda=2&criterion=distance"].body);
  const unsatisfied = riders.filter((r: { unsatisfied: boolean }) => r.unsatisfied);
  assert.equal(plan[0].reports.length, unsatisfied.length);
  for (const report of plan[0].reports) {
    const rid = report.filename.replace("report_", "").replace(".json", "");
    assert.equal(
      report.body,
      fixture[`/api/v1/riders/${rid}/report?lambda=2&criterion=distance`].body,
    );
  }
});
