import { ApiClient } from "./api.js";
import { Dashboard } from "./controller.js";
import { HeatLayer, markerAt } from "./heat.js";
import { PolygonPath, RouteRow } from "./kiviat.js";
import { exportReport } from "./report.js";
import { debounce, ViewState } from "./state.js";
import type { ComparePayload, HeatEntry, StopRider } from "./types.js";

const client = new ApiClient("");

const canvas = document.getElementById("map") as HTMLCanvasElement;
const kiviatCanvas = document.getElementById("kiviat") as HTMLCanvasElement;
const slider = document.getElementById("lambda") as HTMLInputElement;
const lambdaLabel = document.getElementById("lambda-value") as HTMLSpanElement;
const criterionSelect = document.getElementById("criterion") as HTMLSelectElement;
const minSampleInput = document.getElementById("min-sample") as HTMLInputElement;
const riderList = document.getElementById("riders") as HTMLTableSectionElement;
const routeRows = document.getElementById("route-rows") as HTMLTableSectionElement;
const riderTitle = document.getElementById("rider-title") as HTMLElement;
const badges = document.getElementById("badges") as HTMLElement;
const banner = document.getElementById("error-banner") as HTMLElement;
const emptyMsg = document.getElementById("empty-message") as HTMLElement;
const exportBtn = document.getElementById("export-report") as HTMLButtonElement;
const legend = document.getElementById("legend") as HTMLElement;

let currentLayer: HeatLayer | null = null;

function drawHeat(layer: HeatLayer): void {
  const ctx = canvas.getContext("2d")!;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#10141a";
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  for (const m of layer.markers) {
    ctx.beginPath();
    ctx.arc(m.x, m.y, m.radius, 0, Math.PI * 2);
    ctx.fillStyle = m.color;
    ctx.globalAlpha = 0.85;
    ctx.fill();
    ctx.globalAlpha = 1;
  }
}

function drawKiviat(polygons: PolygonPath[]): void {
  const ctx = kiviatCanvas.getContext("2d")!;
  const size = kiviatCanvas.width;
  ctx.clearRect(0, 0, size, size);
  ctx.strokeStyle = "#888";
  ctx.beginPath();
  ctx.moveTo(0, size / 2);
  ctx.lineTo(size, size / 2);
  ctx.moveTo(size / 2, 0);
  ctx.lineTo(size / 2, size);
  ctx.stroke();
  for (const poly of polygons) {
    ctx.beginPath();
    poly.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
    ctx.closePath();
    ctx.strokeStyle = poly.color;
    ctx.lineWidth = poly.emphasized ? 2.5 : 1.2;
    ctx.stroke();
    ctx.globalAlpha = poly.emphasized ? 0.25 : 0.08;
    ctx.fillStyle = poly.color;
    ctx.fill();
    ctx.globalAlpha = 1;
  }
  legend.innerHTML = polygons
    .map((p) => `<span class="chip" style="border-color:${p.color}">${p.label}</span>`)
    .join(" ");
}

const dashboard = new Dashboard(
  client,
  {
    onHeat(layer: HeatLayer, entries: HeatEntry[], state: ViewState): void {
      banner.hidden = true;
      currentLayer = layer;
      emptyMsg.hidden = !layer.empty;
      drawHeat(layer);
      lambdaLabel.textContent = state.lambda.toFixed(1);
    },
    onRiders(riders: StopRider[], state: ViewState): void {
      riderList.innerHTML = "";
      for (const r of riders) {
        const tr = document.createElement("tr");
        tr.className = r.unsatisfied ? "unsat" : "";
        tr.innerHTML =
          `<td>${r.rider_id}</td><td>${r.destination}</td>` +
          `<td>${r.criterion}</td><td>${r.gap.toFixed(2)} ${r.gap_units}</td>`;
        tr.onclick = () => void dashboard.selectRider(r.rider_id);
        riderList.appendChild(tr);
      }
      riderTitle.textContent = state.selectedStop
        ? `riders departing ${state.selectedStop}`
        : "";
    },
    onCompare(payload: ComparePayload, polygons: PolygonPath[], rows: RouteRow[], tied: string[]): void {
      drawKiviat(polygons);
      routeRows.innerHTML = "";
      for (const row of rows) {
        const tr = document.createElement("tr");
        tr.innerHTML =
          `<td>${row.label}</td><td>${row.lines}</td>` +
          `<td>${row.distance_km.toFixed(2)}</td><td>${row.time_s.toFixed(0)}</td>` +
          `<td>${row.transfers}</td><td>${row.hops}</td>`;
        routeRows.appendChild(tr);
      }
      badges.innerHTML = tied.map((t) => `<span class="chip tie">${t} (tied)</span>`).join(" ");
      exportBtn.hidden = false;
      exportBtn.onclick = async () => {
        try {
          const rep = await exportReport(
            client,
            payload.rider_id,
            dashboard.state.lambda,
            dashboard.state.criterion,
          );
          const blob = new Blob([rep.body], { type: rep.mediaType });
          const a = document.createElement("a");
          a.href = URL.createObjectURL(blob);
          a.download = rep.filename;
          a.click();
          URL.revokeObjectURL(a.href);
        } catch (err) {
          banner.textContent = String(err);
          banner.hidden = false;
        }
      };
    },
    onError(message: string): void {
      banner.textContent = `${message} (showing last loaded data)`;
      banner.hidden = false;
    },
  },
  720,
  480,
);

canvas.addEventListener("click", (ev) => {
  if (currentLayer === null) return;
  const rect = canvas.getBoundingClientRect();
  const hit = markerAt(currentLayer, ev.clientX - rect.left, ev.clientY - rect.top);
  if (hit !== null) {
    void dashboard.selectStop(hit.stopId);
  }
});

const applyLambda = debounce((value: number) => void dashboard.setLambda(value), 200);
slider.addEventListener("input", () => {
  lambdaLabel.textContent = Number(slider.value).toFixed(1);
  applyLambda(Number(slider.value));
});
criterionSelect.addEventListener("change", () => {
  void dashboard.setCriterion(criterionSelect.value as ViewState["criterion"]);
});
minSampleInput.addEventListener("change", () => {
  void dashboard.setMinSample(Number(minSampleInput.value));
});

void dashboard.start().then(() => {
  slider.value = String(dashboard.state.lambda);
  lambdaLabel.textContent = dashboard.state.lambda.toFixed(1);
});
