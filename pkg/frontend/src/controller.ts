import { ApiClient, ApiError } from "./api.js";
import { buildHeatLayer, HeatLayer } from "./heat.js";
import { polygonPaths, PolygonPath, routeTable, RouteRow, tiedBadges } from "./kiviat.js";
import {
  initialState,
  reconcile,
  selectRider,
  selectStop,
  setCriterion,
  setLambda,
  setMinSample,
  ViewState,
} from "./state.js";
import type { ComparePayload, HeatEntry, StopRider } from "./types.js";

export interface Renderers {
  onHeat(layer: HeatLayer, entries: HeatEntry[], state: ViewState): void;
  onRiders(riders: StopRider[], state: ViewState): void;
  onCompare(payload: ComparePayload, polygons: PolygonPath[], rows: RouteRow[], tied: string[]): void;
  onError(message: string): void;
}

/**
 * Dashboard orchestration, kept free of DOM so the view logic is unit
 * testable: every displayed value passes through here straight from the
 * API client.
 */
export class Dashboard {
  state: ViewState;
  private canvasSize: { width: number; height: number };

  constructor(
    private client: ApiClient,
    private render: Renderers,
    width = 720,
    height = 480,
  ) {
    this.state = initialState();
    this.canvasSize = { width, height };
  }

  async start(): Promise<void> {
    try {
      const meta = await this.client.meta();
      const lambda = typeof meta.config.lambda === "number" ? meta.config.lambda : 0;
      this.state = initialState(lambda);
    } catch (err) {
      this.fail(err);
      return;
    }
    await this.refreshHeat();
  }

  async refreshHeat(): Promise<void> {
    try {
      const entries = await this.client.heat(
        this.state.lambda,
        this.state.criterion,
        this.state.minSample,
      );
      this.state = reconcile(this.state, new Set(entries.map((e) => e.stop_id)));
      const layer = buildHeatLayer(entries, this.canvasSize.width, this.canvasSize.height);
      this.state = { ...this.state, viewport: layer.viewport };
      this.render.onHeat(layer, entries, this.state);
      if (this.state.selectedStop !== null) {
        await this.loadRiders(this.state.selectedStop);
      }
    } catch (err) {
      this.fail(err);
    }
  }

  async setLambda(lambda: number): Promise<void> {
    this.state = setLambda(this.state, lambda);
    await this.refreshHeat();
  }

  async setCriterion(criterion: ViewState["criterion"]): Promise<void> {
    this.state = setCriterion(this.state, criterion);
    await this.refreshHeat();
  }

  async setMinSample(minSample: number): Promise<void> {
    this.state = setMinSample(this.state, minSample);
    await this.refreshHeat();
  }

  async selectStop(stopId: string): Promise<void> {
    this.state = selectStop(this.state, stopId);
    await this.loadRiders(stopId);
  }

  private async loadRiders(stopId: string): Promise<void> {
    try {
      const riders = await this.client.stopRiders(
        stopId,
        this.state.lambda,
        this.state.criterion,
      );
      this.render.onRiders(riders, this.state);
    } catch (err) {
      this.fail(err);
    }
  }

  async selectRider(riderId: string): Promise<void> {
    this.state = selectRider(this.state, riderId);
    try {
      const payload = await this.client.compare(riderId);
      const polygons = polygonPaths(payload, 320);
      this.render.onCompare(payload, polygons, routeTable(payload), tiedBadges(payload));
    } catch (err) {
      this.fail(err);
    }
  }

  private fail(err: unknown): void {
    if (err instanceof ApiError) {
      this.render.onError(`service error ${err.status}: ${err.message}`);
    } else {
      this.render.onError(String(err));
    }
  }
}
