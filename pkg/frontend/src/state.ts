import type { Criterion } from "./types.js";

/** Map viewport in data coordinates (planar km or degrees). */
export interface Viewport {
  minX: number;
  maxX: number;
  minY: number;
  maxY: number;
}

export interface ViewState {
  lambda: number;
  criterion: Criterion | "preferred";
  minSample: number;
  selectedStop: string | null;
  selectedRider: string | null;
  viewport: Viewport | null;
}

export function initialState(lambda = 0, criterion: ViewState["criterion"] = "preferred"): ViewState {
  return {
    lambda,
    criterion,
    minSample: 1,
    selectedStop: null,
    selectedRider: null,
    viewport: null,
  };
}

export function setLambda(state: ViewState, lambda: number): ViewState {
  if (!Number.isFinite(lambda) || lambda < 0) {
    throw new Error(`threshold must be a non-negative number, got ${lambda}`);
  }
  return { ...state, lambda };
}

export function setCriterion(state: ViewState, criterion: ViewState["criterion"]): ViewState {
  // switching criterion invalidates the rider drill-down but keeps the stop
  return { ...state, criterion, selectedRider: null };
}

export function setMinSample(state: ViewState, minSample: number): ViewState {
  if (!Number.isInteger(minSample) || minSample < 0) {
    throw new Error(`min sample must be a non-negative integer, got ${minSample}`);
  }
  return { ...state, minSample };
}

export function selectStop(state: ViewState, stopId: string | null): ViewState {
  return { ...state, selectedStop: stopId, selectedRider: null };
}

export function selectRider(state: ViewState, riderId: string | null): ViewState {
  return { ...state, selectedRider: riderId };
}

/** Clear selections that no longer resolve against freshly fetched data. */
export function reconcile(state: ViewState, knownStops: Set<string>): ViewState {
  if (state.selectedStop !== null && !knownStops.has(state.selectedStop)) {
    return { ...state, selectedStop: null, selectedRider: null };
  }
  return state;
}

/** Trailing-edge debounce used by the threshold slider. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
  timers: { set: typeof setTimeout; clear: typeof clearTimeout } = {
    set: setTimeout,
    clear: clearTimeout,
  },
): (...args: A) => void {
  let handle: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (handle !== undefined) {
      timers.clear(handle);
    }
    handle = timers.set(() => fn(...args), waitMs);
  };
}
