// Dashboard state is a pure mirror of what the stream says: every field here
// is attributable to a received line, and nothing (energy, penalty,
// exceedance) is recomputed client-side.

import type {
  ConfigLine, LoadClass, ProfileRow, Relay, ServerLine, TelemetryLine,
} from "./protocol.js";

export interface NodePanel {
  nodeId: string;
  name: string;
  loadClass: LoadClass;
  ratedKw: number;
  screen: string;
  relay: Relay | null;
  config: { alpha: number; beta: number; gammaMinutes: number } | null;
  telemetry: TelemetryLine | null;
  lastError: { kind: string; detail: string } | null;
}

export interface DashboardState {
  horizon: number;
  intervalMinutes: number;
  nodes: Map<string, NodePanel>;
  rows: ProfileRow[];
  end: { energyOverKwh: number; penalty: number; intervalsOver: number } | null;
  stale: boolean;
}

export function initialState(): DashboardState {
  return {
    horizon: 0,
    intervalMinutes: 0,
    nodes: new Map(),
    rows: [],
    end: null,
    stale: true,
  };
}

function panelOf(state: DashboardState, nodeId: string): NodePanel {
  let panel = state.nodes.get(nodeId);
  if (!panel) {
    panel = { nodeId, name: nodeId, loadClass: "NINSL", ratedKw: 0, screen: "Default",
              relay: null, config: null, telemetry: null, lastError: null };
    state.nodes.set(nodeId, panel);
  }
  return panel;
}

function applyConfig(panel: NodePanel, cfg: ConfigLine): void {
  panel.loadClass = cfg.loadClass;
  panel.ratedKw = cfg.ratedKw;
  panel.config = cfg.loadClass === "NINSL"
    ? null  // non-schedulable loads take no window
    : { alpha: cfg.alpha, beta: cfg.beta, gammaMinutes: cfg.gammaMinutes };
  panel.lastError = null;
}

export function applyLine(state: DashboardState, line: ServerLine): void {
  switch (line.kind) {
    case "day":
      state.horizon = line.horizon;
      state.intervalMinutes = line.intervalMinutes;
      break;
    case "node": {
      const panel = panelOf(state, line.nodeId);
      panel.name = line.name;
      panel.loadClass = line.loadClass;
      panel.ratedKw = line.ratedKw;
      break;
    }
    case "screen":
      panelOf(state, line.nodeId).screen = line.screen;
      break;
    case "config":
      applyConfig(panelOf(state, line.nodeId), line);
      break;
    case "telemetry": {
      const panel = panelOf(state, line.nodeId);
      panel.telemetry = line;
      panel.relay = line.relay;
      break;
    }
    case "command":
      break; // relay state is mirrored from telemetry, not predicted
    case "ack":
      break;
    case "row":
      if (!state.rows.some((r) => r.interval === line.interval)) {
        state.rows.push(line);
        state.rows.sort((a, b) => a.interval - b.interval);
      }
      break;
    case "error": {
      const panel = state.nodes.get(line.nodeId);
      if (panel) panel.lastError = { kind: line.errorKind, detail: line.detail };
      break;
    }
    case "end":
      state.end = { energyOverKwh: line.energyOverKwh, penalty: line.penalty,
                    intervalsOver: line.intervalsOver };
      break;
  }
}

export function markConnected(state: DashboardState): void {
  state.stale = false;
}

// Connection loss: flag everything as stale but never invent data points.
export function markStale(state: DashboardState): void {
  state.stale = true;
}

// The node takes no window input in NINSL mode.
export function windowInputsEnabled(loadClass: LoadClass): boolean {
  return loadClass !== "NINSL";
}

export function exceededIntervals(state: DashboardState): number[] {
  return state.rows.filter((r) => r.overKw > 0).map((r) => r.interval);
}
