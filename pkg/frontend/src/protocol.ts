// Client side of the live-session stream: the emulator's wire protocol
// (CFG/TEL/CMD/ACK) plus the session framing lines the serve mode adds.
// Parsing never throws on junk; unknown or malformed lines come back null so
// the dashboard can log and move on without fabricating state.

export type LoadClass = "NINSL" | "NISL" | "ISL";
export type Relay = "ON" | "OFF";

export interface DayHeader {
  kind: "day";
  horizon: number;
  intervalMinutes: number;
}

export interface NodeInfo {
  kind: "node";
  nodeId: string;
  name: string;
  loadClass: LoadClass;
  ratedKw: number;
}

export interface ScreenState {
  kind: "screen";
  nodeId: string;
  screen: string;
}

export interface ConfigLine {
  kind: "config";
  nodeId: string;
  loadClass: LoadClass;
  alpha: number;
  beta: number;
  gammaMinutes: number;
  ratedKw: number;
}

export interface TelemetryLine {
  kind: "telemetry";
  nodeId: string;
  timestamp: number;
  vrms: number;
  irms: number;
  realPower: number;
  powerFactor: number;
  relay: Relay;
}

export interface CommandLine {
  kind: "command";
  nodeId: string;
  action: Relay;
  issuedAt: number;
}

export interface AckLine {
  kind: "ack";
  nodeId: string;
  refKind: string;
  status: string;
}

export interface ProfileRow {
  kind: "row";
  interval: number;
  aggregateKw: number;
  mdlKw: number;
  overKw: number;
}

export interface ErrorLine {
  kind: "error";
  nodeId: string;
  errorKind: string;
  detail: string;
}

export interface EndLine {
  kind: "end";
  energyOverKwh: number;
  penalty: number;
  intervalsOver: number;
}

export type ServerLine =
  | DayHeader
  | NodeInfo
  | ScreenState
  | ConfigLine
  | TelemetryLine
  | CommandLine
  | AckLine
  | ProfileRow
  | ErrorLine
  | EndLine;

const LOAD_CLASSES: ReadonlySet<string> = new Set(["NINSL", "NISL", "ISL"]);
const RELAYS: ReadonlySet<string> = new Set(["ON", "OFF"]);

function num(field: string): number | null {
  if (field.trim() === "") return null;
  const x = Number(field);
  return Number.isFinite(x) ? x : null;
}

function int(field: string): number | null {
  const x = num(field);
  return x !== null && Number.isInteger(x) ? x : null;
}

export function parseLine(raw: string): ServerLine | null {
  const line = raw.endsWith("\n") ? raw.slice(0, -1) : raw;
  const f = line.split("|");
  switch (f[0]) {
    case "DAY": {
      if (f.length !== 3) return null;
      const horizon = int(f[1]);
      const minutes = int(f[2]);
      if (horizon === null || minutes === null) return null;
      return { kind: "day", horizon, intervalMinutes: minutes };
    }
    case "NOD": {
      if (f.length !== 5 || !LOAD_CLASSES.has(f[3])) return null;
      const rated = num(f[4]);
      if (!f[1] || rated === null) return null;
      return { kind: "node", nodeId: f[1], name: f[2],
               loadClass: f[3] as LoadClass, ratedKw: rated };
    }
    case "SCR": {
      if (f.length !== 3 || !f[1]) return null;
      return { kind: "screen", nodeId: f[1], screen: f[2] };
    }
    case "CFG": {
      if (f.length !== 7 || !f[1] || !LOAD_CLASSES.has(f[2])) return null;
      const alpha = int(f[3]), beta = int(f[4]), gamma = int(f[5]), rated = num(f[6]);
      if (alpha === null || beta === null || gamma === null || rated === null) return null;
      return { kind: "config", nodeId: f[1], loadClass: f[2] as LoadClass,
               alpha, beta, gammaMinutes: gamma, ratedKw: rated };
    }
    case "TEL": {
      if (f.length !== 8 || !f[1] || !RELAYS.has(f[7])) return null;
      const ts = num(f[2]), vrms = num(f[3]), irms = num(f[4]);
      const power = num(f[5]), pf = num(f[6]);
      if (ts === null || vrms === null || irms === null || power === null || pf === null)
        return null;
      return { kind: "telemetry", nodeId: f[1], timestamp: ts, vrms, irms,
               realPower: power, powerFactor: pf, relay: f[7] as Relay };
    }
    case "CMD": {
      if (f.length !== 4 || !f[1] || !RELAYS.has(f[2])) return null;
      const at = num(f[3]);
      if (at === null) return null;
      return { kind: "command", nodeId: f[1], action: f[2] as Relay, issuedAt: at };
    }
    case "ACK": {
      if (f.length !== 4 || !f[1]) return null;
      return { kind: "ack", nodeId: f[1], refKind: f[2], status: f[3] };
    }
    case "ROW": {
      if (f.length !== 5) return null;
      const t = int(f[1]), agg = num(f[2]), mdl = num(f[3]), over = num(f[4]);
      if (t === null || agg === null || mdl === null || over === null) return null;
      return { kind: "row", interval: t, aggregateKw: agg, mdlKw: mdl, overKw: over };
    }
    case "ERR": {
      if (f.length < 4) return null;
      return { kind: "error", nodeId: f[1], errorKind: f[2], detail: f.slice(3).join("|") };
    }
    case "END": {
      if (f.length !== 4) return null;
      const over = num(f[1]), penalty = num(f[2]), n = int(f[3]);
      if (over === null || penalty === null || n === null) return null;
      return { kind: "end", energyOverKwh: over, penalty, intervalsOver: n };
    }
    default:
      return null;
  }
}

// -- consumer input events -----------------------------------------------------

export type UiEvent =
  | { event: "menu" | "node_config" | "data_logging" | "back"; nodeId: string }
  | { event: "submit"; nodeId: string; loadClass: LoadClass;
      alpha: number; beta: number; gammaMinutes: number };

export function serializeUiEvent(e: UiEvent): string {
  if (e.event === "submit") {
    return `UIE|${e.nodeId}|submit|${e.loadClass}|${e.alpha}|${e.beta}|${e.gammaMinutes}`;
  }
  return `UIE|${e.nodeId}|${e.event}`;
}
