// Wires the stream to the DOM: one panel per node mirroring its screen,
// relay, telemetry and stored window, plus the day's profile chart.

import { drawChart } from "./chart.js";
import { parseLine, serializeUiEvent, type LoadClass } from "./protocol.js";
import {
  applyLine, initialState, markConnected, markStale, windowInputsEnabled,
  type DashboardState, type NodePanel,
} from "./state.js";
import { connect } from "./ws.js";

const state: DashboardState = initialState();

const params = new URLSearchParams(location.search);
const wsUrl = params.get("ws") ?? `ws://${location.hostname || "127.0.0.1"}:8766`;

const transport = connect(wsUrl, {
  onLine(raw) {
    const line = parseLine(raw);
    if (!line) {
      console.warn("unparsed line:", raw);
      return;
    }
    applyLine(state, line);
    render();
  },
  onOpen() {
    markConnected(state);
    render();
  },
  onStale() {
    markStale(state);
    render();
  },
});

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K, cls?: string, text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function sendEvent(nodeId: string, event: "menu" | "node_config" | "data_logging" | "back") {
  transport.send(serializeUiEvent({ event, nodeId }));
}

function panelCard(panel: NodePanel): HTMLElement {
  const card = el("div", "panel");
  const head = el("div", "panel-head");
  head.append(
    el("span", "panel-name", panel.name),
    el("span", `badge class-${panel.loadClass}`, panel.loadClass),
    el("span", `badge relay-${panel.relay ?? "unknown"}`, panel.relay ?? "—"),
  );
  card.append(head);
  card.append(el("div", "screen", `screen: ${panel.screen}`));

  const t = panel.telemetry;
  card.append(el("div", "telemetry", t
    ? `${t.vrms.toFixed(1)} V  ${t.irms.toFixed(2)} A  ` +
      `${t.realPower.toFixed(0)} W  pf ${t.powerFactor.toFixed(3)}`
    : "no telemetry yet"));

  card.append(el("div", "config", panel.config
    ? `window ${panel.config.alpha}–${panel.config.beta}, run ${panel.config.gammaMinutes} min`
    : "no schedule window (user-operated)"));

  if (panel.lastError) {
    card.append(el("div", "error", `${panel.lastError.kind}: ${panel.lastError.detail}`));
  }

  const nav = el("div", "nav");
  for (const [label, event] of [
    ["Menu", "menu"], ["Node config", "node_config"],
    ["Log data", "data_logging"], ["Back", "back"],
  ] as const) {
    const button = el("button", undefined, label);
    button.addEventListener("click", () => sendEvent(panel.nodeId, event));
    nav.append(button);
  }
  card.append(nav);

  const form = el("form", "log-form");
  const select = el("select");
  for (const cls of ["NINSL", "NISL", "ISL"]) {
    const opt = el("option", undefined, cls);
    opt.value = cls;
    if (cls === panel.loadClass) opt.selected = true;
    select.append(opt);
  }
  const alpha = el("input");
  const beta = el("input");
  const gamma = el("input");
  for (const [input, ph, value] of [
    [alpha, "alpha", panel.config?.alpha], [beta, "beta", panel.config?.beta],
    [gamma, "gamma min", panel.config?.gammaMinutes],
  ] as const) {
    input.type = "number";
    input.placeholder = ph;
    if (value !== undefined) input.value = String(value);
  }
  const syncInputs = () => {
    const enabled = windowInputsEnabled(select.value as LoadClass);
    for (const input of [alpha, beta, gamma]) input.disabled = !enabled;
  };
  select.addEventListener("change", syncInputs);
  syncInputs();

  const submit = el("button", undefined, "Submit");
  submit.type = "submit";
  form.append(select, alpha, beta, gamma, submit);
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    transport.send(serializeUiEvent({
      event: "submit",
      nodeId: panel.nodeId,
      loadClass: select.value as LoadClass,
      alpha: Number(alpha.value || 0),
      beta: Number(beta.value || 0),
      gammaMinutes: Number(gamma.value || 0),
    }));
  });
  card.append(form);
  return card;
}

function render(): void {
  const status = document.getElementById("status")!;
  status.textContent = state.stale
    ? "disconnected — data is stale"
    : state.end
      ? `day complete: ${state.end.energyOverKwh.toFixed(3)} kWh beyond limit in ` +
        `${state.end.intervalsOver} interval(s), penalty ${state.end.penalty.toFixed(3)} x`
      : `live — interval ${state.rows.length}/${state.horizon}`;
  status.className = state.stale ? "stale" : "live";

  const panels = document.getElementById("panels")!;
  panels.replaceChildren(...[...state.nodes.values()].map(panelCard));

  const canvas = document.getElementById("chart") as HTMLCanvasElement | null;
  if (canvas) drawChart(canvas, state.rows, state.horizon);
}

render();
