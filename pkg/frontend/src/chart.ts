// Hand-rolled canvas chart: aggregate load vs the demand limit, with the
// intervals beyond the limit flagged. Data preparation is pure so it can be
// tested without a canvas.

import type { ProfileRow } from "./protocol.js";

export interface ChartData {
  intervals: number[];
  aggregate: number[];
  limit: number[];
  flagged: number[];
  yMax: number;
}

export function chartData(rows: ProfileRow[], horizon: number): ChartData {
  const intervals = rows.map((r) => r.interval);
  const aggregate = rows.map((r) => r.aggregateKw);
  const limit = rows.map((r) => r.mdlKw);
  const flagged = rows.filter((r) => r.overKw > 0).map((r) => r.interval);
  const top = Math.max(1, ...aggregate, ...limit);
  return { intervals, aggregate, limit, flagged, yMax: top * 1.15, };
}

export function drawChart(canvas: HTMLCanvasElement, rows: ProfileRow[],
                          horizon: number): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  const data = chartData(rows, horizon);
  const n = Math.max(horizon, 1);
  const padL = 34, padB = 18, padT = 8, padR = 8;
  const plotW = width - padL - padR;
  const plotH = height - padT - padB;
  const x = (t: number) => padL + ((t + 0.5) / n) * plotW;
  const y = (kw: number) => padT + plotH - (kw / data.yMax) * plotH;

  ctx.clearRect(0, 0, width, height);
  ctx.font = "10px sans-serif";
  ctx.fillStyle = "#888";
  ctx.strokeStyle = "#ddd";
  for (let g = 0; g <= 4; g++) {
    const kw = (data.yMax / 4) * g;
    ctx.beginPath();
    ctx.moveTo(padL, y(kw));
    ctx.lineTo(width - padR, y(kw));
    ctx.stroke();
    ctx.fillText(kw.toFixed(1), 2, y(kw) + 3);
  }
  for (let t = 0; t < n; t += 4) ctx.fillText(String(t), x(t) - 3, height - 4);

  const polyline = (series: number[], color: string) => {
    if (!series.length) return;
    ctx.strokeStyle = color;
    ctx.lineWidth = 2;
    ctx.beginPath();
    series.forEach((kw, i) => {
      const px = x(data.intervals[i]), py = y(kw);
      i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py);
    });
    ctx.stroke();
  };
  polyline(data.limit, "#c77d0a");
  polyline(data.aggregate, "#1766b3");

  ctx.fillStyle = "#d43f3f";
  for (const t of data.flagged) {
    const i = data.intervals.indexOf(t);
    ctx.beginPath();
    ctx.arc(x(t), y(data.aggregate[i]), 4, 0, 2 * Math.PI);
    ctx.fill();
  }
}
