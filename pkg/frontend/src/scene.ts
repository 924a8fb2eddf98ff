/**
 * Plot scene construction: from sweep rows and a plot request to a
 * backend-independent list of drawing primitives.
 *
 * One series per scheme label (sorted, fixed colour order), one marker per
 * non-failed row; failed rows are dropped from the series and listed in a
 * footnote.  Everything here is pure and deterministic so both backends
 * (SVG text, PNG raster) render byte-stable output.
 */

import { SweepRow, isNumericColumn } from "./csv";
import { Scale, ScaleKind, formatTick, linearScale, logScale } from "./scale";

export interface PlotSpec {
  x: string;
  y: string;
  scale: "linear" | "loglog";
  title?: string;
}

export interface Point {
  x: number;
  y: number;
}

export interface Series {
  label: string;
  color: string;
  points: Point[]; // pixel coordinates, ordered by descending x value
}

export interface TickMark {
  pos: number; // pixel position along the axis
  label: string;
}

export interface Scene {
  width: number;
  height: number;
  plot: { x0: number; y0: number; x1: number; y1: number };
  title: string;
  xLabel: string;
  yLabel: string;
  xTicks: TickMark[];
  yTicks: TickMark[];
  series: Series[];
  footnotes: string[];
}

export const PALETTE = [
  "#1f77b4",
  "#d62728",
  "#2ca02c",
  "#9467bd",
  "#ff7f0e",
  "#8c564b",
  "#17becf",
  "#7f7f7f",
];

export const WIDTH = 720;
export const HEIGHT = 480;
const MARGIN = { left: 72, right: 24, top: 40, bottom: 56 };

export class PlotError extends Error {}

function column(row: SweepRow, name: string): number {
  return (row as unknown as Record<string, number>)[name];
}

export function buildScene(rows: SweepRow[], spec: PlotSpec): Scene {
  for (const axis of [spec.x, spec.y]) {
    if (!isNumericColumn(axis)) {
      throw new PlotError(`column "${axis}" is not a numeric CSV column`);
    }
  }
  if (rows.length === 0) {
    throw new PlotError("no data: the CSV contains only the header row");
  }

  const ok = rows.filter((r) => r.status === "ok");
  const failed = rows.filter((r) => r.status !== "ok");
  if (ok.length === 0) {
    throw new PlotError("no data: every row is marked failed");
  }

  const xs = ok.map((r) => column(r, spec.x)).filter(Number.isFinite);
  const ys = ok.map((r) => column(r, spec.y)).filter(Number.isFinite);
  if (xs.length === 0 || ys.length === 0) {
    throw new PlotError(`no finite values for ${spec.x} / ${spec.y}`);
  }

  const plot = {
    x0: MARGIN.left,
    y0: MARGIN.top,
    x1: WIDTH - MARGIN.right,
    y1: HEIGHT - MARGIN.bottom,
  };
  const kind: ScaleKind = spec.scale === "loglog" ? "log" : "linear";
  const make = kind === "log" ? logScale : linearScale;
  const xScale: Scale = make(
    [Math.min(...xs), Math.max(...xs)],
    [plot.x0, plot.x1],
  );
  const yScale: Scale = make(
    [Math.min(...ys), Math.max(...ys)],
    [plot.y1, plot.y0], // pixel y grows downward
  );

  const labels = [...new Set(ok.map((r) => r.scheme))].sort();
  const series: Series[] = labels.map((label, i) => {
    const mine = ok
      .filter((r) => r.scheme === label)
      .map((r) => ({ vx: column(r, spec.x), vy: column(r, spec.y) }))
      .filter((p) => Number.isFinite(p.vx) && Number.isFinite(p.vy))
      .sort((a, b) => b.vx - a.vx);
    return {
      label,
      color: PALETTE[i % PALETTE.length],
      points: mine.map((p) => ({
        x: round2(xScale.map(p.vx)),
        y: round2(yScale.map(p.vy)),
      })),
    };
  });

  const footnotes: string[] = [];
  if (failed.length > 0) {
    const parts = failed.map(
      (r) => `${r.scheme} @ ${formatTick(column(r, spec.x), kind)}`,
    );
    footnotes.push(`omitted ${failed.length} failed row(s): ${parts.join(", ")}`);
  }

  return {
    width: WIDTH,
    height: HEIGHT,
    plot,
    title: spec.title ?? `${spec.y} vs ${spec.x}`,
    xLabel: `${spec.x}${kind === "log" ? " (log)" : ""}`,
    yLabel: `${spec.y}${kind === "log" ? " (log)" : ""}`,
    xTicks: xScale.ticks().map((v) => ({
      pos: round2(xScale.map(v)),
      label: formatTick(v, kind),
    })),
    yTicks: yScale.ticks().map((v) => ({
      pos: round2(yScale.map(v)),
      label: formatTick(v, kind),
    })),
    series,
    footnotes,
  };
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}
