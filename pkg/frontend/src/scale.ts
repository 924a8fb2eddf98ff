/** Linear and log10 axis scales with deterministic tick placement. */

export type ScaleKind = "linear" | "log";

export interface Scale {
  kind: ScaleKind;
  domain: [number, number];
  range: [number, number];
  map(value: number): number;
  ticks(): number[];
}

function niceLinearStep(span: number, target: number): number {
  const raw = span / target;
  const power = Math.pow(10, Math.floor(Math.log10(raw)));
  for (const mult of [1, 2, 5, 10]) {
    if (mult * power >= raw) return mult * power;
  }
  return 10 * power;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  let [lo, hi] = domain;
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const map = (v: number) =>
    range[0] + ((v - lo) / (hi - lo)) * (range[1] - range[0]);
  return {
    kind: "linear",
    domain: [lo, hi],
    range,
    map,
    ticks() {
      const step = niceLinearStep(hi - lo, 5);
      const first = Math.ceil(lo / step) * step;
      const out: number[] = [];
      for (let v = first; v <= hi + 1e-12 * Math.abs(step); v += step) {
        out.push(Math.abs(v) < 1e-12 * step ? 0 : v);
      }
      return out;
    },
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  let [lo, hi] = domain;
  if (lo <= 0 || hi <= 0) {
    throw new Error(`log scale needs positive data, got [${lo}, ${hi}]`);
  }
  if (lo === hi) {
    lo /= 10;
    hi *= 10;
  }
  const llo = Math.log10(lo);
  const lhi = Math.log10(hi);
  const map = (v: number) =>
    range[0] + ((Math.log10(v) - llo) / (lhi - llo)) * (range[1] - range[0]);
  return {
    kind: "log",
    domain: [lo, hi],
    range,
    map,
    ticks() {
      const out: number[] = [];
      for (let e = Math.ceil(llo - 1e-12); e <= Math.floor(lhi + 1e-12); e++) {
        out.push(Math.pow(10, e));
      }
      if (out.length === 0) out.push(lo, hi);
      return out;
    },
  };
}

/** Compact deterministic tick label (no locale dependence). */
export function formatTick(value: number, kind: ScaleKind): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (kind === "log" || magnitude >= 1e4 || magnitude < 1e-3) {
    const exp = Math.floor(Math.log10(magnitude));
    const mant = value / Math.pow(10, exp);
    const m = Math.abs(mant - 1) < 1e-9 ? "" : `${trim(mant)}x`;
    return `${m}1e${exp}`;
  }
  return trim(value);
}

function trim(value: number): string {
  return parseFloat(value.toPrecision(6)).toString();
}
