/** Deterministic SVG backend: fixed attribute order, no timestamps, so the
 * same scene always serialises to identical bytes. */

import { Scene } from "./scene";

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

export function renderSvg(scene: Scene): string {
  const out: string[] = [];
  const { plot } = scene;
  out.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${scene.width}" height="${scene.height}" viewBox="0 0 ${scene.width} ${scene.height}">`,
  );
  out.push(`<rect width="${scene.width}" height="${scene.height}" fill="#ffffff"/>`);

  // grid lines
  for (const t of scene.xTicks) {
    out.push(
      `<line x1="${t.pos}" y1="${plot.y0}" x2="${t.pos}" y2="${plot.y1}" stroke="#dddddd" stroke-width="1"/>`,
    );
  }
  for (const t of scene.yTicks) {
    out.push(
      `<line x1="${plot.x0}" y1="${t.pos}" x2="${plot.x1}" y2="${t.pos}" stroke="#dddddd" stroke-width="1"/>`,
    );
  }

  // frame
  out.push(
    `<rect x="${plot.x0}" y="${plot.y0}" width="${plot.x1 - plot.x0}" height="${plot.y1 - plot.y0}" fill="none" stroke="#333333" stroke-width="1"/>`,
  );

  // tick labels
  for (const t of scene.xTicks) {
    out.push(
      `<text x="${t.pos}" y="${plot.y1 + 18}" ${FONT} font-size="12" text-anchor="middle" fill="#333333">${esc(t.label)}</text>`,
    );
  }
  for (const t of scene.yTicks) {
    out.push(
      `<text x="${plot.x0 - 6}" y="${t.pos + 4}" ${FONT} font-size="12" text-anchor="end" fill="#333333">${esc(t.label)}</text>`,
    );
  }

  // axis labels and title
  out.push(
    `<text x="${(plot.x0 + plot.x1) / 2}" y="${scene.height - 12}" ${FONT} font-size="13" text-anchor="middle" fill="#111111">${esc(scene.xLabel)}</text>`,
  );
  out.push(
    `<text x="16" y="${(plot.y0 + plot.y1) / 2}" ${FONT} font-size="13" text-anchor="middle" fill="#111111" transform="rotate(-90 16 ${(plot.y0 + plot.y1) / 2})">${esc(scene.yLabel)}</text>`,
  );
  out.push(
    `<text x="${(plot.x0 + plot.x1) / 2}" y="24" ${FONT} font-size="15" text-anchor="middle" fill="#111111">${esc(scene.title)}</text>`,
  );

  // series: one polyline (when >1 point) plus one circle per point
  for (const s of scene.series) {
    if (s.points.length > 1) {
      const pts = s.points.map((p) => `${p.x},${p.y}`).join(" ");
      out.push(
        `<polyline points="${pts}" fill="none" stroke="${s.color}" stroke-width="1.5"/>`,
      );
    }
    for (const p of s.points) {
      out.push(`<circle cx="${p.x}" cy="${p.y}" r="3" fill="${s.color}"/>`);
    }
  }

  // legend, sorted order as in the scene
  scene.series.forEach((s, i) => {
    const y = plot.y0 + 16 + 18 * i;
    const x = plot.x1 - 170;
    out.push(`<rect x="${x}" y="${y - 9}" width="12" height="12" fill="${s.color}"/>`);
    out.push(
      `<text x="${x + 18}" y="${y + 1}" ${FONT} font-size="12" fill="#111111">${esc(s.label)}</text>`,
    );
  });

  scene.footnotes.forEach((note, i) => {
    out.push(
      `<text x="${plot.x0}" y="${scene.height - 28 - 14 * i}" ${FONT} font-size="11" fill="#777777">${esc(note)}</text>`,
    );
  });

  out.push("</svg>");
  return out.join("\n") + "\n";
}

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
