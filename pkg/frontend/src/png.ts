/** PNG encoder (8-bit RGB, filter 0) and the raster backend for scenes. */

import * as zlib from "node:zlib";

import { Raster } from "./raster";
import { Scene } from "./scene";

const CRC_TABLE = (() => {
  const table = new Uint32Array(256);
  for (let n = 0; n < 256; n++) {
    let c = n;
    for (let k = 0; k < 8; k++) {
      c = c & 1 ? 0xedb88320 ^ (c >>> 1) : c >>> 1;
    }
    table[n] = c >>> 0;
  }
  return table;
})();

function crc32(buf: Uint8Array): number {
  let c = 0xffffffff;
  for (let i = 0; i < buf.length; i++) {
    c = CRC_TABLE[(c ^ buf[i]) & 0xff] ^ (c >>> 8);
  }
  return (c ^ 0xffffffff) >>> 0;
}

function chunk(type: string, body: Uint8Array): Buffer {
  const head = Buffer.alloc(8);
  head.writeUInt32BE(body.length, 0);
  head.write(type, 4, "ascii");
  const crcInput = Buffer.concat([head.subarray(4), Buffer.from(body)]);
  const tail = Buffer.alloc(4);
  tail.writeUInt32BE(crc32(crcInput), 0);
  return Buffer.concat([head, Buffer.from(body), tail]);
}

export function encodePng(raster: Raster): Buffer {
  const { width, height, data } = raster;
  const ihdr = Buffer.alloc(13);
  ihdr.writeUInt32BE(width, 0);
  ihdr.writeUInt32BE(height, 4);
  ihdr[8] = 8; // bit depth
  ihdr[9] = 2; // colour type: truecolour RGB
  ihdr[10] = 0;
  ihdr[11] = 0;
  ihdr[12] = 0;

  const stride = width * 3;
  const filtered = Buffer.alloc((stride + 1) * height);
  for (let y = 0; y < height; y++) {
    filtered[y * (stride + 1)] = 0; // filter type 0 per scanline
    filtered.set(data.subarray(y * stride, (y + 1) * stride), y * (stride + 1) + 1);
  }
  // fixed compression settings keep the bytes reproducible
  const idat = zlib.deflateSync(filtered, { level: 9, memLevel: 8, strategy: 0 });

  return Buffer.concat([
    Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    chunk("IHDR", ihdr),
    chunk("IDAT", idat),
    chunk("IEND", new Uint8Array(0)),
  ]);
}

function hex(color: string): number {
  return parseInt(color.slice(1), 16);
}

const INK = 0x333333;
const TEXT = 0x111111;
const GRID = 0xdddddd;
const FAINT = 0x777777;

export function renderPng(scene: Scene): Buffer {
  const r = new Raster(scene.width, scene.height);
  const { plot } = scene;

  for (const t of scene.xTicks) {
    r.line(t.pos, plot.y0, t.pos, plot.y1, GRID);
  }
  for (const t of scene.yTicks) {
    r.line(plot.x0, t.pos, plot.x1, t.pos, GRID);
  }

  // frame
  r.line(plot.x0, plot.y0, plot.x1, plot.y0, INK);
  r.line(plot.x0, plot.y1, plot.x1, plot.y1, INK);
  r.line(plot.x0, plot.y0, plot.x0, plot.y1, INK);
  r.line(plot.x1, plot.y0, plot.x1, plot.y1, INK);

  for (const t of scene.xTicks) {
    r.text(t.pos, plot.y1 + 8, t.label, TEXT, "center");
  }
  for (const t of scene.yTicks) {
    r.text(plot.x0 - 6, t.pos - 3, t.label, TEXT, "right");
  }
  r.text((plot.x0 + plot.x1) / 2, scene.height - 18, scene.xLabel, TEXT, "center");
  r.text(14, (plot.y0 + plot.y1) / 2 + 30, scene.yLabel, TEXT, "left", true);
  r.text((plot.x0 + plot.x1) / 2, 14, scene.title, TEXT, "center");

  for (const s of scene.series) {
    const color = hex(s.color);
    for (let i = 0; i + 1 < s.points.length; i++) {
      r.line(s.points[i].x, s.points[i].y, s.points[i + 1].x, s.points[i + 1].y, color);
    }
    for (const p of s.points) {
      r.fillCircle(p.x, p.y, 3, color);
    }
  }

  scene.series.forEach((s, i) => {
    const y = plot.y0 + 10 + 16 * i;
    const x = plot.x1 - 170;
    r.fillRect(x, y, 10, 10, hex(s.color));
    r.text(x + 16, y + 1, s.label, TEXT, "left");
  });

  scene.footnotes.forEach((note, i) => {
    r.text(plot.x0, scene.height - 40 - 12 * i, note, FAINT, "left");
  });

  return encodePng(r);
}
