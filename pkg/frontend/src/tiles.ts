// Tile math over the server's fixed anchor boxes (slippy addressing):
// zoom z splits the anchor square into 2^z x 2^z tiles of 256 px.

import type { Viewport } from "./state.js";

export const TILE_SIZE = 256;

export interface Anchor {
  cx: number;
  cy: number;
  hw: number;
}

export const PLANE_ANCHOR: Record<string, Anchor> = {
  parameter: { cx: 0.8, cy: 0.0, hw: 3.2 },
  dynamical: { cx: -0.7, cy: 0.0, hw: 3.0 },
};

export interface TileAddr {
  zoom: number;
  x: number;
  y: number;
}

export function tileWorldBox(anchor: Anchor, t: TileAddr) {
  const n = 1 << t.zoom;
  const w = (2 * anchor.hw) / n;
  const x0 = anchor.cx - anchor.hw + t.x * w;
  const y0 = anchor.cy - anchor.hw + t.y * w;
  return { x0, y0, w };
}

// zoom level whose tiles are at least as fine as the view resolution
export function zoomForView(anchor: Anchor, view: Viewport, canvasPx: number): number {
  const ideal = Math.log2(((2 * anchor.hw) / (2 * view.hw)) * (canvasPx / TILE_SIZE));
  return Math.max(0, Math.min(14, Math.ceil(ideal)));
}

export function visibleTiles(anchor: Anchor, view: Viewport, canvasPx: number): TileAddr[] {
  const zoom = zoomForView(anchor, view, canvasPx);
  const n = 1 << zoom;
  const w = (2 * anchor.hw) / n;
  const lo = (v: number, c0: number) => Math.floor((v - c0) / w);
  const xs0 = Math.max(0, lo(view.cx - view.hw, anchor.cx - anchor.hw));
  const xs1 = Math.min(n - 1, lo(view.cx + view.hw, anchor.cx - anchor.hw));
  const ys0 = Math.max(0, lo(view.cy - view.hw, anchor.cy - anchor.hw));
  const ys1 = Math.min(n - 1, lo(view.cy + view.hw, anchor.cy - anchor.hw));
  const out: TileAddr[] = [];
  for (let y = ys0; y <= ys1; y++) {
    for (let x = xs0; x <= xs1; x++) out.push({ zoom, x, y });
  }
  return out;
}

export function worldToCanvas(view: Viewport, canvasPx: number, wx: number, wy: number) {
  // y grows upward in the plane, downward on canvas
  const sx = ((wx - (view.cx - view.hw)) / (2 * view.hw)) * canvasPx;
  const sy = canvasPx - ((wy - (view.cy - view.hw)) / (2 * view.hw)) * canvasPx;
  return { sx, sy };
}

export function canvasToWorld(view: Viewport, canvasPx: number, sx: number, sy: number) {
  const wx = view.cx - view.hw + (sx / canvasPx) * 2 * view.hw;
  const wy = view.cy - view.hw + ((canvasPx - sy) / canvasPx) * 2 * view.hw;
  return { wx, wy };
}

export function tileKey(plane: string, t: TileAddr, a?: { re: number; im: number } | null): string {
  const suffix = plane === "dynamical" && a ? `@${a.re},${a.im}` : "";
  return `${plane}/${t.zoom}/${t.x}/${t.y}${suffix}`;
}
