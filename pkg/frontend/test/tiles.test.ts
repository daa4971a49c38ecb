import test from "node:test";
import assert from "node:assert/strict";

import {
  PLANE_ANCHOR,
  canvasToWorld,
  tileKey,
  tileWorldBox,
  visibleTiles,
  worldToCanvas,
  zoomForView,
} from "../src/tiles.js";

const anchor = PLANE_ANCHOR.parameter;

test("zoom 0 covers the anchor box with one tile", () => {
  const view = { cx: anchor.cx, cy: anchor.cy, hw: anchor.hw };
  const tiles = visibleTiles(anchor, view, 256);
  assert.deepEqual(tiles, [{ zoom: 0, x: 0, y: 0 }]);
  const box = tileWorldBox(anchor, tiles[0]);
  assert.equal(box.w, 2 * anchor.hw);
});

test("zoom increases when the view shrinks", () => {
  const z0 = zoomForView(anchor, { cx: 0.8, cy: 0, hw: anchor.hw }, 512);
  const z1 = zoomForView(anchor, { cx: 0.8, cy: 0, hw: anchor.hw / 8 }, 512);
  assert.ok(z1 > z0);
});

test("visible tiles stay inside the tile grid and tile the view", () => {
  const view = { cx: 2.0, cy: 0.4, hw: 0.3 };
  const tiles = visibleTiles(anchor, view, 512);
  assert.ok(tiles.length > 0);
  const n = 1 << tiles[0].zoom;
  for (const t of tiles) {
    assert.ok(t.x >= 0 && t.x < n && t.y >= 0 && t.y < n);
  }
  // the union of tile boxes covers the view corners
  const covered = (wx: number, wy: number) =>
    tiles.some((t) => {
      const b = tileWorldBox(anchor, t);
      return wx >= b.x0 && wx <= b.x0 + b.w && wy >= b.y0 && wy <= b.y0 + b.w;
    });
  assert.ok(covered(view.cx - view.hw, view.cy - view.hw));
  assert.ok(covered(view.cx + view.hw, view.cy + view.hw));
});

test("world/canvas transforms invert each other", () => {
  const view = { cx: 1.1, cy: -0.4, hw: 0.75 };
  const { sx, sy } = worldToCanvas(view, 512, 1.3, -0.1);
  const { wx, wy } = canvasToWorld(view, 512, sx, sy);
  assert.ok(Math.abs(wx - 1.3) < 1e-12);
  assert.ok(Math.abs(wy + 0.1) < 1e-12);
});

test("canvas y axis points down", () => {
  const view = { cx: 0, cy: 0, hw: 1 };
  const top = worldToCanvas(view, 100, 0, 1);
  const bottom = worldToCanvas(view, 100, 0, -1);
  assert.ok(top.sy < bottom.sy);
});

test("tile keys separate planes and parameters", () => {
  const t = { zoom: 2, x: 1, y: 3 };
  assert.notEqual(tileKey("parameter", t), tileKey("dynamical", t, { re: 2, im: 0 }));
  assert.notEqual(
    tileKey("dynamical", t, { re: 2, im: 0 }),
    tileKey("dynamical", t, { re: 2.5, im: 0.5 }),
  );
});
