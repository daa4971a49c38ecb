import test from "node:test";
import assert from "node:assert/strict";

import {
  DEFAULT_STATE,
  ViewState,
  decodeState,
  encodeState,
  roundTrips,
} from "../src/state.js";

test("default state round-trips through the URL codec", () => {
  assert.ok(roundTrips(DEFAULT_STATE));
});

test("full state round-trips", () => {
  const st: ViewState = {
    plane: "dynamical",
    view: { cx: -0.25, cy: 1.125, hw: 0.03125 },
    a: { re: 2.5, im: 0.5 },
    overlays: ["ray:1/7", "spine"],
    targetTheta: "1/14",
  };
  assert.ok(roundTrips(st));
  const enc = encodeState(st);
  assert.match(enc, /plane=dynamical/);
  assert.match(enc, /ov=ray%3A1%2F7%2Cspine|ov=ray/);
});

test("decode tolerates junk", () => {
  const st = decodeState("#plane=weird&v=a_b_c&a=x_y&ov=&tc=notafraction");
  assert.equal(st.plane, "parameter");
  assert.deepEqual(st.view, DEFAULT_STATE.view);
  assert.equal(st.a, null);
  assert.deepEqual(st.overlays, []);
  assert.equal(st.targetTheta, "1/6");
});

test("decode rejects non-positive half width", () => {
  const st = decodeState("#v=0_0_-2");
  assert.deepEqual(st.view, DEFAULT_STATE.view);
});

test("selected parameter is preserved exactly enough", () => {
  const st: ViewState = {
    ...DEFAULT_STATE,
    a: { re: 2.0000000562, im: -7.25e-5 },
  };
  const back = decodeState("#" + encodeState(st));
  assert.ok(Math.abs(back.a!.re - st.a!.re) < 1e-9);
  assert.ok(Math.abs(back.a!.im - st.a!.im) < 1e-12);
});
