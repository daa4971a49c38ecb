// View state and its URL-hash codec: deep links reproduce views exactly.

export interface Viewport {
  cx: number;
  cy: number;
  hw: number; // half-width of the square view
}

export interface ViewState {
  plane: "parameter" | "dynamical";
  view: Viewport;
  a: { re: number; im: number } | null; // selected parameter
  overlays: string[]; // overlay ids, e.g. "ray:1/7", "spine"
  targetTheta: string; // theta_c for delta refinement / mating runs
}

export const DEFAULT_STATE: ViewState = {
  plane: "parameter",
  view: { cx: 0.8, cy: 0.0, hw: 3.2 },
  a: null,
  overlays: [],
  targetTheta: "1/6",
};

const NUM = (x: number) => {
  // stable, compact, roundtrippable
  const s = x.toPrecision(12);
  return String(parseFloat(s));
};

export function encodeState(st: ViewState): string {
  const p = new URLSearchParams();
  p.set("plane", st.plane);
  p.set("v", [NUM(st.view.cx), NUM(st.view.cy), NUM(st.view.hw)].join("_"));
  if (st.a) p.set("a", `${NUM(st.a.re)}_${NUM(st.a.im)}`);
  if (st.overlays.length) p.set("ov", st.overlays.join(","));
  if (st.targetTheta !== DEFAULT_STATE.targetTheta) p.set("tc", st.targetTheta);
  return p.toString();
}

export function decodeState(hash: string): ViewState {
  const st: ViewState = JSON.parse(JSON.stringify(DEFAULT_STATE));
  const p = new URLSearchParams(hash.replace(/^#/, ""));
  const plane = p.get("plane");
  if (plane === "dynamical" || plane === "parameter") st.plane = plane;
  const v = p.get("v");
  if (v) {
    const parts = v.split("_").map(parseFloat);
    if (parts.length === 3 && parts.every((x) => isFinite(x)) && parts[2] > 0) {
      st.view = { cx: parts[0], cy: parts[1], hw: parts[2] };
    }
  }
  const a = p.get("a");
  if (a) {
    const parts = a.split("_").map(parseFloat);
    if (parts.length === 2 && parts.every((x) => isFinite(x))) {
      st.a = { re: parts[0], im: parts[1] };
    }
  }
  const ov = p.get("ov");
  if (ov) st.overlays = ov.split(",").filter((s) => s.length > 0);
  const tc = p.get("tc");
  if (tc && /^\d+\/\d+$/.test(tc)) st.targetTheta = tc;
  return st;
}

export function roundTrips(st: ViewState): boolean {
  const back = decodeState(encodeState(st));
  return JSON.stringify(back) === JSON.stringify(st);
}
