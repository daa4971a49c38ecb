// Explorer wiring: a parameter-plane panel and a dynamical-plane panel,
// each a canvas tile compositor; clicks on the parameter plane select a
// and refresh the analysis card; overlays are drawn client-side from
// trace JSON so toggling needs no re-render.

import { Api, tracePolyline } from "./api.js";
import {
  DEFAULT_STATE,
  ViewState,
  decodeState,
  encodeState,
} from "./state.js";
import {
  PLANE_ANCHOR,
  TILE_SIZE,
  canvasToWorld,
  tileKey,
  tileWorldBox,
  visibleTiles,
  worldToCanvas,
} from "./tiles.js";

const OVERLAY_COLORS: Record<string, string> = {
  ray: "#ffffff",
  internal: "#78ffa0",
  spine: "#ff7878",
};

class Panel {
  canvas: HTMLCanvasElement;
  plane: "parameter" | "dynamical";
  view = { cx: 0, cy: 0, hw: 3 };
  images = new Map<string, HTMLImageElement>();
  api: Api;
  app: App;

  constructor(app: App, api: Api, canvas: HTMLCanvasElement,
              plane: "parameter" | "dynamical") {
    this.app = app;
    this.api = api;
    this.canvas = canvas;
    this.plane = plane;
    const anchor = PLANE_ANCHOR[plane];
    this.view = { cx: anchor.cx, cy: anchor.cy, hw: anchor.hw };
    this.bind();
  }

  private bind() {
    let drag: { sx: number; sy: number; cx: number; cy: number } | null = null;
    let moved = false;
    this.canvas.addEventListener("mousedown", (e) => {
      drag = { sx: e.offsetX, sy: e.offsetY, cx: this.view.cx, cy: this.view.cy };
      moved = false;
    });
    this.canvas.addEventListener("mousemove", (e) => {
      if (!drag) return;
      const scale = (2 * this.view.hw) / this.canvas.width;
      const dx = (e.offsetX - drag.sx) * scale;
      const dy = (e.offsetY - drag.sy) * scale;
      if (Math.abs(dx) + Math.abs(dy) > 0.002 * this.view.hw) moved = true;
      this.view.cx = drag.cx - dx;
      this.view.cy = drag.cy + dy;
      this.app.viewChanged();
    });
    window.addEventListener("mouseup", () => (drag = null));
    this.canvas.addEventListener("click", (e) => {
      if (moved) return;
      const { wx, wy } = canvasToWorld(this.view, this.canvas.width, e.offsetX, e.offsetY);
      this.app.clicked(this, wx, wy);
    });
    this.canvas.addEventListener("wheel", (e) => {
      e.preventDefault();
      const f = e.deltaY > 0 ? 1.25 : 0.8;
      const { wx, wy } = canvasToWorld(this.view, this.canvas.width, e.offsetX, e.offsetY);
      this.view.hw *= f;
      this.view.cx = wx + (this.view.cx - wx) * f;
      this.view.cy = wy + (this.view.cy - wy) * f;
      this.app.viewChanged();
    });
  }

  draw(aSel: { re: number; im: number } | null) {
    const ctx = this.canvas.getContext("2d")!;
    const n = this.canvas.width;
    ctx.fillStyle = "#101018";
    ctx.fillRect(0, 0, n, n);
    const anchor = PLANE_ANCHOR[this.plane];
    for (const t of visibleTiles(anchor, this.view, n)) {
      const key = tileKey(this.plane, t, aSel);
      let img = this.images.get(key);
      if (!img) {
        img = new Image();
        img.src = this.api.tileUrl(this.plane, t.zoom, t.x, t.y, aSel);
        img.onload = () => this.app.requestDraw();
        this.images.set(key, img);
        if (this.images.size > 600) {
          const first = this.images.keys().next().value as string;
          this.images.delete(first);
        }
      }
      if (img.complete && img.naturalWidth > 0) {
        const box = tileWorldBox(anchor, t);
        const p0 = worldToCanvas(this.view, n, box.x0, box.y0 + box.w);
        const scale = (box.w / (2 * this.view.hw)) * n;
        ctx.imageSmoothingEnabled = false;
        ctx.drawImage(img, p0.sx, p0.sy, scale, scale);
      }
    }
  }

  drawPolyline(pts: [number, number][], color: string) {
    const ctx = this.canvas.getContext("2d")!;
    ctx.strokeStyle = color;
    ctx.lineWidth = 1.2;
    ctx.beginPath();
    let pen = false;
    for (const [wx, wy] of pts) {
      if (!isFinite(wx) || !isFinite(wy) || Math.hypot(wx, wy) > 1e5) {
        pen = false;
        continue;
      }
      const { sx, sy } = worldToCanvas(this.view, this.canvas.width, wx, wy);
      if (pen) ctx.lineTo(sx, sy);
      else ctx.moveTo(sx, sy);
      pen = true;
    }
    ctx.stroke();
  }

  drawMarker(wx: number, wy: number, color: string) {
    const ctx = this.canvas.getContext("2d")!;
    const { sx, sy } = worldToCanvas(this.view, this.canvas.width, wx, wy);
    ctx.fillStyle = color;
    ctx.beginPath();
    ctx.arc(sx, sy, 3, 0, 2 * Math.PI);
    ctx.fill();
  }
}

class App {
  api = new Api(serviceBase());
  state: ViewState = DEFAULT_STATE;
  paramPanel: Panel;
  dynPanel: Panel;
  card: HTMLElement;
  overlayCache = new Map<string, [number, number][]>();
  drawQueued = false;

  constructor() {
    this.paramPanel = new Panel(this, this.api,
      document.getElementById("param") as HTMLCanvasElement, "parameter");
    this.dynPanel = new Panel(this, this.api,
      document.getElementById("dyn") as HTMLCanvasElement, "dynamical");
    this.card = document.getElementById("card")!;
    this.state = decodeState(location.hash);
    this.paramPanel.view = { ...this.state.view };
    window.addEventListener("hashchange", () => {
      this.state = decodeState(location.hash);
      this.paramPanel.view = { ...this.state.view };
      this.overlayCache.clear();
      this.requestDraw();
      if (this.state.a) this.refreshAnalysis();
    });
    this.bindControls();
    if (this.state.a) this.refreshAnalysis();
    this.requestDraw();
  }

  viewChanged() {
    this.api.newGeneration();
    this.state.view = { ...this.paramPanel.view };
    this.pushState();
    this.requestDraw();
  }

  pushState() {
    const h = "#" + encodeState(this.state);
    if (location.hash !== h) history.replaceState(null, "", h);
  }

  requestDraw() {
    if (this.drawQueued) return;
    this.drawQueued = true;
    requestAnimationFrame(() => {
      this.drawQueued = false;
      this.paramPanel.draw(null);
      this.dynPanel.draw(this.state.a);
      this.drawOverlays();
      if (this.state.a) {
        this.paramPanel.drawMarker(this.state.a.re, this.state.a.im, "#ffe060");
      }
    });
  }

  clicked(panel: Panel, wx: number, wy: number) {
    if (panel.plane !== "parameter") return;
    this.state.a = { re: wx, im: wy };
    this.overlayCache.clear();
    this.pushState();
    this.refreshAnalysis();
    this.requestDraw();
  }

  async refreshAnalysis() {
    const a = this.state.a;
    if (!a) return;
    this.card.textContent = `analyzing a = ${a.re.toFixed(5)} + ${a.im.toFixed(5)}i …`;
    try {
      const d = (await this.api.analyzePoint(a.re, a.im)) as {
        capture: { generation: number | null; status: string };
        wake_1_7_2_7?: { member: boolean };
      };
      const cap = d.capture;
      let txt = `a = ${a.re.toFixed(6)} + ${a.im.toFixed(6)}i\n`;
      if (cap.status === "p-infinity") {
        txt += "P∞ badge: quasicircle regime (critical value escapes)\n";
      } else if (cap.status === "captured") {
        txt += `capture generation: ${cap.generation}\n`;
      } else {
        txt += "not captured within budget (mating locus candidate)\n";
      }
      if (d.wake_1_7_2_7) {
        txt += `wake W(1/7,2/7): ${d.wake_1_7_2_7.member ? "member" : "non-member"}\n`;
      }
      this.card.textContent = txt;
    } catch (e) {
      this.card.textContent = `offline? cached tiles only — ${e}`;
    }
  }

  async drawOverlays() {
    const a = this.state.a;
    if (!a) return;
    for (const id of this.state.overlays) {
      const key = `${id}@${a.re},${a.im}`;
      let pts = this.overlayCache.get(key);
      if (!pts) {
        try {
          if (id === "spine") {
            const t0 = await this.api.trace(a.re, a.im, "0", "bubble", 30);
            const t1 = await this.api.trace(a.re, a.im, "1/2", "bubble", 30);
            pts = [...tracePolyline(t0), [NaN, NaN], ...tracePolyline(t1)] as [number, number][];
          } else {
            const [kind, theta] = id.split(":");
            const tr = await this.api.trace(
              a.re, a.im, theta, kind === "internal" ? "internal" : "bubble", 45);
            pts = tracePolyline(tr);
            if (tr.landing) pts.push(tr.landing);
          }
          this.overlayCache.set(key, pts);
        } catch {
          continue;
        }
      }
      const color = OVERLAY_COLORS[id.split(":")[0]] ?? "#ffffff";
      this.dynPanel.drawPolyline(pts, color);
      const last = pts[pts.length - 1];
      if (last && isFinite(last[0])) this.dynPanel.drawMarker(last[0], last[1], color);
    }
  }

  bindControls() {
    const toggles = document.querySelectorAll<HTMLInputElement>("input[data-overlay]");
    toggles.forEach((el) => {
      el.checked = this.state.overlays.includes(el.dataset.overlay!);
      el.addEventListener("change", () => {
        const id = el.dataset.overlay!;
        const set = new Set(this.state.overlays);
        if (el.checked) set.add(id);
        else set.delete(id);
        this.state.overlays = [...set].sort();
        this.pushState();
        this.requestDraw();
      });
    });
    const refine = document.getElementById("refine") as HTMLButtonElement | null;
    refine?.addEventListener("click", () => this.refineDelta());
  }

  async refineDelta() {
    const out = document.getElementById("delta")!;
    out.textContent = "running mating verification (Δ_d refinement)…";
    try {
      const job = await this.api.verifyMatingAsync(0, 1, this.state.targetTheta, {
        n_angles: 20,
        delta_depths: 6,
      });
      const poll = async () => {
        const st = (await this.api.jobStatus(job)) as {
          status: string;
          result?: {
            location: { a: [number, number] };
            delta_diameters: { depth: number; diameter: number }[];
            passed: boolean;
          };
        };
        if (st.status === "running") {
          setTimeout(poll, 1500);
          return;
        }
        if (st.status !== "done" || !st.result) {
          out.textContent = `job ${st.status}`;
          return;
        }
        const res = st.result;
        const [are, aim] = res.location.a;
        let txt = `located a = ${are.toFixed(8)} + ${aim.toFixed(8)}i  (passed: ${res.passed})\n`;
        for (const d of res.delta_diameters) {
          txt += `Δ_${d.depth}: diameter ≈ ${d.diameter.toFixed(4)}\n`;
        }
        out.textContent = txt;
        // nested outlines: circles of the estimated diameters around a
        res.delta_diameters.forEach((d, i) => {
          this.drawCircle(this.paramPanel, are, aim, d.diameter / 2,
            `hsl(${40 + 24 * i} 90% 60%)`);
        });
        this.paramPanel.drawMarker(are, aim, "#60ff9f");
      };
      poll();
    } catch (e) {
      out.textContent = `failed: ${e}`;
    }
  }

  drawCircle(panel: Panel, wx: number, wy: number, r: number, color: string) {
    const pts: [number, number][] = [];
    for (let k = 0; k <= 64; k++) {
      const t = (2 * Math.PI * k) / 64;
      pts.push([wx + r * Math.cos(t), wy + r * Math.sin(t)]);
    }
    panel.drawPolyline(pts, color);
  }
}

function serviceBase(): string {
  const q = new URLSearchParams(location.search);
  return q.get("service") ?? "http://localhost:8765";
}

if (typeof document !== "undefined" && document.getElementById("param")) {
  new App();
}
