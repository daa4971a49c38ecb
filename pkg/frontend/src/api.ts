// Service client with request de-duplication and viewport-scoped
// cancellation: stale tile/trace requests are dropped when the view moves.

export class Api {
  base: string;
  private inflight = new Map<string, Promise<unknown>>();
  private generation = 0;

  constructor(base = "") {
    this.base = base;
  }

  // bump to invalidate queued work after a viewport change
  newGeneration(): number {
    return ++this.generation;
  }

  currentGeneration(): number {
    return this.generation;
  }

  private dedup<T>(key: string, make: () => Promise<T>): Promise<T> {
    const hit = this.inflight.get(key);
    if (hit) return hit as Promise<T>;
    const p = make().finally(() => this.inflight.delete(key));
    this.inflight.set(key, p);
    return p;
  }

  tileUrl(plane: string, zoom: number, x: number, y: number,
          a?: { re: number; im: number } | null): string {
    let url = `${this.base}/tile?plane=${plane}&zoom=${zoom}&x=${x}&y=${y}`;
    if (plane === "dynamical" && a) url += `&a=${a.re},${a.im}`;
    return url;
  }

  async json<T>(path: string): Promise<T> {
    return this.dedup(path, async () => {
      const r = await fetch(this.base + path);
      if (!r.ok) throw new Error(`${r.status} ${path}`);
      return (await r.json()) as T;
    });
  }

  analyzePoint(re: number, im: number) {
    return this.json<Record<string, unknown>>(`/analyze/point?a=${re},${im}`);
  }

  trace(aRe: number, aIm: number, theta: string, kind = "bubble", depth = 50) {
    return this.json<TraceResult>(
      `/trace?a=${aRe},${aIm}&theta=${encodeURIComponent(theta)}&kind=${kind}&depth=${depth}`,
    );
  }

  async verifyMatingAsync(cRe: number, cIm: number, thetaC: string,
                          extra: Record<string, unknown> = {}) {
    const r = await fetch(`${this.base}/mating/verify`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ c: [cRe, cIm], theta_c: thetaC, async: true, ...extra }),
    });
    const d = (await r.json()) as { job: string };
    return d.job;
  }

  jobStatus(id: string) {
    // polling must not be de-duplicated across time: unique key per call
    return fetch(`${this.base}/mating/job?id=${id}`).then((r) => r.json());
  }
}

export interface TraceResult {
  theta: string;
  landed: boolean;
  landing: [number, number] | null;
  bubbles?: { center: [number, number]; root: [number, number] }[];
  points?: [number, number][];
  warnings?: string[];
}

export function tracePolyline(tr: TraceResult): [number, number][] {
  if (tr.points && tr.points.length) return tr.points;
  const out: [number, number][] = [];
  for (const b of tr.bubbles ?? []) {
    out.push(b.root, b.center);
  }
  return out;
}
