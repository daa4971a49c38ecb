"""HTTP service: tiles, point analysis, portraits, ray traces, mating runs.

Stateless handlers over read-mostly caches; every JSON response carries a
version tag.  Endpoints:

    GET  /tile?plane=parameter&zoom=0&x=0&y=0[&a=re,im][&coloring=...]
    GET  /analyze/point?a=re,im
    GET  /portrait?angles=1/7,2/7,4/7
    GET  /trace?a=re,im&theta=1/7[&kind=bubble|internal][&depth=60]
    POST /mating/verify   {"c": [re, im], "theta_c": "1/6", ...}
    GET  /health
"""
from __future__ import annotations

import json
import threading
from fractions import Fraction
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from . import __version__
from .angles import fmt_angle, parse_angle, try_validate_portrait, characteristic_arc
from . import dynamics as dyn
from . import parameter as par
from . import render as rnd

_TILE_CACHE: dict = {}
_TILE_LOCK = threading.Lock()
TILE_CACHE_MAX = 512

# job handles for long-running analyses
_JOBS: dict = {}
_JOB_LOCK = threading.Lock()
_JOB_SEQ = [0]


def _start_job(fn):
    with _JOB_LOCK:
        _JOB_SEQ[0] += 1
        jid = f"job-{_JOB_SEQ[0]}"
        _JOBS[jid] = {"status": "running", "result": None, "error": None}

    def run():
        try:
            res = fn()
            with _JOB_LOCK:
                _JOBS[jid].update(status="done", result=res)
        except Exception as e:
            with _JOB_LOCK:
                _JOBS[jid].update(status="error", error=str(e))

    threading.Thread(target=run, daemon=True).start()
    return jid


def parse_complex(s: str) -> complex:
    s = s.strip()
    if "," in s:
        re_s, im_s = s.split(",", 1)
        return complex(float(re_s), float(im_s))
    return complex(float(s), 0.0)


def analyze_point(a: complex) -> dict:
    cap = par.capture_generation(a)
    out = {
        "a": [a.real, a.imag],
        "capture": cap.to_json(),
        "capture_generation": cap.generation,
    }
    try:
        fps = dyn.fixed_points(a)
        out["fixed_points"] = [f.to_json() for f in fps]
    except Exception as e:
        out["fixed_points_error"] = str(e)
    if cap.status == "not-captured-within-budget":
        try:
            w = par.wake(Fraction(1, 7), Fraction(2, 7))
            m = par.wake_membership(w, a, depth=60)
            out["wake_1_7_2_7"] = m.to_json()
        except Exception as e:
            out["wake_error"] = str(e)
    return out


def portrait_endpoint(angles_str: str) -> dict:
    sets = []
    for part in angles_str.split(";"):
        sets.append([parse_angle(x) for x in part.split(",") if x.strip()])
    portrait, rej = try_validate_portrait(sets)
    if rej is not None:
        return {"valid": False, "reason": rej.reason, "detail": rej.detail}
    out = {"valid": True, **portrait.to_json()}
    if portrait.valence >= 2:
        arc = characteristic_arc(portrait)
        out["characteristic"] = f"({fmt_angle(arc.start)},{fmt_angle(arc.end)})"
    return out


def trace_endpoint(a: complex, theta, kind: str = "bubble", depth: int = 60) -> dict:
    th = parse_angle(str(theta))
    if kind == "internal":
        return dyn.internal_ray(a, th).to_json()
    tr = dyn.trace_bubble_ray(a, th, depth=depth)
    return tr.to_json()


def tile_endpoint(plane: str, zoom: int, x: int, y: int, a: complex,
                  coloring: str, max_iter: int) -> bytes:
    key = (plane, zoom, x, y, complex(a), coloring, max_iter)
    with _TILE_LOCK:
        if key in _TILE_CACHE:
            return _TILE_CACHE[key]
    spec = rnd.tile_spec(plane, zoom, x, y, a=a, coloring=coloring,
                         max_iter=max_iter)
    img, _ = rnd.render(spec)
    data = rnd.encode_png(img)
    with _TILE_LOCK:
        if len(_TILE_CACHE) >= TILE_CACHE_MAX:
            _TILE_CACHE.clear()
        _TILE_CACHE[key] = data
    return data


class Handler(BaseHTTPRequestHandler):
    server_version = "matebench"

    def _send_json(self, obj, code=200):
        body = json.dumps({"version": __version__, **obj}).encode()
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _send_png(self, data: bytes):
        self.send_response(200)
        self.send_header("Content-Type", "image/png")
        self.send_header("Content-Length", str(len(data)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Cache-Control", "max-age=86400")
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, fmt, *args):
        pass  # quiet by default

    def do_GET(self):
        url = urlparse(self.path)
        q = {k: v[0] for k, v in parse_qs(url.query).items()}
        try:
            if url.path == "/health":
                self._send_json({"ok": True})
            elif url.path == "/tile":
                data = tile_endpoint(
                    q.get("plane", "parameter"),
                    int(q.get("zoom", 0)),
                    int(q.get("x", 0)),
                    int(q.get("y", 0)),
                    parse_complex(q.get("a", "2,0")),
                    q.get("coloring", "capture-generation"),
                    int(q.get("max_iter", 120)),
                )
                self._send_png(data)
            elif url.path == "/analyze/point":
                self._send_json(analyze_point(parse_complex(q["a"])))
            elif url.path == "/portrait":
                self._send_json(portrait_endpoint(q["angles"]))
            elif url.path == "/mating/job":
                with _JOB_LOCK:
                    job = dict(_JOBS.get(q.get("id", ""), {}))
                if not job:
                    self._send_json({"error": "unknown job"}, 404)
                else:
                    self._send_json(job)
            elif url.path == "/trace":
                self._send_json(
                    trace_endpoint(
                        parse_complex(q["a"]),
                        q["theta"],
                        q.get("kind", "bubble"),
                        int(q.get("depth", 60)),
                    )
                )
            else:
                self._send_json({"error": "not found"}, 404)
        except (KeyError, ValueError) as e:
            self._send_json({"error": f"bad request: {e}"}, 400)
        except Exception as e:  # pragma: no cover
            self._send_json({"error": str(e)}, 500)

    def do_POST(self):
        url = urlparse(self.path)
        try:
            length = int(self.headers.get("Content-Length", 0))
            payload = json.loads(self.rfile.read(length) or b"{}")
            if url.path == "/mating/verify":
                from . import mating as mat

                c = payload.get("c", [0.0, 1.0])

                def job():
                    rep = mat.verify_mating(
                        complex(c[0], c[1]),
                        payload.get("theta_c", "1/6"),
                        depth=int(payload.get("depth", 110)),
                        n_angles=int(payload.get("n_angles", 40)),
                        delta_depths=int(payload.get("delta_depths", 4)),
                    )
                    return rep.to_json()

                if payload.get("async"):
                    self._send_json({"job": _start_job(job)}, 202)
                else:
                    self._send_json(job())
            else:
                self._send_json({"error": "not found"}, 404)
        except (KeyError, ValueError, json.JSONDecodeError) as e:
            self._send_json({"error": f"bad request: {e}"}, 400)
        except Exception as e:  # pragma: no cover
            self._send_json({"error": str(e)}, 500)


def serve(host: str = "127.0.0.1", port: int = 8765):
    httpd = ThreadingHTTPServer((host, port), Handler)
    return httpd
