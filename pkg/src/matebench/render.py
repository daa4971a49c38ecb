"""Deterministic rendering of parameter and dynamical planes.

Escape iteration is vectorized with numpy; overlays (rays, spines, wakes,
puzzle axes) are drawn from polylines produced by the analysis modules and
also returned as a JSON sidecar.  Output is PNG (stdlib zlib encoder) with
a PPM fallback, bit-reproducible for a fixed spec.
"""
from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import numpy as np

from .angles import angle, parse_angle
from . import dynamics as dyn


@dataclass
class RenderSpec:
    plane: str = "parameter"          # 'parameter' | 'dynamical'
    a: complex = 2.0 + 0j             # parameter for dynamical plane
    center: complex = 0.0 + 0j
    half_width: float = 3.0
    resolution: int = 512
    coloring: str = "capture-generation"  # | 'green-level-sets' | 'basin' | 'plain'
    max_iter: int = 120
    overlays: List[dict] = field(default_factory=list)
    max_resolution: int = 4096

    def validate(self):
        if self.plane not in ("parameter", "dynamical"):
            raise ValueError("plane must be 'parameter' or 'dynamical'")
        if self.coloring not in ("capture-generation", "green-level-sets",
                                 "basin", "plain"):
            raise ValueError(f"unknown coloring {self.coloring!r}")
        if not (0 < self.resolution <= self.max_resolution):
            raise ValueError("resolution out of bounds")
        if self.half_width <= 0:
            raise ValueError("viewport is empty")
        return self

    def grid(self):
        n = self.resolution
        xs = np.linspace(self.center.real - self.half_width,
                         self.center.real + self.half_width, n)
        ys = np.linspace(self.center.imag - self.half_width,
                         self.center.imag + self.half_width, n)
        return xs[None, :] + 1j * ys[:, None]

    def to_pixel(self, z: complex, n: Optional[int] = None):
        n = n or self.resolution
        x = (z.real - (self.center.real - self.half_width)) / (2 * self.half_width)
        y = (z.imag - (self.center.imag - self.half_width)) / (2 * self.half_width)
        return x * (n - 1), y * (n - 1)

    def to_json(self):
        return {
            "plane": self.plane,
            "a": [self.a.real, self.a.imag],
            "center": [self.center.real, self.center.imag],
            "half_width": self.half_width,
            "resolution": self.resolution,
            "coloring": self.coloring,
            "max_iter": self.max_iter,
            "overlays": self.overlays,
        }


ESCAPE_RADIUS = 1e8


def escape_counts_parameter(spec: RenderSpec):
    """First escape index of the critical orbit of R_a per pixel (0 where
    the budget ran out: the black mating locus)."""
    A = spec.grid()
    z = np.full_like(A, -1.0 + 0j)
    counts = np.zeros(A.shape, dtype=np.int32)
    alive = np.ones(A.shape, dtype=bool)
    alive &= np.abs(A) > 1e-12
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for n in range(1, spec.max_iter + 1):
            d = z * (z + 2)
            small = np.abs(d) < 1e-300
            d[small] = 1e-300
            z = np.where(alive, A / d, z)
            esc = alive & (np.abs(z) > ESCAPE_RADIUS)
            counts[esc] = n
            alive &= ~esc
            z = np.where(alive, z, 0)
            if not alive.any():
                break
    return counts


def escape_counts_dynamical(spec: RenderSpec):
    a = complex(spec.a)
    Z = spec.grid()
    counts = np.zeros(Z.shape, dtype=np.int32)
    alive = np.ones(Z.shape, dtype=bool)
    z = Z.copy()
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for n in range(1, spec.max_iter + 1):
            d = z * (z + 2)
            small = np.abs(d) < 1e-300
            d[small] = 1e-300
            z = np.where(alive, a / d, z)
            esc = alive & (np.abs(z) > ESCAPE_RADIUS)
            counts[esc] = n
            alive &= ~esc
            z = np.where(alive, z, 0)
            if not alive.any():
                break
    return counts


_PALETTE = np.array(
    [
        (8, 8, 24), (30, 16, 48), (64, 24, 72), (120, 32, 80),
        (178, 44, 70), (222, 80, 56), (248, 128, 48), (252, 180, 70),
        (246, 222, 122), (222, 244, 180), (170, 238, 222), (110, 204, 240),
        (70, 150, 236), (60, 96, 210), (50, 56, 160), (28, 28, 92),
    ],
    dtype=np.uint8,
)


def colorize(counts: np.ndarray, coloring: str):
    h, w = counts.shape
    img = np.zeros((h, w, 3), dtype=np.uint8)
    inside = counts == 0
    if coloring == "plain":
        img[~inside] = (235, 235, 235)
    elif coloring == "basin":
        img[~inside & (counts % 2 == 1)] = (90, 140, 220)
        img[~inside & (counts % 2 == 0)] = (230, 170, 60)
    else:  # capture-generation and green-level-sets share the band palette
        idx = (counts - 1) % len(_PALETTE)
        img[~inside] = _PALETTE[idx[~inside]]
    img[inside] = (0, 0, 0)
    return img


def draw_polyline(img: np.ndarray, spec: RenderSpec, pts: Sequence[complex],
                  color=(255, 255, 255)):
    n = img.shape[0]
    prev = None
    for z in pts:
        if z is None or dyn.is_inf(z) or abs(z) > 1e6:
            prev = None
            continue
        x, y = spec.to_pixel(z, n)
        cur = (x, y)
        if prev is not None:
            _line(img, prev, cur, color)
        prev = cur


def _line(img, p, q, color):
    n = img.shape[0]
    x0, y0 = p
    x1, y1 = q
    steps = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
    if steps > 8 * n:  # off-screen jumps
        return
    for i in range(steps + 1):
        t = i / steps
        x = x0 + (x1 - x0) * t
        y = y0 + (y1 - y0) * t
        xi, yi = int(round(x)), int(round(y))
        if 0 <= xi < n and 0 <= yi < n:
            img[yi, xi] = color


OVERLAY_COLORS = {
    "bubble-ray": (255, 255, 255),
    "internal-ray": (120, 255, 160),
    "spine": (255, 120, 120),
    "wake": (255, 220, 90),
    "puzzle": (170, 170, 255),
}


def render(spec: RenderSpec, budget_seconds: Optional[float] = None):
    """Render a spec: returns (rgb array, sidecar dict).

    The sidecar lists every overlay polyline in plane coordinates plus
    landing markers, so clients can redraw overlays without re-rendering.
    With a budget, overlays that do not fit are skipped and recorded in the
    sidecar coverage mask.
    """
    import time as _time

    t0 = _time.monotonic()
    spec.validate()
    if spec.plane == "parameter":
        counts = escape_counts_parameter(spec)
    else:
        counts = escape_counts_dynamical(spec)
    img = colorize(counts, spec.coloring)
    sidecar = {"spec": spec.to_json(), "overlays": [], "version": 1,
               "coverage": {"complete": True, "skipped": []}}
    forest = None
    for ov in spec.overlays:
        kind = ov.get("kind")
        if budget_seconds is not None and _time.monotonic() - t0 > budget_seconds:
            sidecar["coverage"]["complete"] = False
            sidecar["coverage"]["skipped"].append(ov)
            continue
        try:
            polys, markers = _overlay_geometry(spec, ov, forest)
        except Exception as e:
            sidecar["overlays"].append({"kind": kind, "error": str(e)})
            continue
        color = OVERLAY_COLORS.get(kind, (255, 255, 255))
        for poly in polys:
            draw_polyline(img, spec, poly, color)
        sidecar["overlays"].append(
            {
                "kind": kind,
                "params": {k: v for k, v in ov.items() if k != "kind"},
                "polylines": [
                    [[z.real, z.imag] for z in poly if not dyn.is_inf(z)]
                    for poly in polys
                ],
                "markers": [[m.real, m.imag] for m in markers],
            }
        )
    return img, sidecar


def _overlay_geometry(spec: RenderSpec, ov: dict, forest):
    kind = ov.get("kind")
    a = complex(spec.a)
    if kind == "bubble-ray":
        th = parse_angle(str(ov["theta"]))
        tr = dyn.trace_bubble_ray(a, th, depth=int(ov.get("depth", 40)))
        poly = []
        for b in tr.bubbles:
            poly.extend([b.root, b.center])
        markers = [tr.landing] if tr.landing is not None else []
        return [poly], markers
    if kind == "internal-ray":
        th = parse_angle(str(ov["theta"]))
        tr = dyn.internal_ray(a, th, potential_low=float(ov.get("low", 1e-6)))
        return [tr.points], ([tr.landing] if tr.landing is not None else [])
    if kind == "spine":
        tr = dyn.spine_trace(a, depth=int(ov.get("depth", 24)))
        return [tr["left"], tr["right"], tr["ray0"], tr["ray_half"]], []
    if kind == "wake":
        from . import parameter as par

        w = par.wake(parse_angle(str(ov["t_minus"])), parse_angle(str(ov["t_plus"])))
        # the wake root plus the angle-0 internal rays of the lowest
        # parabubbles sketch the mouth of the wake
        polys = []
        for n in (2, 3):
            for c in par.capture_centers(n):
                tr = par.param_internal_ray(c, n, Fraction(0),
                                            potential_low=1e-4)
                polys.append(tr.points)
        markers = [w.parabolic_root] if w.parabolic_root else []
        return polys, markers
    if kind == "puzzle":
        from . import puzzle as puz
        from . import parameter as par

        th_c = parse_angle(str(ov["theta_c"]))
        w = par.wake_for_target(th_c)
        depth = int(ov.get("depth", 1))
        polys = []
        angles = set(w.portrait_angles)
        level = set(w.portrait_angles)
        for _ in range(depth):
            level = {angle(t / 2) for t in level} | {
                angle(t / 2 + Fraction(1, 2)) for t in level
            }
            angles |= level
        for t in sorted(angles):
            tr = dyn.trace_bubble_ray(a, t, depth=int(ov.get("ray_depth", 30)))
            poly = []
            for b in tr.bubbles:
                poly.extend([b.root, b.center])
            polys.append(poly)
        return polys, []
    raise ValueError(f"unknown overlay kind {kind!r}")


# --- image encoding ---------------------------------------------------------

def encode_png(img: np.ndarray) -> bytes:
    """Minimal deterministic PNG encoder (8-bit RGB, no filtering)."""
    h, w, _ = img.shape
    raw = b"".join(b"\x00" + img[row].tobytes() for row in range(h))
    compressed = zlib.compress(raw, 9)

    def chunk(tag: bytes, data: bytes) -> bytes:
        return (
            struct.pack(">I", len(data))
            + tag
            + data
            + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)
        )

    ihdr = struct.pack(">IIBBBBB", w, h, 8, 2, 0, 0, 0)
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", ihdr)
        + chunk(b"IDAT", compressed)
        + chunk(b"IEND", b"")
    )


def encode_ppm(img: np.ndarray) -> bytes:
    h, w, _ = img.shape
    return f"P6\n{w} {h}\n255\n".encode() + img.tobytes()


def render_to_files(spec: RenderSpec, path: str, fmt: str = "png"):
    img, sidecar = render(spec)
    data = encode_png(img) if fmt == "png" else encode_ppm(img)
    with open(path, "wb") as f:
        f.write(data)
    side_path = path.rsplit(".", 1)[0] + ".json"
    with open(side_path, "w") as f:
        json.dump(sidecar, f, indent=1, sort_keys=True)
    return path, side_path


# --- tiles -------------------------------------------------------------------

TILE_SIZE = 256
PLANE_ANCHOR = {
    # fixed complex-plane anchor box per plane: center and half-width at zoom 0
    "parameter": (0.8 + 0.0j, 3.2),
    "dynamical": (-0.7 + 0.0j, 3.0),
}


def tile_spec(plane: str, zoom: int, x: int, y: int, a: complex = 2.0 + 0j,
              coloring: str = "capture-generation", max_iter: int = 120) -> RenderSpec:
    """Slippy-style tile addressing over a fixed anchor box: zoom z splits
    the box into 2^z x 2^z tiles of TILE_SIZE pixels."""
    if zoom < 0 or not (0 <= x < 2 ** zoom) or not (0 <= y < 2 ** zoom):
        raise ValueError("tile out of range")
    c0, hw0 = PLANE_ANCHOR[plane]
    n = 2 ** zoom
    tile_w = 2 * hw0 / n
    lo_re = c0.real - hw0 + x * tile_w
    lo_im = c0.imag - hw0 + y * tile_w
    center = complex(lo_re + tile_w / 2, lo_im + tile_w / 2)
    return RenderSpec(
        plane=plane,
        a=a,
        center=center,
        half_width=tile_w / 2,
        resolution=TILE_SIZE,
        coloring=coloring,
        max_iter=max_iter,
    )
