"""Numerical dynamics of R_a(z) = a / (z^2 + 2z) on the Riemann sphere.

Pole handling is exact: 0 and -2 map to infinity, infinity to 0, so the
superattracting 2-cycle {0, oo} is traversed without overflow.  The basin
of infinity carries a Boettcher coordinate Phi_a with
Phi_a(R_a^2(z)) = Phi_a(z)^2 and Phi_a(z) = z/2 + 1/2 + O(1/z); rays,
equipotentials and the Green's function are computed through it.

Bubble rays are traced by pulling back marked bubble data (center, root,
attachment angle) along the exact combinatorics of the basilica model in
`basilica`; each inverse branch is selected by predecessor anchoring plus
an exact branch-cut crossing count, so the traced chain realizes the
intended symbolic ray rather than an accidental preimage.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .angles import angle, double, period_preperiod
from . import basilica as bas

INF = complex("inf")

CHART_SWITCH = 1e6  # |z| beyond which 1/z-chart reasoning applies
FAR_FIELD = 1e12


def is_inf(z) -> bool:
    try:
        m = z.real * z.real + z.imag * z.imag
    except OverflowError:
        return True
    return m != m or m > 1e300  # nan (inf*0) or effectively infinite


def rmap(a: complex, z: complex) -> complex:
    """One step of R_a with exact pole handling."""
    if is_inf(z):
        return 0j
    d = z * (z + 2)
    if d == 0:
        return INF
    return a / d


def rmap2(a: complex, z: complex) -> complex:
    return rmap(a, rmap(a, z))


def d_rmap(a: complex, z: complex) -> complex:
    """R_a'(z) = -a(2z+2) / (z^2+2z)^2."""
    if is_inf(z):
        return 0j
    d = z * (z + 2)
    return -a * (2 * z + 2) / (d * d)


def iterate(a: complex, z: complex, n: int) -> List[complex]:
    """Orbit [z, R(z), ..., R^n(z)] with exact pole handling."""
    if n < 0:
        raise ValueError("n must be >= 0")
    orbit = [z]
    for _ in range(n):
        orbit.append(rmap(a, orbit[-1]))
    return orbit


def preimages(a: complex, w: complex) -> Tuple[complex, complex]:
    """The two solutions of R_a(z) = w (z = -1 +- sqrt(1 + a/w))."""
    if w == 0:
        return (INF, INF)
    s = cmath.sqrt(1 + a / w) if not is_inf(w) else 1.0 + 0j
    return (-1 + s, -1 - s)


# --- fixed points ---------------------------------------------------------

@dataclass(frozen=True)
class FixedPointInfo:
    location: complex
    multiplier: complex
    classification: str
    is_pa: bool = False

    def to_json(self):
        return {
            "location": [self.location.real, self.location.imag],
            "multiplier": [self.multiplier.real, self.multiplier.imag],
            "classification": self.classification,
            "is_pa": self.is_pa,
        }


def _classify(mult: complex, band: float = 1e-6) -> str:
    m = abs(mult)
    if m < band:
        return "superattracting"
    if abs(m - 1) < band:
        return "parabolic"
    return "attracting" if m < 1 else "repelling"


def _cubic_roots(a: complex):
    """Roots of z^3 + 2z^2 - a with multiplicity-aware refinement."""
    import numpy as np

    roots = list(np.roots([1.0, 2.0, 0.0, -complex(a)]))
    f = lambda z: z * z * z + 2 * z * z - a
    fp = lambda z: 3 * z * z + 4 * z
    # Newton polish; near-double roots are snapped to the critical points
    # of the cubic (roots of f'), where a genuine double root must sit.
    polished = []
    for r in roots:
        z = r
        for _ in range(40):
            d = fp(z)
            if abs(d) < 1e-14:
                break
            step = f(z) / d
            z -= step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        polished.append(z)
    for crit in (0j, -4.0 / 3.0 + 0j):
        if abs(f(crit)) < 1e-12 * max(1.0, abs(a)):
            close = [i for i, z in enumerate(polished) if abs(z - crit) < 1e-4]
            if len(close) >= 2:
                for i in close:
                    polished[i] = crit
    return [complex(z) for z in polished]


def fixed_points(a: complex, band: float = 1e-6) -> List[FixedPointInfo]:
    """The three finite fixed points of R_a with multipliers; the one on the
    A_0/A_oo boundary (the landing point of the angle-0 internal ray) is
    flagged as p_a.
    """
    if a == 0:
        raise ValueError("a = 0 is a degenerate member of the family")
    pa = p_fixed(a)
    out = []
    for z in _cubic_roots(a):
        mult = d_rmap(a, z)
        out.append(
            FixedPointInfo(z, mult, _classify(mult, band), abs(z - pa) < 1e-6)
        )
    return out


_PA_CACHE: Dict[complex, complex] = {}


def p_fixed(a: complex) -> complex:
    """The fixed point where A_0 and A_oo touch: the landing point of the
    internal ray of angle 0, polished against the fixed-point cubic.
    """
    key = complex(a)
    if key in _PA_CACHE:
        return _PA_CACHE[key]
    if len(_PA_CACHE) > 65536:
        _PA_CACHE.clear()
    z = FAR_FIELD + 0j
    for _ in range(90):
        z = _pull_back_ray_point(a, z, z)
    roots = _cubic_roots(a)
    p = min(roots, key=lambda r: abs(r - z))
    if abs(p - z) > 1e-5 * max(1.0, abs(p)):
        # keep the traced value if the cubic match is poor (should not happen)
        p = z
    _PA_CACHE[key] = p
    return p


def _pull_back_ray_point(a, w, anchor):
    """One R^2-preimage step within A_oo: halves the potential, keeps the
    internal angle; branch chosen by continuity with `anchor`."""
    s = cmath.sqrt(w * w + a * w)
    u1, u2 = w + s, w - s
    u = u1 if abs(u1) >= abs(u2) else u2  # intermediate point a/u lies in A_0
    t = cmath.sqrt(1 + u)
    z1, z2 = -1 + t, -1 - t
    return z1 if abs(z1 - anchor) <= abs(z2 - anchor) else z2


# --- Green's function and Boettcher coordinate ----------------------------

def green(a: complex, z: complex, budget: int = 400, escape: float = 1e9):
    """Escape-rate potential g(z) = lim 2^-n (log|R^{2n} z| - log 2).

    Equals the Green's function of A_oo there, positive on every bubble of
    even generation, and 0 (flagged low-confidence near the boundary) for
    orbits that do not escape within the budget.  Returns (value, confident).
    """
    if is_inf(z):
        return math.inf, True
    w = complex(z)
    for n in range(budget):
        if is_inf(w):
            return math.inf, True  # center of an even-generation bubble
        if w == 0:
            return 0.0, True  # superattracting center of A_0
        if abs(w) > escape:
            # log|Phi| with the two-term series: Phi ~ (w+1)/2
            val = math.log(abs((w + 1) / 2)) * 2.0 ** (-n)
            return val, True
        w = rmap2(a, w)
    return 0.0, False


def boettcher(a: complex, z: complex, terms: int = 64, guard: float = 1e-4) -> complex:
    """Boettcher coordinate on the far field of A_oo.

    Product formula Phi(z) = A(z) prod_k h_k^{2^-(k+1)} with A(z) = (z+1)/2
    and h_k = A(z_{k+1}) / A(z_k)^2 along the R^2-orbit; every factor tends
    to 1, and a factor approaching the negative real axis (branch ambiguity
    near the critical orbit) raises BranchAmbiguityError.
    """
    if is_inf(z):
        return INF
    g, ok = green(a, z)
    if not ok or g <= 0:
        raise ValueError("boettcher: point does not escape (not in the far field)")
    val = (z + 1) / 2
    w = complex(z)
    for k in range(terms):
        w2 = rmap2(a, w)
        if is_inf(w2):
            break
        h = ((w2 + 1) / 2) / (((w + 1) / 2) ** 2)
        if h.real <= 0 and abs(h.imag) < guard * abs(h):
            raise BranchAmbiguityError(
                f"product factor {h:.3g} on the branch cut at step {k}"
            )
        val *= h ** (2.0 ** (-(k + 1)))
        w = w2
        if abs(w) > 1e20:
            break
    return val


class BranchAmbiguityError(RuntimeError):
    pass


def log_phi(a: complex, z: complex, terms: int = 64):
    """(log Phi_a(z), d/dz log Phi_a(z)) via the product formula, with the
    derivative accumulated through the orbit."""
    w = complex(z)
    dw = 1.0 + 0j
    val = cmath.log((w + 1) / 2)
    dval = 1.0 / (w + 1)
    for k in range(terms):
        if abs(w) > 1e20:
            break  # remaining factors differ from 1 by O(1/w): negligible
        r1 = rmap(a, w)
        if is_inf(r1) or r1 == 0:
            break
        w2 = rmap(a, r1)
        if is_inf(w2) or w2 == 0:
            break
        dw2 = d_rmap(a, r1) * d_rmap(a, w) * dw
        h = ((w2 + 1) / 2) / (((w + 1) / 2) ** 2)
        val += cmath.log(h) * 2.0 ** (-(k + 1))
        dval += (dw2 / (w2 + 1) - 2 * dw / (w + 1)) * 2.0 ** (-(k + 1))
        w, dw = w2, dw2
    return val, dval


def phi_inverse_far(a: complex, w: complex) -> complex:
    """Invert Phi on the far field by Newton from z = 2w - 1."""
    z = 2 * w - 1
    target = cmath.log(w)
    for _ in range(40):
        v, dv = log_phi(a, z)
        k = round((target.imag - v.imag) / (2 * math.pi))
        err = complex(v.real, v.imag + 2 * math.pi * k) - target
        if abs(err) < 1e-14:
            break
        z = z - err / dv
    return z


# --- internal rays of A_oo -------------------------------------------------

@dataclass
class RayTrace:
    theta: Fraction
    points: List[complex]
    potentials: List[float]
    landing: Optional[complex] = None
    residual: float = math.inf
    landed: bool = False

    def to_json(self):
        return {
            "theta": f"{self.theta.numerator}/{self.theta.denominator}",
            "points": [[p.real, p.imag] for p in self.points],
            "potentials": self.potentials,
            "landing": None
            if self.landing is None
            else [self.landing.real, self.landing.imag],
            "residual": self.residual,
            "landed": self.landed,
        }


def internal_ray(
    a: complex,
    theta,
    potential_low: float = 1e-9,
    potential_high: float = math.log(FAR_FIELD),
    substeps: int = 6,
    polish: bool = True,
) -> RayTrace:
    """Trace the internal ray Phi^{-1}(r e^{2 pi i theta}) of A_oo from the
    far field toward the boundary, by synchronized R^2-pullback along the
    doubling orbit of theta.  Landing is estimated by extrapolation and,
    for rational theta, polished against the periodic-point equation.
    """
    theta = angle(Fraction(theta))
    orbit = [theta]
    seen = {theta: 0}
    t = double(theta)
    while t not in seen:
        seen[t] = len(orbit)
        orbit.append(t)
        t = double(t)
    lam = 2.0 ** (1.0 / substeps)
    # history[th][j] = ray point of angle th at log-potential H0 / lam^j
    H0 = potential_high
    hist: Dict[Fraction, List[complex]] = {}
    for th in orbit:
        w = cmath.rect(math.exp(H0), 2 * math.pi * float(th))
        hist[th] = [phi_inverse_far(a, w)]
    nlev = int(math.ceil(math.log(H0 / potential_low) / math.log(lam))) + 1
    nxt = {th: double(th) for th in orbit}
    for j in range(1, nlev + 1):
        for th in orbit:
            th2 = nxt[th]
            src_idx = j - substeps  # point of angle 2*theta at doubled potential
            if src_idx < 0:
                w = cmath.rect(
                    math.exp(2 * H0 / lam ** j), 2 * math.pi * float(th2)
                )
                src = phi_inverse_far(a, w)
            else:
                src = hist[th2][src_idx]
            anchor = hist[th][j - 1]
            hist[th].append(_pull_back_ray_point(a, src, anchor))
    pts = hist[theta]
    pots = [H0 / lam ** j for j in range(len(pts))]
    trace = RayTrace(theta, pts, pots)
    tail = pts[-1]
    # landing estimate: Aitken extrapolation on the potential-halving tail
    sub_tail = pts[::-substeps][::-1][-3:]
    if len(sub_tail) == 3:
        c0, c1, c2 = sub_tail
        d2 = c2 - 2 * c1 + c0
        est = c2 - (c2 - c1) ** 2 / d2 if d2 != 0 else c2
    else:
        est = tail
    trace.landing = est
    trace.residual = abs(pts[-1] - pts[-1 - substeps]) if len(pts) > substeps else math.inf
    if polish:
        k, p = period_preperiod(theta)
        land = _polish_boundary_point(a, est, k, p)
        if land is not None and abs(land - est) < 10 * max(trace.residual, 1e-7):
            trace.landing = land
            trace.residual = abs(est - land)
            trace.landed = True
    return trace


def _polish_boundary_point(a, z0, k, p, tol=1e-13):
    """Newton-polish the landing point: R^{2p}-periodic after 2k steps.

    Works on the terminal periodic point and pulls back along the traced
    orbit is unnecessary here since internal-ray landing points of angle
    theta are fixed by R^{2 (k+p)} ... R^{2k}; we polish the point itself
    as a zero of R^{2(k+p)}(z) - R^{2k}(z).
    """
    n_pre, n_per = 2 * k, 2 * p

    def fun(z):
        orb = iterate(a, z, n_pre + n_per)
        return orb[n_pre + n_per] - orb[n_pre]

    z = z0
    h = 1e-7
    for _ in range(60):
        f0 = fun(z)
        if is_inf(f0):
            return None
        d = (fun(z + h) - fun(z - h)) / (2 * h)
        if d == 0 or is_inf(d):
            return None
        step = f0 / d
        z -= step
        if abs(step) < tol * max(1.0, abs(z)):
            return z
    return None


def equipotential(a: complex, level: float, samples: int = 256) -> List[complex]:
    """Sampled equipotential {g = level} of A_oo (level in log scale).

    Points are found by Newton on log Phi with continuation around the
    circle; angles where Newton strays fall back to a ray trace.
    """
    out: List[complex] = []
    z = internal_ray(a, Fraction(0), potential_low=level, polish=False).points[-1]
    for k in range(samples):
        th = Fraction(k, samples)
        target = complex(level, 2 * math.pi * float(th))
        zk = z if not out else out[-1]
        ok = False
        for _ in range(50):
            v, dv = log_phi(a, zk)
            shift = round((target.imag - v.imag) / (2 * math.pi))
            err = complex(v.real, v.imag + 2 * math.pi * shift) - target
            if abs(err) < 1e-12:
                ok = True
                break
            if dv == 0:
                break
            zk = zk - err / dv
        if not ok:
            zk = internal_ray(a, th, potential_low=level, polish=False).points[-1]
        out.append(zk)
    return out


# --- bubble forest: marked bubbles of R_a ---------------------------------

@dataclass
class BubbleData:
    word: tuple
    generation: int
    center: complex
    root: complex
    sign: int
    att: Fraction
    degenerate: bool = False
    sign_r: int = 0

    def to_json(self):
        return {
            "address": bas.word_str(self.word),
            "generation": self.generation,
            "center": [self.center.real, self.center.imag],
            "root": [self.root.real, self.root.imag],
            "attachment_angle": f"{self.att.numerator}/{self.att.denominator}",
            "degenerate": self.degenerate,
        }


class DegenerateStructureError(RuntimeError):
    """The bubble structure pinches at a precritical point (the parameter
    lies on a capture-component boundary); supply sign hints traced at a
    nearby regular parameter."""


def _near_cut(z: Optional[complex], a: complex, tol: float = 1e-6) -> bool:
    """Is z within tol of the branch-cut segment [0, -a]?"""
    if z is None:
        return False
    b = -a
    t = (z.real * b.real + z.imag * b.imag) / (abs(b) ** 2)
    t = min(1.0, max(0.0, t))
    return abs(z - t * b) < tol * max(1.0, abs(a))


def _seg_crossings(z1: Optional[complex], z2: complex, a: complex) -> int:
    """Parity of crossings of the segment [z1, z2] (or the radial path from
    infinity to z2 when z1 is None) with the principal-branch cut
    {-a u : 0 < u <= 1} of z -> sqrt(1 + a/z)."""
    b = -a
    if z1 is None:
        return 0  # the radial path from infinity misses the cut
    d = z2 - z1
    m00, m01 = d.real, -b.real
    m10, m11 = d.imag, -b.imag
    det = m00 * m11 - m01 * m10
    if abs(det) < 1e-30:
        return 0
    rx, ry = -z1.real, -z1.imag
    t = (rx * m11 - m01 * ry) / det
    u = (m00 * ry - rx * m10) / det
    return 1 if (0 < t < 1 and 0 < u <= 1) else 0


class BubbleForest:
    """Marked realizations of basilica bubbles for one parameter a.

    Data is computed generation by generation: roots are pulled back with
    the inverse branch anchored at the predecessor (exact cut-crossing
    bookkeeping), bubbles attached to A_oo are anchored on traced internal
    rays at their exact attachment angle, and centers follow by continuing
    the same branch from root to center.
    """

    def __init__(self, a: complex, hint_source: Optional["BubbleForest"] = None,
                 collapse_tol: float = 1e-9):
        if a == 0:
            raise ValueError("a = 0 is degenerate")
        self.a = complex(a)
        self.pa = p_fixed(self.a)
        self.collapse_tol = collapse_tol
        # a forest at a nearby regular parameter: on degenerate (pinched)
        # structures every unstable branch bit is transported from it
        self.hint_source = hint_source
        self.data: Dict[tuple, BubbleData] = {}
        self.trace_cache: Dict[tuple, "BubbleRayTrace"] = {}
        p = self.pa
        self.data[(bas.MINUS,)] = BubbleData(
            (bas.MINUS,), 1, 0j, p, +1, Fraction(0), sign_r=+1
        )
        self.data[(bas.PLUS,)] = BubbleData(
            (bas.PLUS,), 1, -2 + 0j, -2 - p, -1, Fraction(1, 2), sign_r=-1
        )
        self._ring: Dict[Fraction, complex] = {}

    # -- anchors ----------------------------------------------------------

    def ring_point(self, att: Fraction) -> complex:
        """Low-potential point on the internal ray of A_oo at angle att.

        On a degenerate parameter the boundary pinches and the ray landing
        is side-unstable, so anchors are delegated to the regular companion
        forest when one is installed."""
        if self.hint_source is not None:
            return self.hint_source.ring_point(att)
        if att not in self._ring:
            tr = internal_ray(self.a, att, potential_low=1e-7, substeps=2,
                              polish=True)
            self._ring[att] = tr.landing if tr.landing is not None else tr.points[-1]
        return self._ring[att]

    # -- core recursion -----------------------------------------------------

    def realize(self, word: tuple) -> BubbleData:
        if word in self.data:
            return self.data[word]
        if len(word) < 2:
            raise ValueError(f"unknown generation-1 word {word}")
        a = self.a
        tail = word[1:]
        dt = self.realize(tail)
        pred = bas.predecessor(word)
        arg = 1 + (a / dt.root if dt.root != 0 else INF)
        s_r = cmath.sqrt(arg)
        degenerate = abs(arg) < self.collapse_tol
        # branch-cut parity transport is unreliable whenever a transport
        # segment passes next to the cut [0, -a] (this happens exactly at
        # pinched structures on capture boundaries)
        shaky = degenerate or dt.degenerate
        if pred == ():
            att2 = dt.att / 2
            u, ln = bas.arc_of(word)
            above = 0 <= u and u + ln <= Fraction(1, 2)
            if above != (0 < att2 < Fraction(1, 2)):
                att2 = angle(att2 + Fraction(1, 2))
            anchor = self.ring_point(att2)
            r1, r2 = -1 + s_r, -1 - s_r
            if abs(r1 - anchor) <= abs(r2 - anchor):
                root, sgn_r = r1, +1
            else:
                root, sgn_r = r2, -1
            att = att2
        else:
            dp = self.realize(pred)
            fpred = pred[1:] if len(pred) >= 2 else None
            c_fpred = self.realize(fpred).center if fpred else None  # None = A_oo
            if _near_cut(c_fpred, a) or _near_cut(dt.root, a):
                shaky = True
            par = _seg_crossings(c_fpred, dt.root, a)
            sgn_r = dp.sign * (-1) ** par
            root = -1 + sgn_r * s_r
            att = dt.att
        if _near_cut(dt.root, a) or _near_cut(dt.center, a):
            shaky = True
        par2 = _seg_crossings(dt.root, dt.center, a)
        sgn_c = sgn_r * (-1) ** par2
        s_c = cmath.sqrt(1 + a / dt.center)
        center = -1 + sgn_c * s_c
        if shaky:
            # branch bits are meaningless next to the principal cut; anchor
            # root and center by value against the regular companion forest
            hd = None
            if self.hint_source is not None:
                try:
                    hd = self.hint_source.realize(word)
                except Exception:
                    hd = None
            if hd is not None:
                r1, r2 = -1 + s_r, -1 - s_r
                root, sgn_r = (
                    (r1, +1) if abs(r1 - hd.root) <= abs(r2 - hd.root) else (r2, -1)
                )
                c1, c2 = -1 + s_c, -1 - s_c
                center, sgn_c = (
                    (c1, +1) if abs(c1 - hd.center) <= abs(c2 - hd.center) else (c2, -1)
                )
            elif degenerate:
                raise DegenerateStructureError(
                    f"root pullback collapses at the critical point for "
                    f"{bas.word_str(word)} (parameter on a capture boundary); "
                    f"supply a hint forest traced at a nearby regular parameter"
                )
        bd = BubbleData(word, len(word), center, root, sgn_c, att,
                        degenerate or shaky, sgn_r)
        self.data[word] = bd
        return bd

    def chain(self, arc_angle, max_generation: int) -> List[BubbleData]:
        """Realized bubble chain whose arcs contain the external angle."""
        words = bas.bubble_ray_words(arc_angle, max_generation)
        return [self.realize(w) for w in words]

    def all_to_generation(self, max_generation: int) -> List[BubbleData]:
        out = []
        for g in range(1, max_generation + 1):
            for w in bas.bubbles_of_generation(g):
                out.append(self.realize(w))
        return out




# --- bubble rays -----------------------------------------------------------

@dataclass
class BubbleRayTrace:
    theta: Fraction              # bubble-ray angle (wake/portrait convention)
    bubbles: List[BubbleData]
    landing: Optional[complex] = None
    raw_landing: Optional[complex] = None
    residual: float = math.inf
    landed: bool = False
    warnings: List[str] = field(default_factory=list)

    def centers(self):
        return [b.center for b in self.bubbles]

    def to_json(self):
        return {
            "theta": f"{self.theta.numerator}/{self.theta.denominator}",
            "bubbles": [b.to_json() for b in self.bubbles],
            "landing": None
            if self.landing is None
            else [self.landing.real, self.landing.imag],
            "residual": self.residual,
            "landed": self.landed,
            "warnings": self.warnings,
        }


def trace_bubble_ray(
    a: complex,
    theta,
    depth: int = 60,
    forest: Optional[BubbleForest] = None,
    polish: bool = True,
) -> BubbleRayTrace:
    """Trace the bubble ray of angle theta (the angle convention of wakes
    and orbit portraits: the corresponding basilica landing angle is
    -theta).  Returns the realized chain with a landing estimate.
    """
    theta = angle(Fraction(theta))
    forest = forest or BubbleForest(a)
    key = (theta, depth, polish)
    if key in forest.trace_cache:
        return forest.trace_cache[key]
    arc_angle = angle(-theta)
    chain = forest.chain(arc_angle, depth)
    tr = BubbleRayTrace(theta, chain)
    if bas.biaccessible(arc_angle):
        # the ray terminates at a bubble root (a preimage of p_a)
        pair = bas.ray_pair(arc_angle)
        word = _word_of_leaf(pair)
        if word is not None:
            d = forest.realize(word)
            tr.landing = tr.raw_landing = d.root
            tr.residual = 0.0
            tr.landed = True
            tr.warnings.append("ray lands on a bubble root (biaccessible angle)")
            forest.trace_cache[key] = tr
            return tr
    if len(chain) < max(6, depth // 8):
        # the symbolic chain is finite: the ray lands on the boundary of its
        # last bubble (or of A_oo); that point is not realized here
        tr.warnings.append(
            "finite bubble chain: the landing point lies on a bubble "
            "boundary and is not realized by center extrapolation"
        )
        tr.landing = None
        forest.trace_cache[key] = tr
        return tr
    cs = [b.center for b in chain]
    est = cs[-1]
    if len(cs) >= 3:
        d2 = cs[-1] - 2 * cs[-2] + cs[-3]
        if d2 != 0:
            est = cs[-1] - (cs[-1] - cs[-2]) ** 2 / d2
    tr.raw_landing = est
    tr.landing = est
    tr.residual = abs(cs[-1] - cs[-2]) if len(cs) >= 2 else math.inf
    if any(b.degenerate for b in chain):
        tr.warnings.append("chain passes through a pinched (precritical) root")
    if polish:
        k, p = period_preperiod(theta)
        z = _polish_ray_landing(a, est, k, p)
        if z is not None and abs(z - est) < max(20 * tr.residual, 1e-5):
            tr.landing = z
            tr.residual = abs(z - est)
            tr.landed = True
    forest.trace_cache[key] = tr
    return tr


def _word_of_leaf(pair):
    """Bubble word whose root leaf is the given angle pair, if any."""
    lo, hi = sorted(angle(x) for x in pair)
    length = angle(hi - lo)
    u = lo
    if length > Fraction(1, 2):
        length = 1 - length
        u = hi
    # arc length of a generation-g bubble is 1/(3 * 2^(g-1))
    g = 1
    while Fraction(1, 3 * 2 ** (g - 1)) > length:
        g += 1
    if Fraction(1, 3 * 2 ** (g - 1)) != length:
        return None
    hit = bas.bubble_at(angle(u + length / 2), g)
    if hit and set(bas.root_leaf(hit[0])) == {lo, hi}:
        return hit[0]
    return None


def _polish_ray_landing(a, z0, k, p, tol=1e-12):
    def fun_drv(z):
        """R^{k+p}(z) - R^k(z) and its z-derivative (forward accumulation)."""
        w, dw = z, 1.0 + 0j
        vk, dk = z, 1.0 + 0j
        for i in range(k + p):
            if i == k:
                vk, dk = w, dw
            if is_inf(w) or w * (w + 2) == 0:
                return None, None
            dw = d_rmap(a, w) * dw
            w = rmap(a, w)
            if is_inf(w) or is_inf(dw):
                return None, None
        return w - vk, dw - dk

    z = z0
    for _ in range(40):
        f0, d = fun_drv(z)
        if f0 is None or d == 0 or d is None:
            return None
        step = f0 / d
        z -= step
        if abs(step) < tol * max(1.0, abs(z)):
            return z
    return None


def bubble_centers(a: complex, max_generation: int,
                   forest: Optional[BubbleForest] = None) -> List[BubbleData]:
    """All bubbles to a generation bound, tagged with basilica addresses.

    Emits a warning flag (returned data unchanged) when two centers nearly
    collide, which happens when a sits close to a capture-component center.
    """
    forest = forest or BubbleForest(a)
    return forest.all_to_generation(max_generation)


def center_collisions(bubbles: List[BubbleData], tol: float = 1e-8):
    """Pairs of bubbles whose centers (nearly) coincide."""
    out = []
    for i in range(len(bubbles)):
        for j in range(i + 1, len(bubbles)):
            if abs(bubbles[i].center - bubbles[j].center) < tol:
                out.append((bubbles[i].word, bubbles[j].word))
    return out


def spine_trace(a: complex, depth: int = 30,
                forest: Optional[BubbleForest] = None) -> Dict[str, List[complex]]:
    """The spine l_a as polylines: the two bubble-chain axes hanging off
    A_oo at internal angles 0 and 1/2, plus the far parts of those two
    internal rays of A_oo (the spine passes through infinity).
    """
    forest = forest or BubbleForest(a)
    # chain at arc angle 1/2 hangs off p_a through A_0 (basilica left half);
    # chain at arc angle 0 hangs off -2 - p_a through A_{-2}.
    left = forest.chain(Fraction(1, 2), depth)
    right = forest.chain(Fraction(0), depth)
    left_poly: List[complex] = [forest.pa]
    for b in left:
        left_poly.extend([b.root, b.center])
    right_poly: List[complex] = [-2 - forest.pa]
    for b in right:
        right_poly.extend([b.root, b.center])
    ray0 = internal_ray(a, Fraction(0), potential_low=1e-6, polish=False).points
    rayh = internal_ray(a, Fraction(1, 2), potential_low=1e-6, polish=False).points
    return {"left": left_poly, "right": right_poly, "ray0": ray0, "ray_half": rayh}
