"""Structure of the a-plane: the critical-orbit rational functions xi_n,
capture components and their centers, internal parameter rays, wakes, the
correspondence with the right half of the basilica, and parameter puzzle
pieces.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

from .angles import angle, double, fmt_angle, period_preperiod, validate_portrait
from .ratfunc import Poly, RationalFunction1, squarefree
from . import basilica as bas
from . import dynamics as dyn


# --- exact critical-orbit functions ----------------------------------------

@lru_cache(maxsize=None)
def _xi_raw(n: int) -> Tuple[Poly, Poly]:
    """(num, den) of xi_n = R_a^n(-1), cancelled.

    The recurrence num' = a den^2, den' = num (num + 2 den) keeps num and den
    coprime except for powers of a, which are stripped directly; no general
    gcd is ever needed (the invariant is easy to check by hand and is
    asserted in tests against a full symbolic cancellation).
    """
    if n < 1:
        raise ValueError("xi_n defined for n >= 1")
    if n == 1:
        return Poly([0, -1]), Poly([1])  # -a
    num, den = _xi_raw(n - 1)
    a = Poly.x()
    num2 = a * den * den
    den2 = num * (num + 2 * den)
    while num2.c and den2.c and num2.c[0] == 0 and den2.c[0] == 0:
        num2 = Poly(num2.c[1:])
        den2 = Poly(den2.c[1:])
    lead = den2.c[-1]
    num2 = Poly([x / lead for x in num2.c])
    den2 = Poly([x / lead for x in den2.c])
    return num2, den2


def xi(n: int) -> RationalFunction1:
    """Exact rational function a -> R_a^n(-1); xi_1 = -a."""
    if n > 24:
        raise ValueError("coefficient blow-up guard: xi_n supported for n <= 24")
    num, den = _xi_raw(n)
    f = RationalFunction1.__new__(RationalFunction1)
    f.num, f.den = num, den
    return f


@lru_cache(maxsize=None)
def fresh_center_poly(n: int) -> Poly:
    """Polynomial whose roots are the generation-n capture centers.

    A parameter is a generation-n center iff the critical orbit first meets
    {0, -2} at step n-1; since the only preimage of 0 is infinity, fresh
    meetings happen only at -2, i.e. at roots of num_{n-1} + 2 den_{n-1}.
    """
    if n < 2:
        return Poly([1])  # no finite centers of generation < 2
    num, den = _xi_raw(n - 1)
    return num + 2 * den


def capture_centers(n: int, polish_tol: float = 1e-13) -> List[complex]:
    """Finite capture centers of generation n (empty for n < 2): the fresh
    poles of xi_n, isolated from the exact polynomial and polished."""
    import numpy as np

    p = fresh_center_poly(n)
    if p.degree < 1:
        return []
    # exact integer coefficients, isolated in high precision (double-
    # precision companion matrices break down around degree 40)
    import mpmath as mp

    den = 1
    for c in p.c:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in reversed(p.c)]
    with mp.workdps(30 + 3 * p.degree):
        roots = mp.polyroots(ints, maxsteps=200, extraprec=120)
    out = []
    for r in roots:
        z0 = complex(float(mp.re(r)), float(mp.im(r)))
        # polish against the iterated orbit: the length-n orbit amplifies
        # coefficient-level error, Newton on R_a^{n-1}(-1) + 2 removes it
        z = _polish_center_orbit(z0, n)
        if z is None or abs(z - z0) > 1e-3:
            z = z0
        out.append(complex(z))
    return sorted(out, key=lambda z: (round(z.real, 9), round(z.imag, 9)))


def _polish_center_orbit(a0: complex, n: int, tol: float = 1e-14):
    def fun(a):
        orb = dyn.iterate(a, -1.0 + 0j, n - 1)
        v = orb[n - 1] + 2
        return None if dyn.is_inf(v) else v

    a = a0
    h = 1e-8
    for _ in range(40):
        f0 = fun(a)
        if f0 is None:
            return None
        fp_ = fun(a + h)
        fm = fun(a - h)
        if fp_ is None or fm is None:
            return None
        d = (fp_ - fm) / (2 * h)
        if d == 0:
            return None
        step = f0 / d
        a -= step
        if abs(step) < tol * max(1.0, abs(a)):
            return a
    return a


def centers_are_simple(n: int) -> bool:
    """Exact squarefree check on the fresh-center polynomial."""
    return squarefree(fresh_center_poly(n))


# --- capture membership ------------------------------------------------------

@dataclass(frozen=True)
class CaptureResult:
    generation: Optional[int]
    status: str  # 'captured' | 'p-infinity' | 'not-captured-within-budget'

    def to_json(self):
        return {"generation": self.generation, "status": self.status}


def capture_generation(
    a: complex,
    budget: int = 200,
    green_threshold: float = 1e-4,
    green_budget: int = 10_000,
    pole_tol: float = 1e-12,
) -> CaptureResult:
    """Smallest n with positive escape rate for R_a^n(-1), following the
    Green's-function threshold policy; n = 0 is reported when the critical
    value itself escapes (the quasicircle component P_infinity).

    Exact pole hits (the orbit lands on 0 or -2) short-circuit the policy
    and give the capture generation exactly, which covers every capture
    center.  'not-captured-within-budget' is a budget statement, not a
    claim that a lies in the mating locus.
    """
    if a == 0:
        raise ValueError("a = 0 is degenerate")
    z = -1.0 + 0j
    orbit = [z]
    hit = None
    for n in range(1, budget + 1):
        if abs(z) < pole_tol or abs(z + 2) < pole_tol:
            # genuine pole hit (capture center / near-center); a slow
            # superattracting collapse through A_0 is not one: there the
            # same-parity predecessors are already microscopic
            prev = orbit[n - 3] if n >= 3 else orbit[0]
            if not dyn.is_inf(prev) and abs(prev) > 1e-6 and abs(prev + 2) > 1e-6:
                hit = n
            break
        z = dyn.rmap(a, z)
        orbit.append(z)
        if dyn.is_inf(z):
            hit = n
            break
    if hit is not None:
        return CaptureResult(hit if hit >= 2 else 0, "captured")
    # critical orbit landing on (or converging to) a finite cycle away from
    # the superattracting pair {0, oo}: the parameter is in the mating locus
    # (Misiurewicz analogs and hyperbolic matings); float noise would
    # otherwise fake an escape after ~50 steps on a repelling cycle
    for p in range(1, 9):
        for n in range(1, min(len(orbit) - 2 * p, 60)):
            zs = (orbit[n], orbit[n + p], orbit[n + 2 * p])
            if any(dyn.is_inf(z) for z in zs):
                continue
            if any(abs(z) < 1e-6 or abs(z) > 1e6 or abs(z + 2) < 1e-6 for z in zs):
                continue
            if abs(zs[1] - zs[0]) < 1e-10 and abs(zs[2] - zs[0]) < 1e-9:
                return CaptureResult(None, "not-captured-within-budget")
    g1, ok1 = dyn.green(a, orbit[1], budget=green_budget // 2)
    if ok1 and g1 > green_threshold:
        return CaptureResult(0, "p-infinity")
    for n in range(2, len(orbit)):
        g, ok = dyn.green(a, orbit[n], budget=64)
        if ok and g > green_threshold:
            return CaptureResult(n, "captured")
    return CaptureResult(None, "not-captured-within-budget")


# --- internal parameter rays -------------------------------------------------

@dataclass
class ParamRayTrace:
    generation: int
    theta: Fraction
    points: List[complex]
    potentials: List[float]
    landing: Optional[complex] = None
    residual: float = math.inf
    landed: bool = False

    def to_json(self):
        return {
            "generation": self.generation,
            "theta": fmt_angle(self.theta),
            "points": [[p.real, p.imag] for p in self.points],
            "potentials": self.potentials,
            "landing": None if self.landing is None
            else [self.landing.real, self.landing.imag],
            "residual": self.residual,
            "landed": self.landed,
        }


def _log_gn(a: complex, n: int, h: float = 1e-7):
    """log Phi_a(xi_n(a)) (the parameter Boettcher map of a capture
    component of generation n) and its a-derivative (numeric, step h)."""
    num, den = _xi_raw(n)
    zn = complex(num(complex(a))) / complex(den(complex(a)))
    v, _ = dyn.log_phi(a, zn)
    vp = _log_gn_value(a + h, n)
    vm = _log_gn_value(a - h, n)
    # align branches before differencing
    vp = complex(vp.real, vp.imag + 2 * math.pi * round((v.imag - vp.imag) / (2 * math.pi)))
    vm = complex(vm.real, vm.imag + 2 * math.pi * round((v.imag - vm.imag) / (2 * math.pi)))
    return v, (vp - vm) / (2 * h)


def _log_gn_value(a: complex, n: int):
    num, den = _xi_raw(n)
    zn = complex(num(complex(a))) / complex(den(complex(a)))
    v, _ = dyn.log_phi(a, zn)
    return v


def param_internal_ray(
    center: complex,
    generation: int,
    theta,
    potential_low: float = 1e-6,
    potential_high: float = 16.0,
    substeps: int = 8,
    polish: bool = True,
) -> ParamRayTrace:
    """Internal parameter ray of the capture component with the given
    center: the curve g_n(a) = r e^{2 pi i theta}, traced by Newton
    continuation in a from near the center outward to low potential."""
    n = generation
    theta = angle(Fraction(theta))
    num, den = _xi_raw(n)
    h = 1e-6
    res = h * complex(num(complex(center + h))) / complex(den(complex(center + h)))
    pots = []
    pts = []
    a_cur = None
    lam = 2.0 ** (1.0 / substeps)
    L = potential_high
    while L > potential_low:
        target = complex(L, 2 * math.pi * float(theta))
        if a_cur is None:
            # seed from the simple-pole model xi_n ~ res/(a - center)
            w_target = cmath.exp(complex(L, 2 * math.pi * float(theta)))
            a_cur = center + res / (2 * w_target)
        ok = False
        for _ in range(60):
            h = max(1e-13, 0.01 * abs(a_cur - center))
            v, dv = _log_gn(a_cur, n, h)
            shift = round((target.imag - v.imag) / (2 * math.pi))
            err = complex(v.real, v.imag + 2 * math.pi * shift) - target
            if abs(err) < 1e-12:
                ok = True
                break
            if dv == 0:
                break
            step = err / dv
            if abs(step) < 1e-15 * max(1.0, abs(a_cur)):
                ok = True  # at the resolution limit of the parameter
                break
            # step damping to stay inside the component
            cap = 0.25 * abs(a_cur - center)
            if cap > 0 and abs(step) > cap:
                step *= cap / abs(step)
            a_cur = a_cur - step
        pts.append(a_cur)
        pots.append(L)
        if not ok and len(pts) > 4:
            break
        L /= lam
    tr = ParamRayTrace(n, theta, pts, pots)
    if len(pts) >= 3:
        c0, c1, c2 = pts[-3:]
        d2 = c2 - 2 * c1 + c0
        tr.landing = c2 - (c2 - c1) ** 2 / d2 if d2 != 0 else c2
    elif pts:
        tr.landing = pts[-1]
    tr.residual = abs(pts[-1] - pts[-2]) if len(pts) >= 2 else math.inf
    if polish and theta == 0 and tr.landing is not None:
        z = _polish_root_parameter(tr.landing, n)
        if z is not None and abs(z - tr.landing) < 50 * max(tr.residual, 1e-8):
            tr.residual = abs(z - tr.landing)
            tr.landing = z
            tr.landed = True
    return tr


def _polish_root_parameter(a0: complex, n: int, tol: float = 1e-12):
    """Solve xi_n(a) = p(a) by Newton (the angle-0 landing parameter)."""
    num, den = _xi_raw(n)

    def fun(a):
        zn = complex(num(complex(a))) / complex(den(complex(a)))
        return zn - dyn.p_fixed(a)

    a = a0
    h = 1e-7
    for _ in range(50):
        f0 = fun(a)
        d = (fun(a + h) - fun(a - h)) / (2 * h)
        if d == 0:
            return None
        step = f0 / d
        a -= step
        if abs(step) < tol * max(1.0, abs(a)):
            return a
    return None


# --- psi: parabubbles -> right-basilica bubbles -----------------------------

@dataclass(frozen=True)
class Parabubble:
    generation: int
    center: complex
    address: tuple  # basilica word of the critical-value bubble (gen n-1)
    root: Optional[complex] = None

    def to_json(self):
        return {
            "generation": self.generation,
            "center": [self.center.real, self.center.imag],
            "address": bas.word_str(self.address),
            "root": None if self.root is None else [self.root.real, self.root.imag],
        }


def psi_address(center: complex, generation: int,
                match_tol: float = 1e-6) -> tuple:
    """Basilica address of psi(P) for the parabubble with the given center:
    the right-half bubble of generation n-1 whose center (for R_{a0})
    coincides with the critical value -a0."""
    n = generation
    if n < 2:
        raise ValueError("finite parabubbles have generation >= 2")
    forest = dyn.BubbleForest(complex(center))
    target = -complex(center)
    best, dist = None, math.inf
    for w in bas.bubbles_of_generation(n - 1):
        d = abs(forest.realize(w).center - target)
        if d < dist:
            best, dist = w, d
    if dist > match_tol:
        raise RuntimeError(
            f"no generation-{n - 1} bubble center matches the critical value "
            f"(best distance {dist:.2e})"
        )
    if not bas.in_right_half(best):
        raise RuntimeError("matched bubble lies in the left half (unexpected)")
    return best


def parabubble_catalog(max_generation: int) -> List[Parabubble]:
    """Capture components by generation with centers and basilica addresses."""
    out = []
    for n in range(2, max_generation + 1):
        for c in capture_centers(n):
            out.append(Parabubble(n, c, psi_address(c, n)))
    return out


# --- wakes -------------------------------------------------------------------

@dataclass
class Wake:
    t_minus: Fraction
    t_plus: Fraction
    portrait_angles: tuple
    parabolic_root: Optional[complex] = None

    def to_json(self):
        return {
            "t_minus": fmt_angle(self.t_minus),
            "t_plus": fmt_angle(self.t_plus),
            "portrait": [fmt_angle(t) for t in self.portrait_angles],
            "parabolic_root": None if self.parabolic_root is None
            else [self.parabolic_root.real, self.parabolic_root.imag],
        }


def wake(t_minus, t_plus) -> Wake:
    """Wake descriptor for a fixed-point orbit portrait whose characteristic
    arc is (t_minus, t_plus): the portrait is the doubling cycle of the
    endpoints.  The parabolic root (the landing parameter of the bounding
    parameter rays) is computed from the rotation number.
    """
    t_minus, t_plus = angle(Fraction(t_minus)), angle(Fraction(t_plus))
    k, p = period_preperiod(t_minus)
    if k != 0:
        raise ValueError("wake angles must be periodic under doubling")
    cyc = [t_minus]
    t = double(t_minus)
    while t != t_minus:
        cyc.append(t)
        t = double(t)
    if t_plus not in cyc:
        raise ValueError("t_plus must lie on the doubling cycle of t_minus")
    portrait = validate_portrait([cyc])
    from .angles import characteristic_arc

    ch = characteristic_arc(portrait)
    if (ch.start, ch.end) != (t_minus, t_plus):
        raise ValueError(
            f"({fmt_angle(t_minus)},{fmt_angle(t_plus)}) is not the "
            f"characteristic arc of its cycle portrait"
        )
    # rotation number of the cycle = (position shift of doubling) / period
    srt = sorted(cyc)
    shift = srt.index(double(srt[0]))
    q = len(cyc)
    lam = cmath.exp(2j * math.pi * shift / q)
    root = -2 * (lam + 1) / (lam + 2)
    a0 = root * root * (root + 2)
    return Wake(t_minus, t_plus, tuple(sorted(cyc)), a0)


@dataclass
class WakeMembership:
    member: bool
    conclusive: bool
    landing_spread: float
    fixed_point: Optional[complex]
    multiplier: Optional[complex]
    detail: str = ""

    def to_json(self):
        return {
            "member": self.member,
            "conclusive": self.conclusive,
            "landing_spread": self.landing_spread,
            "fixed_point": None if self.fixed_point is None
            else [self.fixed_point.real, self.fixed_point.imag],
            "multiplier": None if self.multiplier is None
            else [self.multiplier.real, self.multiplier.imag],
            "detail": self.detail,
        }


def wake_membership(w: Wake, a: complex, depth: int = 90,
                    tol: float = 1e-5) -> WakeMembership:
    """Test whether R_a realizes the wake's repelling orbit portrait: trace
    the portrait's bubble rays and require a common repelling landing.

    Capture parameters are admitted (a wake contains capture components and
    the portrait is realized on them too); the capture status is reported
    in the detail field.
    """
    cap = capture_generation(a, budget=40)
    try:
        forest = dyn.BubbleForest(a)
        traces = [dyn.trace_bubble_ray(a, t, depth=depth, forest=forest)
                  for t in w.portrait_angles]
    except dyn.DegenerateStructureError as e:
        return WakeMembership(False, False, math.inf, None, None, str(e))
    lands = [t.landing for t in traces]
    if any(l is None for l in lands):
        return WakeMembership(False, False, math.inf, None, None,
                              "ray tracing failed to land")
    spread = max(abs(x - y) for x in lands for y in lands)
    raw = [t.raw_landing for t in traces]
    raw_spread = max(abs(x - y) for x in raw for y in raw)
    fp = min(dyn._cubic_roots(a), key=lambda r: abs(r - lands[0]))
    mult = dyn.d_rmap(a, fp)
    member = bool(
        spread < tol
        and abs(fp - lands[0]) < 10 * tol
        and abs(mult) > 1 + 1e-9
        and raw_spread < 0.2
    )
    conclusive = bool(spread < tol or raw_spread > 10 * tol)
    return WakeMembership(member, conclusive, float(spread), complex(fp),
                          complex(mult), detail=cap.status)


# --- parameter puzzle pieces --------------------------------------------------

@dataclass
class ParameterPuzzlePiece:
    depth: int
    window: Tuple[Fraction, Fraction]
    wake: Wake
    sample: Optional[complex]
    diameter: float
    member_samples: List[complex] = field(default_factory=list)

    def to_json(self):
        return {
            "depth": self.depth,
            "window": [fmt_angle(self.window[0]), fmt_angle(self.window[1])],
            "wake": self.wake.to_json(),
            "sample": None if self.sample is None
            else [self.sample.real, self.sample.imag],
            "diameter": self.diameter,
        }


def angle_window(theta_c: Fraction, cycle: tuple, depth: int):
    """The interval of the depth-d preimage partition of the cycle angles
    containing theta_c (the angular footprint of the critical-value piece)."""
    pts = set()
    for t in cycle:
        cur = {angle(t)}
        pts |= cur
        for _ in range(depth):
            cur = {x / 2 for x in cur} | {x / 2 + Fraction(1, 2) for x in cur}
            pts |= {angle(x) for x in cur}
    srt = sorted(pts)
    theta_c = angle(theta_c)
    import bisect

    i = bisect.bisect_left(srt, theta_c)
    lo = srt[i - 1] if i > 0 else srt[-1]
    hi = srt[i % len(srt)]
    if hi == theta_c:
        hi = srt[(i + 1) % len(srt)]
    return lo, hi


def parameter_puzzle_piece(
    theta_c,
    depth: int,
    a_ref: complex,
    probe_directions: int = 8,
    probe_tol: float = 1e-4,
) -> ParameterPuzzlePiece:
    """Combinatorial parameter puzzle piece of the target angle theta_c at
    the given depth, with a sampled diameter estimate around a_ref (a
    parameter known to carry the target combinatorics, e.g. the located
    mating).  Membership of a probe parameter is tested by matching its
    critical-value itinerary against the target to the requested depth.
    """
    theta_c = angle(Fraction(theta_c))
    w = wake_for_target(theta_c)
    window = angle_window(theta_c, w.portrait_angles, depth)
    from .puzzle import critical_value_itinerary_match

    # radial probing: find, in each direction, how far combinatorics agree
    radii = []
    samples = []
    for k in range(probe_directions):
        direction = cmath.exp(2j * math.pi * k / probe_directions)
        lo_r, hi_r = 0.0, 1.0
        # expand hi_r until mismatch (or cap)
        while hi_r < 4.0 and critical_value_itinerary_match(
            a_ref + hi_r * direction, a_ref, theta_c, depth
        ):
            hi_r *= 2
        for _ in range(24):
            mid = (lo_r + hi_r) / 2
            if mid < probe_tol:
                break
            if critical_value_itinerary_match(
                a_ref + mid * direction, a_ref, theta_c, depth
            ):
                lo_r = mid
            else:
                hi_r = mid
        radii.append(lo_r)
        if lo_r > 0:
            samples.append(a_ref + lo_r * 0.5 * direction)
    diameter = 2 * max(radii) if radii else math.inf
    return ParameterPuzzlePiece(depth, window, w, a_ref, diameter, samples)


def wake_for_target(theta_c: Fraction) -> Wake:
    """The wake of the fixed-point portrait whose characteristic arc
    contains theta_c (the alpha wake of the target quadratic)."""
    theta_c = angle(theta_c)
    from .angles import characteristic_arc

    for q in range(2, 17):
        for num in range(1, 2 ** q - 1):
            t = Fraction(num, 2 ** q - 1)
            k, p = period_preperiod(t)
            if p != q or k != 0:
                continue
            cyc = [t]
            s = double(t)
            while s != t:
                cyc.append(s)
                s = double(s)
            if min(cyc) != t:
                continue  # one representative per cycle
            try:
                P = validate_portrait([cyc])
                ch = characteristic_arc(P)
            except Exception:
                continue
            if ch.contains(theta_c) or ch.start == theta_c or ch.end == theta_c:
                # boundary angles (critically periodic targets marked by a
                # root ray) select their own wake
                return wake(ch.start, ch.end)
    raise ValueError(f"no fixed-point wake found containing {fmt_angle(theta_c)}")
