"""Yoccoz puzzle combinatorics, critical tableaux, and the bubble puzzle.

Puzzle pieces are identified combinatorially: a depth-d piece is the
itinerary word (length d+1) of the angles it contains with respect to the
partition by the rays landing at the dividing fixed point.  The geometric
realization for R_a (bubble rays as axes, equipotential collar) is a
separate layer used for margin checks and rendering.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .angles import (
    angle,
    double,
    fmt_angle,
    partition_arcs,
    period_preperiod,
)
from . import basilica as bas
from . import dynamics as dyn

CRITICAL, SEMI, OFF = "C", "S", "O"


# --- combinatorial quadratic puzzle -----------------------------------------

@dataclass(frozen=True)
class PuzzlePieceId:
    depth: int
    word: tuple  # itinerary digits (depth+1 of them), 1-based arc indices
    critical: bool
    critical_value: bool

    def to_json(self):
        return {
            "depth": self.depth,
            "word": list(self.word),
            "critical": self.critical,
            "critical_value": self.critical_value,
        }


class QuadraticPuzzle:
    """Angle-combinatorial Yoccoz puzzle for f_c, c marked by the external
    angle theta_c of its critical value.

    The alpha-cycle partition arcs are numbered 1..q counter-clockwise from
    the arc containing 0.  A depth-d piece is a realized word of digits
    (w_0, ..., w_d); the piece containing an angle is its itinerary
    truncation, and the critical piece at depth d is (c*, s_0, ..., s_{d-1})
    where s is the itinerary of theta_c and c* the index of the critical
    arc (the long arc, which holds both preimage rays of theta_c).
    """

    def __init__(self, theta_c, cycle: Sequence[Fraction], depth: int):
        self.theta_c = angle(Fraction(theta_c))
        self.cycle = tuple(sorted(angle(t) for t in cycle))
        if self.theta_c in self.cycle:
            raise ValueError("theta_c lies on the partition cycle")
        self.depth = depth
        self.arcs = partition_arcs(self.cycle)
        self.q = len(self.arcs)
        lengths = [arc.length for arc in self.arcs]
        self.critical_digit = 1 + max(range(self.q), key=lambda i: lengths[i])
        if lengths[self.critical_digit - 1] <= Fraction(1, 2):
            raise ValueError("partition has no critical (long) arc")
        self.value_digits = self._digits(self.theta_c, depth + 1)
        # words of pieces at each depth that contain angles (realized
        # words); built lazily, only piece catalogs need it
        self._realized: Optional[List[set]] = None

    # digits of an angle (finite list may stop early on the cycle: tie-break
    # handled by the caller via itinerary(); here hitting the cycle cannot
    # happen for the sampled preimages)
    def _digits(self, t: Fraction, n: int):
        out = []
        for _ in range(n):
            d = None
            for j, arc in enumerate(self.arcs):
                if arc.contains(t):
                    d = j + 1
                    break
            if d is None:  # on the cycle: enter the arc to the right
                for j, arc in enumerate(self.arcs):
                    if arc.start == t:
                        d = j + 1
                        break
            out.append(d)
            t = double(t)
        return tuple(out)

    def _ensure_realized(self):
        if self._realized is not None:
            return
        self._realized = [set() for _ in range(self.depth + 1)]
        # realized piece words = itineraries of preimages of the cycle plus
        # sample angles: enumerate all words of preimage intervals exactly by
        # cutting the circle at depth-d preimages of the cycle
        pts = set(self.cycle)
        cur = set(self.cycle)
        for d in range(self.depth + 1):
            srt = sorted(pts)
            for i, lo in enumerate(srt):
                hi = srt[(i + 1) % len(srt)]
                mid = angle(lo + angle(hi - lo) / 2)
                self._realized[d].add(self._digits(mid, d + 1))
            cur = {angle(t / 2) for t in cur} | {angle(t / 2 + Fraction(1, 2)) for t in cur}
            pts |= cur

    def pieces(self, d: int) -> List[PuzzlePieceId]:
        self._ensure_realized()
        cw = self.critical_word(d)
        vw = self.value_word(d)
        return [
            PuzzlePieceId(d, w, w == cw, w == vw)
            for w in sorted(self._realized[d])
        ]

    def piece_of_angle(self, t, d: int) -> tuple:
        return self._digits(angle(Fraction(t)), d + 1)

    def value_word(self, d: int) -> tuple:
        return self.value_digits[: d + 1]

    def critical_word(self, d: int) -> tuple:
        return (self.critical_digit,) + self.value_digits[:d]

    def parent(self, piece: tuple) -> tuple:
        """Depth-(d-1) piece containing a depth-d piece: drop the last digit."""
        return piece[:-1]

    def dynamic_image(self, piece: tuple) -> tuple:
        """f maps a depth-d piece onto the depth-(d-1) piece of its shifted
        word (the Markov property in word form)."""
        return piece[1:]

    def markov_check(self) -> bool:
        """Exhaustive nesting test: every realized depth-d word extends a
        realized depth-(d-1) word, and shifts land on realized words."""
        self._ensure_realized()
        for d in range(1, self.depth + 1):
            for w in self._realized[d]:
                if w[:-1] not in self._realized[d - 1]:
                    return False
                if w[1:] not in self._realized[d - 1]:
                    return False
        return True


# --- critical tableaux --------------------------------------------------------

@dataclass
class Tableau:
    """Marks grid: marks[d][n] for depth d <= D, column n <= N."""

    depth: int
    columns: int
    marks: List[List[str]]
    s_values: List[float]  # S(z_n); math.inf for an all-critical column
    classification: str
    moduli: Optional[List[List[float]]] = None
    degenerate: Optional[List[List[bool]]] = None

    def mark(self, d: int, n: int) -> str:
        return self.marks[d][n]

    def to_json(self):
        return {
            "depth": self.depth,
            "columns": self.columns,
            "marks": ["".join(row) for row in self.marks],
            "classification": self.classification,
            "s_values": [None if math.isinf(s) else s for s in self.s_values],
        }


def marks_from_s_values(svals: Sequence[float], depth: int) -> List[List[str]]:
    """The S(z)-trichotomy: position (d, n) is critical when d < S(z_n),
    semi-critical when d = S(z_n), off-critical when d > S(z_n)."""
    cols = len(svals)
    marks = [[OFF] * cols for _ in range(depth + 1)]
    for n, s in enumerate(svals):
        for d in range(depth + 1):
            if math.isinf(s) or d < s:
                marks[d][n] = CRITICAL
            elif d == s:
                marks[d][n] = SEMI
    return marks


def classify_marks(marks: List[List[str]], svals) -> str:
    if any(math.isinf(s) for s in svals[1:]):
        return "periodic"
    depth = len(marks) - 1
    # recurrent: criticality at depth >= depth/2 in some positive column
    deep = 0
    for n in range(1, len(svals)):
        if not math.isinf(svals[n]):
            deep = max(deep, int(svals[n]))
    if deep >= depth // 2:
        return "recurrent"
    return "non-recurrent"


def build_tableau_angles(theta_c, cycle, depth: int, columns: int) -> Tableau:
    """Tableau of a quadratic from exact angle combinatorics.

    S(z_n) = depth to which the piece of z_n = f^n(0) agrees with the
    critical piece; computed exactly from itinerary words.
    """
    pz = QuadraticPuzzle(theta_c, cycle, depth + 1)
    svals: List[float] = [math.inf]  # column 0 is the critical point itself
    # word of z_n for n>=1: digits of 2^{n-1} theta_c
    t = angle(Fraction(theta_c))
    for n in range(1, columns + 1):
        zw = pz._digits(t, depth + 2)
        cw = pz.critical_word(depth + 1)
        s = -1
        for d in range(depth + 2):
            if zw[: d + 1] == cw[: d + 1]:
                s = d
            else:
                break
        k, p = period_preperiod(t)
        if s >= depth + 1:
            # decide exactly whether the agreement goes on forever: the
            # column is fully critical iff the itinerary of t equals the
            # shifted critical itinerary at every depth, which for rational
            # angles is a finite comparison over the eventual cycle
            s_inf = _column_critical_forever(pz, t, depth + 2)
            svals.append(math.inf if s_inf else float(s))
        else:
            svals.append(float(s))
        t = double(t)
    marks = marks_from_s_values(svals, depth)
    return Tableau(depth, columns, marks, svals, classify_marks(marks, svals))


def _column_critical_forever(pz: QuadraticPuzzle, t: Fraction, horizon: int) -> bool:
    k1, p1 = period_preperiod(t)
    k2, p2 = period_preperiod(pz.theta_c)
    n = max(k1 + p1, k2 + p2) * 2 + horizon
    zw = pz._digits(t, n + 1)
    cw = (pz.critical_digit,) + pz._digits(pz.theta_c, n)
    return zw == cw


def build_tableau_orbit(c: complex, depth: int, columns: int,
                        alpha_tol: float = 1e-12) -> Tableau:
    """Tableau of a real quadratic from the numeric critical orbit.

    Valid for real c in [-2, 1/4): pieces trace on the real line to the
    partition by the alpha fixed point, so S(z_n) = number of initial steps
    on which the orbits of z_n and 0 stay on the same side of alpha.
    """
    if abs(complex(c).imag) > 1e-14:
        raise ValueError("orbit mode supports real parameters only")
    c = float(complex(c).real)
    if c > 0.25:
        raise ValueError("need c <= 1/4")
    alpha = (1 - math.sqrt(1 - 4 * c)) / 2
    horizon = depth + columns + 4
    orbit = [0.0]
    for _ in range(horizon + columns + 2600):
        orbit.append(orbit[-1] ** 2 + c)

    # attracting-cycle detection decides (eventual) periodicity honestly:
    # inside a renormalization window the critical orbit converges to an
    # attracting cycle, and only then is a column marked critical forever
    attracting_period = None
    M = len(orbit) - 40
    for p in range(1, 33):
        if abs(orbit[M + p] - orbit[M]) < 1e-9 and abs(orbit[M + 2 * p] - orbit[M]) < 1e-9:
            attracting_period = p
            break

    def side(x):
        return 0 if x > alpha else 1

    svals: List[float] = [math.inf]
    for n in range(1, columns + 1):
        s = -1
        d = 0
        while d <= depth + 1:
            if abs(orbit[n + d] - alpha) < alpha_tol or abs(orbit[d] - alpha) < alpha_tol:
                break
            if side(orbit[n + d]) != side(orbit[d]):
                break
            s = d
            d += 1
        if s > depth:
            svals.append(math.inf if attracting_period else float(depth + 1))
        else:
            svals.append(float(s))
    marks = marks_from_s_values(svals, depth)
    return Tableau(depth, columns, marks, svals, classify_marks(marks, svals))


# --- tableau rules -------------------------------------------------------------

@dataclass(frozen=True)
class RuleViolation:
    rule: str
    position: tuple
    detail: str = ""

    def to_json(self):
        return {"rule": self.rule, "position": list(self.position), "detail": self.detail}


def validate_tableau_rules(t: Tableau) -> List[RuleViolation]:
    """Check the four critical-tableau rules on the populated grid.

    Rules: column structure (critical above one semi-critical position,
    off-critical below; column 0 all critical); modulus transport under the
    iterate move (d, n) -> (d-1, n+1) when moduli are attached; marking-copy
    above the diagonal through any (semi-)critical position; semi-critical
    propagation along first-return diagonals.
    """
    v: List[RuleViolation] = []
    D, N = t.depth, t.columns
    m = t.marks
    for n in range(N + 1):
        col = [m[d][n] for d in range(D + 1)]
        if n == 0:
            if any(x != CRITICAL for x in col):
                v.append(RuleViolation("column-structure", (0, 0), "column 0 not all critical"))
            continue
        semis = [d for d, x in enumerate(col) if x == SEMI]
        if len(semis) > 1:
            v.append(RuleViolation("column-structure", (semis[1], n), "two semi-critical marks"))
            continue
        if semis:
            d0 = semis[0]
            if any(col[d] != CRITICAL for d in range(d0)):
                v.append(RuleViolation("column-structure", (d0, n), "gap below semi-critical"))
            if any(col[d] != OFF for d in range(d0 + 1, D + 1)):
                v.append(RuleViolation("column-structure", (d0, n), "criticality above semi-critical"))
        else:
            if set(col) not in ({CRITICAL}, {OFF}):
                bad = next(d for d in range(D + 1) if col[d] != col[0])
                v.append(
                    RuleViolation(
                        "column-structure", (bad, n),
                        "mixed column without a semi-critical mark",
                    )
                )
    if t.moduli is not None:
        mu = t.moduli
        for n in range(N):
            for d in range(1, D + 1):
                cur, img = mu[d][n], mu[d - 1][n + 1]
                if cur is None or img is None:
                    continue
                if cur > 0 and img <= 0:
                    v.append(RuleViolation("iterate-positivity", (d, n)))
                if m[d][n] == OFF and abs(img - cur) > 1e-12:
                    v.append(RuleViolation("modulus-off", (d, n), f"{img} != {cur}"))
                if m[d][n] == CRITICAL and abs(img - 2 * cur) > 1e-12:
                    v.append(RuleViolation("modulus-critical", (d, n), f"{img} != 2*{cur}"))
                if m[d][n] == SEMI and not img < 2 * cur + 1e-12:
                    v.append(RuleViolation("modulus-semi", (d, n), f"{img} >= 2*{cur}"))
    # copy rule: a critical mark at (d0, n) means z_n shares the critical
    # piece to depth d0, so columns n+j and j carry identical marks strictly
    # above the north-east diagonals through (d0, n) and (d0, 0)
    for n in range(1, N + 1):
        for d0 in range(D + 1):
            if m[d0][n] not in (CRITICAL, SEMI):
                continue
            for j in range(1, min(d0, N - n) + 1):
                for d in range(0, d0 - j):
                    if m[d][n + j] != m[d][j]:
                        v.append(
                            RuleViolation(
                                "copy-above-diagonal", (d, n + j),
                                f"expected {m[d][j]} (copied from column {j})",
                            )
                        )
                        break
    # semi-critical propagation
    for d in range(1, D + 1):
        if m[d][0] != CRITICAL:
            continue
        k = None
        for kk in range(1, min(d, N) + 1):
            if m[d - kk][kk] == CRITICAL and all(
                m[d - i][i] == OFF for i in range(1, kk)
            ):
                k = kk
                break
        if k is None:
            continue
        for n in range(1, N + 1 - k):
            if m[d][n] == SEMI and d - k >= 0:
                if m[d - k][n + k] != SEMI:
                    v.append(RuleViolation("semi-propagation", (d - k, n + k)))
    return v


# --- children / divergence ------------------------------------------------------

def children(t: Tableau, d: int) -> List[int]:
    """Depths d+k of the children of the critical annulus A_d(0): first
    returns of the critical column to depth-d criticality whose connecting
    diagonal is free of (semi-)critical obstructions."""
    out = []
    D, N = t.depth, t.columns
    for k in range(1, min(N, D - d) + 1):
        if d + k > D:
            break
        if t.marks[d][k] != CRITICAL:
            continue
        clean = all(t.marks[d + k - j][j] == OFF for j in range(1, k))
        if clean:
            out.append(d + k)
    return out


def descendant_tree(t: Tableau, d0: int, generations: int) -> Dict[int, List[int]]:
    """Descendants by generation: gen g+1 = children of generation-g annuli."""
    gens = {0: [d0]}
    for g in range(generations):
        nxt: List[int] = []
        for d in gens[g]:
            nxt.extend(children(t, d))
        gens[g + 1] = sorted(set(nxt))
    return gens


@dataclass
class DivergenceDiagnostic:
    seed_depth: int
    m0: float
    generation_sums: List[float]
    partial_sums: List[float]
    counts: List[int]

    def to_json(self):
        return {
            "seed_depth": self.seed_depth,
            "m0": self.m0,
            "generation_sums": self.generation_sums,
            "partial_sums": self.partial_sums,
            "counts": self.counts,
        }


def divergence_diagnostic(t: Tableau, generations: int = 6,
                          seed: float = 1.0) -> DivergenceDiagnostic:
    """Formal-moduli divergence bookkeeping for a recurrent, non-periodic
    tableau.

    Each child annulus is an unramified double cover of its parent, so a
    generation-g descendant carries formal modulus seed * 2^-g; there are
    at least 2^g descendants of generation g, so every completed generation
    contributes at least 2 * M0 to the running total, where M0 = seed/2 is
    the common modulus of the first-generation descendants.  The partial
    sums are the numerical face of the divergence of sum_d mu_{d,0}.
    """
    if t.classification == "periodic":
        raise ValueError("divergence diagnostic requires a non-periodic tableau")
    if t.classification != "recurrent":
        raise ValueError("divergence diagnostic requires a recurrent tableau")
    # seed at the first critical annulus with two children (an excellent
    # annulus, so the descendant tree doubles), else first with one
    d0 = None
    for d in range(t.depth + 1):
        if len(children(t, d)) >= 2:
            d0 = d
            break
    if d0 is None:
        for d in range(t.depth + 1):
            if children(t, d):
                d0 = d
                break
    if d0 is None:
        raise ValueError("no child annulus found within the grid")
    gens = descendant_tree(t, d0, generations)
    m0 = seed / 2.0
    gen_sums = []
    counts = []
    partial = []
    total = 0.0
    for g in range(1, generations + 1):
        ds = gens.get(g, [])
        counts.append(len(ds))
        contribution = len(ds) * seed * 2.0 ** (-g)
        gen_sums.append(contribution)
        total += contribution
        partial.append(total)
    return DivergenceDiagnostic(d0, m0, gen_sums, partial, counts)


# --- sector location and the bubble puzzle --------------------------------------

class SectorLocator:
    """Point location among the initial puzzle sectors of R_a: the sectors
    cut by the bubble-ray axes of the alpha_a portrait angles."""

    def __init__(self, a: complex, portrait_angles: Sequence[Fraction],
                 depth: int = 70, far_radius: float = 1e5):
        self.a = complex(a)
        self.angles = [angle(t) for t in portrait_angles]
        self.far_radius = far_radius
        self.forest = dyn.BubbleForest(self.a)
        self.axes: List[List[complex]] = []
        self.far_args: List[float] = []
        arcs = partition_arcs(self.angles)
        self.arcs = arcs
        for th in self.angles:
            tr = dyn.trace_bubble_ray(self.a, th, depth=depth, forest=self.forest)
            chain = tr.bubbles
            if not chain:
                raise RuntimeError(f"portrait ray {fmt_angle(th)} has no bubbles")
            att = chain[0].att
            stub = dyn.internal_ray(self.a, att, potential_low=1e-5,
                                    substeps=3, polish=False)
            poly = list(stub.points)
            for b in chain:
                poly.append(b.root)
                poly.append(b.center)
            if tr.landing is not None:
                poly.append(tr.landing)
            self.axes.append(poly)
            self.far_args.append(2 * math.pi * float(att))
        # sector far reference arguments: between consecutive axis far-args
        order = sorted(range(len(self.angles)), key=lambda i: self.far_args[i])
        self.axis_order = order

    def _far_sector(self, arg: float) -> int:
        """Sector index (by portrait-arc index) of a far point at argument
        arg: the arc of the partition whose preimage contains the far
        direction; far directions at Phi-angle t correspond to bubble-ray
        angles theta with arc-attachment att = t."""
        # match: each axis i has far direction far_args[i]; sectors between
        # consecutive axes in circular order correspond to partition arcs
        args = sorted((self.far_args[i], i) for i in range(len(self.axes)))
        a0 = arg % (2 * math.pi)
        prev = None
        for val, i in args:
            if a0 >= val:
                prev = i
        if prev is None:
            prev = args[-1][1]
        # the sector counter-clockwise after axis `prev`: identified with the
        # partition arc starting at the angle of that axis
        th = self.angles[prev]
        for j, arc in enumerate(self.arcs):
            if arc.start == th:
                return j + 1
        return 1

    def locate(self, z: complex) -> Optional[int]:
        """Initial-sector digit of z (1-based, matching partition_arcs
        enumeration), or None when indeterminate."""
        if dyn.is_inf(z) or abs(z) > self.far_radius:
            return None
        far = z / abs(z) * self.far_radius if z != 0 else complex(self.far_radius, 0)
        crossings = []
        for idx, poly in enumerate(self.axes):
            for k in range(len(poly) - 1):
                hit = _seg_intersect(z, far, poly[k], poly[k + 1])
                if hit is not None:
                    crossings.append((hit, idx))
        sector = self._far_sector(cmath.phase(far))
        # walk from the far end toward z
        for tpos, idx in sorted(crossings, key=lambda x: -x[0]):
            th = self.angles[idx]
            # axis idx separates the arc starting at th from the arc ending at th
            left = None
            right = None
            for j, arc in enumerate(self.arcs):
                if arc.start == th:
                    left = j + 1
                if arc.end == th:
                    right = j + 1
            if sector == left:
                sector = right
            elif sector == right:
                sector = left
            else:
                return None  # inconsistent crossing sequence
        return sector

    def itinerary(self, z: complex, length: int) -> Optional[tuple]:
        out = []
        w = complex(z)
        for _ in range(length):
            s = self.locate(w)
            if s is None:
                return None
            out.append(s)
            w = dyn.rmap(self.a, w)
        return tuple(out)


def _seg_intersect(p1, p2, q1, q2) -> Optional[float]:
    """Parameter t in (0,1) along [p1,p2] of its crossing with [q1,q2]."""
    d = p2 - p1
    e = q2 - q1
    den = d.real * (-e.imag) - (-e.real) * d.imag
    if abs(den) < 1e-300:
        return None
    rx, ry = (q1 - p1).real, (q1 - p1).imag
    t = (rx * (-e.imag) - (-e.real) * ry) / den
    u = (d.real * ry - rx * d.imag) / den
    if 0 < t < 1 and 0 < u < 1:
        return t
    return None


def critical_value_itinerary_match(b: complex, a_ref: complex, theta_c,
                                   depth: int) -> bool:
    """Does R_b's critical value follow the target itinerary (that of the
    external angle theta_c in the alpha partition) to the given depth?"""
    from .parameter import wake_for_target

    theta_c = angle(Fraction(theta_c))
    w = wake_for_target(theta_c)
    target = _target_value_itinerary(theta_c, w.portrait_angles, depth + 1)
    try:
        loc = SectorLocator(b, w.portrait_angles)
    except Exception:
        return False
    got = loc.itinerary(-b, depth + 1)
    return got == target


def _target_value_itinerary(theta_c, portrait_angles, length):
    arcs = partition_arcs(portrait_angles)
    t = angle(theta_c)
    out = []
    for _ in range(length):
        d = None
        for j, arc in enumerate(arcs):
            if arc.contains(t):
                d = j + 1
                break
        out.append(d)
        t = double(t)
    return tuple(out)


# --- bubble puzzle ---------------------------------------------------------------

@dataclass
class BubblePuzzle:
    a: complex
    combinatorics: QuadraticPuzzle
    locator: SectorLocator
    equipotential_level: float
    collar: List[complex]
    collar_inner: List[complex]

    def piece_catalog(self, d: int):
        return self.combinatorics.pieces(d)


def bubble_puzzle(a: complex, theta_c, depth: int,
                  equipotential_level: float = 0.5,
                  collar_samples: int = 128) -> BubblePuzzle:
    """Bubble puzzle of R_a for a parameter in the wake of theta_c's
    portrait: combinatorics shared with the quadratic puzzle, plus the
    numeric realization (traced axes, equipotential collar D and its
    pullback D' in A_0)."""
    from .parameter import wake_for_target

    w = wake_for_target(theta_c)
    comb = QuadraticPuzzle(theta_c, w.portrait_angles, depth)
    loc = SectorLocator(a, w.portrait_angles)
    collar = dyn.equipotential(a, equipotential_level, collar_samples)
    # D' = R^{-1}(D) in A_0: of the sigma-symmetric preimage pair take the
    # one on the A_0 side of the symmetry point -1
    inner = []
    for z in collar:
        z1, z2 = dyn.preimages(a, z)
        inner.append(z1 if abs(z1) < abs(z1 + 2) else z2)
    return BubblePuzzle(complex(a), comb, loc, equipotential_level, collar, inner)


def realized_piece_margin(bp: BubblePuzzle, depth: int) -> float:
    """Margin between the realized critical piece at the given depth and the
    equipotential collar: min distance between the traced critical-piece
    boundary rays (depth-d preimage rays around the critical point) and D.

    Used for the non-degeneracy checks; a positive margin certifies (at
    sampling resolution) compact containment away from the collar.
    """
    # the critical piece at depth d is bounded by rays landing at depth-d
    # preimages of alpha_a adjacent to the critical point: sample with the
    # preimage angles of the portrait around the critical value pair
    theta_c = bp.combinatorics.theta_c
    pre = {angle(theta_c / 2), angle(theta_c / 2 + Fraction(1, 2))}
    pts: List[complex] = []
    for th in pre:
        tr = dyn.trace_bubble_ray(bp.a, th, depth=40, forest=bp.locator.forest)
        for b in tr.bubbles[:depth + 3]:
            pts.extend([b.root, b.center])
    if not pts:
        return math.nan
    return min(abs(p - q) for p in pts for q in bp.collar)
