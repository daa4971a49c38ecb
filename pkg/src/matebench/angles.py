"""Exact circle combinatorics: angles under doubling, arcs, orbit portraits.

Angles are reduced fractions in [0, 1) representing points of R/Z.  All
arithmetic in this module is exact; nothing here touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


def angle(num, den=None) -> Fraction:
    """Build an angle: reduce and wrap into [0, 1)."""
    t = Fraction(num, den) if den is not None else Fraction(num)
    return t - (t // 1)


def parse_angle(s: str) -> Fraction:
    s = s.strip()
    if "/" in s:
        p, q = s.split("/")
        return angle(int(p), int(q))
    return angle(Fraction(s))


def fmt_angle(t: Fraction) -> str:
    return f"{t.numerator}/{t.denominator}"


def double(t: Fraction) -> Fraction:
    """The doubling map t -> 2t mod Z."""
    return angle(2 * t)


def period_preperiod(t: Fraction):
    """Smallest (k, p), k >= 0, p >= 1 with 2^(k+p) t == 2^k t mod Z.

    Exact: preperiod is the 2-adic valuation of the denominator, period the
    multiplicative order of 2 modulo its odd part (1 for t = 0).
    """
    t = angle(t)
    d = t.denominator
    k = 0
    while d % 2 == 0:
        d //= 2
        k += 1
    if d == 1:
        return k, 1
    p = 1
    r = 2 % d
    while r != 1:
        r = (2 * r) % d
        p += 1
    return k, p


def orbit_of(t: Fraction):
    """(preperiodic part, cycle) of the doubling orbit of t, both lists."""
    k, p = period_preperiod(t)
    pts = [angle(t)]
    for _ in range(k + p - 1):
        pts.append(double(pts[-1]))
    return pts[:k], pts[k:]


@dataclass(frozen=True)
class Arc:
    """Open arc swept counter-clockwise from start to end; start != end."""

    start: Fraction
    end: Fraction

    def __post_init__(self):
        if angle(self.start) == angle(self.end):
            raise ValueError("degenerate arc")
        object.__setattr__(self, "start", angle(self.start))
        object.__setattr__(self, "end", angle(self.end))

    @property
    def length(self) -> Fraction:
        return angle(self.end - self.start)

    def contains(self, t) -> bool:
        t = angle(t)
        rel = angle(t - self.start)
        return 0 < rel < self.length

    def __str__(self):
        return f"({fmt_angle(self.start)},{fmt_angle(self.end)})"


class PortraitRejection(ValueError):
    """A candidate angle collection fails the formal-portrait conditions."""

    def __init__(self, reason: str, detail: str = ""):
        self.reason = reason
        self.detail = detail
        super().__init__(f"{reason}: {detail}" if detail else reason)


REJECTION_REASONS = (
    "size-mismatch",
    "non-bijective-image",
    "cyclic-order-violation",
    "unequal-periods",
    "linked-hulls",
)


@dataclass(frozen=True)
class OrbitPortrait:
    """A validated formal orbit portrait {A_1, ..., A_p}."""

    angle_sets: tuple  # tuple of tuples of sorted Fractions
    valence: int
    ray_period: int
    r: int

    @property
    def p(self) -> int:
        return len(self.angle_sets)

    def all_angles(self):
        return [t for A in self.angle_sets for t in A]

    def to_json(self):
        return {
            "angle_sets": [[fmt_angle(t) for t in A] for A in self.angle_sets],
            "p": self.p,
            "valence": self.valence,
            "ray_period": self.ray_period,
            "r": self.r,
        }


def _cyclic_rank(angles: Sequence[Fraction]):
    """Positions of angles in circular order starting from the smallest."""
    order = sorted(range(len(angles)), key=lambda i: angles[i])
    rank = [0] * len(angles)
    for pos, i in enumerate(order):
        rank[i] = pos
    return rank


def _unlinked(A: Sequence[Fraction], B: Sequence[Fraction]) -> bool:
    """True iff B lies entirely within one complementary arc of A."""
    sa = sorted(A)
    if len(sa) == 1:
        return sa[0] not in B
    # complementary arcs of A: (sa[i], sa[i+1]) cyclically
    for i in range(len(sa)):
        arc = Arc(sa[i], sa[(i + 1) % len(sa)])
        if all(arc.contains(b) for b in B):
            return True
    return False


def validate_portrait(candidate: Iterable[Iterable]) -> OrbitPortrait:
    """Check the four formal-portrait conditions; raise PortraitRejection
    naming the first violated one.
    """
    sets = [tuple(sorted(angle(t) for t in A)) for A in candidate]
    if not sets or any(len(A) == 0 for A in sets):
        raise PortraitRejection("size-mismatch", "empty angle set")
    p = len(sets)
    v = len(sets[0])
    for A in sets:
        if len(set(A)) != len(A):
            raise PortraitRejection("size-mismatch", "repeated angle in a set")
        if len(A) != v:
            raise PortraitRejection(
                "size-mismatch", f"|A_i| = {len(A)} != {v}"
            )
    for j in range(p):
        img = sets[(j + 1) % p]
        mapped = tuple(sorted(double(t) for t in sets[j]))
        if mapped != img:
            raise PortraitRejection(
                "non-bijective-image",
                f"doubling(A_{j + 1}) != A_{(j + 1) % p + 1}",
            )
    # cyclic order preserved (meaningful for v >= 3)
    if v >= 3:
        for j in range(p):
            src = list(sets[j])
            rank_src = _cyclic_rank(src)
            rank_img = _cyclic_rank([double(t) for t in src])
            n = len(src)
            # rank_img must be a rotation of rank_src
            shift = (rank_img[0] - rank_src[0]) % n
            if any((rank_src[i] + shift) % n != rank_img[i] for i in range(n)):
                raise PortraitRejection(
                    "cyclic-order-violation", f"A_{j + 1} image order scrambled"
                )
    periods = set()
    for A in sets:
        for t in A:
            k, per = period_preperiod(t)
            if k != 0:
                raise PortraitRejection(
                    "unequal-periods", f"{fmt_angle(t)} is not periodic"
                )
            periods.add(per)
    if len(periods) != 1:
        raise PortraitRejection("unequal-periods", f"periods {sorted(periods)}")
    rp = periods.pop()
    if rp % p != 0:
        raise PortraitRejection("unequal-periods", f"period {rp} not divisible by p={p}")
    for i in range(p):
        for j in range(i + 1, p):
            if not (_unlinked(sets[i], sets[j]) and _unlinked(sets[j], sets[i])):
                raise PortraitRejection(
                    "linked-hulls", f"hulls of A_{i + 1} and A_{j + 1} cross"
                )
    r = rp // p
    if not (v == r or (v == 2 and r == 1)):
        # cannot occur for a formal portrait; guard anyway
        raise PortraitRejection("unequal-periods", f"v={v}, r={r} impossible")
    return OrbitPortrait(tuple(sets), v, rp, r)


def try_validate_portrait(candidate):
    """(portrait, None) on success, (None, rejection) on failure."""
    try:
        return validate_portrait(candidate), None
    except PortraitRejection as e:
        return None, e


def complementary_arcs(portrait: OrbitPortrait, i: int):
    """The v arcs of the circle minus A_i, with index of the critical arc.

    Returns (arcs, critical_index); the critical arc is the unique one of
    length > 1/2.
    """
    if portrait.valence < 2:
        raise ValueError("valence-1 portrait has no complementary arc structure")
    A = sorted(portrait.angle_sets[i])
    arcs = [Arc(A[k], A[(k + 1) % len(A)]) for k in range(len(A))]
    crit = [k for k, arc in enumerate(arcs) if arc.length > Fraction(1, 2)]
    if len(crit) != 1:
        raise ValueError("no unique critical arc (invalid portrait)")
    return arcs, crit[0]


def characteristic_arc(portrait: OrbitPortrait) -> Arc:
    """Unique shortest complementary arc over all A_i (exact comparison)."""
    if portrait.valence < 2:
        raise ValueError("valence-1 portrait has no characteristic arc")
    best = None
    tie = False
    for i in range(portrait.p):
        arcs, _ = complementary_arcs(portrait, i)
        for arc in arcs:
            if best is None or arc.length < best.length:
                best = arc
                tie = False
            elif arc.length == best.length and (arc.start, arc.end) != (
                best.start,
                best.end,
            ):
                tie = True
    if tie:
        raise PortraitRejection("linked-hulls", "tied shortest arc (degenerate)")
    return best


@dataclass(frozen=True)
class Itinerary:
    """Symbol sequence w.r.t. a cyclic partition; digits in 1..q.

    `period` empty means a finite string (angle hit a partition point).
    Stored in canonical form: minimal period, then minimal preperiod.
    """

    preperiod: tuple
    period: tuple

    @property
    def finite(self) -> bool:
        return not self.period

    def digits(self, n: int):
        out = list(self.preperiod)
        while self.period and len(out) < n:
            out.extend(self.period)
        return tuple(out[:n]) if not self.finite else tuple(out)

    def to_json(self):
        return {"preperiod": list(self.preperiod), "period": list(self.period)}

    @staticmethod
    def canonical(pre, per):
        pre, per = list(pre), list(per)
        if per:
            # minimal period: smallest divisor-length rotation
            n = len(per)
            for d in range(1, n + 1):
                if n % d == 0 and per == per[:d] * (n // d):
                    per = per[:d]
                    break
            # absorb trailing preperiod digits that already match the cycle
            while pre and pre[-1] == per[-1]:
                pre.pop()
                per = [per[-1]] + per[:-1]
        return Itinerary(tuple(pre), tuple(per))


def partition_arcs(cycle_angles: Sequence[Fraction]):
    """Arcs of the partition by a doubling cycle, enumerated counter-clockwise
    starting from the arc containing 0. Returns list of Arc (index = digit-1).
    """
    pts = sorted(angle(t) for t in cycle_angles)
    if len(pts) < 2:
        raise ValueError("partition needs at least two angles")
    arcs = [Arc(pts[k], pts[(k + 1) % len(pts)]) for k in range(len(pts))]
    # rotate so that the arc containing 0 comes first
    for k, arc in enumerate(arcs):
        if arc.contains(0) or arc.start == 0:
            return arcs[k:] + arcs[:k]
    raise ValueError("no arc contains 0 (0 is a partition point?)")


def itinerary(theta, cycle_angles: Sequence[Fraction]) -> Itinerary:
    """Itinerary of theta under doubling w.r.t. the partition by a cycle.

    The cycle must be one doubling orbit.  If the orbit of theta lands
    exactly on a partition angle the string is finite and the last digit is
    the arc to the right of (i.e. starting at) that angle.
    """
    pts = set(angle(t) for t in cycle_angles)
    # partition sanity: closed under doubling
    if pts != {double(t) for t in pts}:
        raise ValueError("partition angles must form doubling cycles")
    arcs = partition_arcs(cycle_angles)

    def digit(t):
        for k, arc in enumerate(arcs):
            if arc.contains(t):
                return k + 1
        return None  # on a partition point

    t = angle(theta)
    k, p = period_preperiod(t)
    digs = []
    for n in range(k + p):
        if t in pts:
            # finite string: last arc chosen to the right of the hit angle
            for j, arc in enumerate(arcs):
                if arc.start == t:
                    digs.append(j + 1)
                    break
            return Itinerary(tuple(digs), ())
        digs.append(digit(t))
        t = double(t)
    return Itinerary.canonical(digs[:k], digs[k:])
