"""Symbolic model of the filled Julia set of z^2 - 1.

Bubbles (bounded Fatou components) are encoded by sign words: a bubble of
generation g >= 1 has a word (e_1, ..., e_g) over {+1, -1}, its center being
the iterated preimage e_1*sqrt(1 + e_2*sqrt(1 + ...)) of 0; the dynamics
drops the leading letter.  Every bubble except the central one carries an
open arc of external angles (the angles of rays whose landing points sit
behind the bubble's root), and the whole combinatorics of the model -- the
touching tree, left/right halves, spine sides, bubble rays -- is read off
these arcs with exact rational arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Tuple

from .angles import angle, double, fmt_angle, period_preperiod

PLUS, MINUS = 1, -1

F13 = Fraction(1, 3)
F23 = Fraction(2, 3)
F16 = Fraction(1, 6)
F56 = Fraction(5, 6)
HALF = Fraction(1, 2)

Word = Tuple[int, ...]

# generation-1 bubbles: word -> (arc start, arc length)
GEN1 = {
    (MINUS,): (F13, F13),   # B_{-1}, behind the alpha point
    (PLUS,): (F56, F13),    # the bubble around +1, behind -alpha
}


def rays_at_alpha():
    """External angles of the two rays landing at the alpha fixed point."""
    return (F13, F23)


def arc_contains(start: Fraction, length: Fraction, t: Fraction) -> bool:
    return 0 < angle(t - start) < length


def _half_letter(start: Fraction, length: Fraction) -> int:
    """Letter of a pulled-back half-arc: + on the right half plane side."""
    mid = angle(start + length / 2)
    return PLUS if (mid > Fraction(3, 4) or mid <= Fraction(1, 4)) else MINUS


@lru_cache(maxsize=None)
def bubble_at(theta: Fraction, g: int):
    """The generation-g bubble whose angle arc contains theta, if any.

    Returns (word, (arc_start, arc_length)) or None.  theta is an
    external angle; arcs are open, so angles on a root leaf belong to no
    bubble of that generation.
    """
    theta = angle(theta)
    if g == 1:
        for w, (u, ln) in GEN1.items():
            if arc_contains(u, ln, theta):
                return w, (u, ln)
        return None
    parent = bubble_at(double(theta), g - 1)
    if parent is None or parent[0] == (MINUS,):
        # the pullback of B_{-1} is the central bubble, not a new one
        return None
    pw, (u, ln) = parent
    u2, l2 = u / 2, ln / 2
    if not arc_contains(u2, l2, theta):
        u2 = angle(u2 + HALF)
        if not arc_contains(u2, l2, theta):
            return None
    return ((_half_letter(u2, l2),) + pw, (u2, l2))


@lru_cache(maxsize=None)
def arc_of(word: Word):
    """(start, length) of the angle arc of a bubble word."""
    if len(word) == 1:
        return GEN1[word]
    u, ln = arc_of(word[1:])
    u2, l2 = u / 2, ln / 2
    if _half_letter(u2, l2) != word[0]:
        u2 = angle(u2 + HALF)
        if _half_letter(u2, l2) != word[0]:
            raise ValueError(f"invalid bubble word {word}")
    return u2, l2


def bubbles_of_generation(g: int):
    """All bubble words of generation g (the empty word is B_0)."""
    if g == 0:
        return [()]
    if g == 1:
        return sorted(GEN1, key=lambda w: arc_of(w)[0])
    out = []
    for w in bubbles_of_generation(g - 1):
        if w == (MINUS,):
            continue
        out.append((PLUS,) + w)
        out.append((MINUS,) + w)
    return out


def in_right_half(word: Word) -> bool:
    """True iff the bubble lies in the right half R of the basilica
    (the component of K minus alpha containing the central bubble B_0).
    """
    if word == ():
        return True
    u, ln = arc_of(word)
    # left half <=> arc inside (1/3, 2/3)
    return not (F13 <= u and u + ln <= F23)


def spine_side(word: Word):
    """'above', 'below' or 'on' the spine [-beta, beta]."""
    if word == ():
        return "on"
    u, ln = arc_of(word)
    v = u + ln
    if 0 <= u and v <= HALF:
        return "above"
    if HALF <= u and v <= 1:
        return "below"
    return "on"


def count_bubbles(generation: int, region: str = "whole") -> int:
    """Exact number of bubbles of a generation, in K or in the right half."""
    if generation < 0:
        raise ValueError("generation must be >= 0")
    if region not in ("whole", "right"):
        raise ValueError("region must be 'whole' or 'right'")
    if generation == 0:
        return 1
    words = bubbles_of_generation(generation)
    if region == "whole":
        return len(words)
    return sum(1 for w in words if in_right_half(w))


@lru_cache(maxsize=None)
def predecessor(word: Word) -> Word:
    """The bubble of lowest generation whose closure meets this one: the
    innermost bubble arc strictly containing this bubble's arc (B_0 = ()).
    """
    if word == ():
        raise ValueError("B_0 has no predecessor")
    if len(word) == 1:
        return ()
    u, ln = arc_of(word)
    mid = angle(u + ln / 2)
    for g in range(len(word) - 1, 0, -1):
        hit = bubble_at(mid, g)
        if hit is not None:
            return hit[0]
    return ()


def root_leaf(word: Word):
    """The pair of external angles landing at the bubble's root point."""
    u, ln = arc_of(word)
    return (u, angle(u + ln))


def bubble_ray_words(theta: Fraction, max_generation: int):
    """Bubble words of the ray toward the landing point of external angle
    theta: the chain of bubbles whose arcs contain theta, by generation.
    """
    theta = angle(theta)
    out = []
    for g in range(1, max_generation + 1):
        hit = bubble_at(theta, g)
        if hit is not None:
            out.append(hit[0])
    return out


def biaccessible(theta) -> bool:
    """True iff the landing point of R(theta) is a preimage of alpha,
    i.e. the doubling orbit of theta enters {1/3, 2/3}.
    """
    t = angle(theta)
    k, p = period_preperiod(t)
    for _ in range(k + p):
        if t == F13 or t == F23:
            return True
        t = double(t)
    return False


def ray_pair(theta):
    """For biaccessible theta, the pair of angles landing at the same
    preimage of alpha; raises for uni-accessible angles.
    """
    t = angle(theta)
    if t in (F13, F23):
        return (F13, F23)
    k, p = period_preperiod(t)
    s = t
    hit = None
    for n in range(k + p):
        if s in (F13, F23):
            hit = n
            break
        s = double(s)
    if hit is None:
        raise ValueError(f"{fmt_angle(t)} is uni-accessible")
    length = Fraction(1, 3 * 2 ** (hit - 1))
    partner = angle(t - length) if s == F13 else angle(t + length)
    return tuple(sorted((t, partner)))


def ray_equivalence_class(theta, max_depth: int = 64):
    """Basilica-side ray equivalence class of theta: a singleton for
    uni-accessible angles, the root-leaf pair for preimages of alpha.

    max_depth bounds the pullback search (the orbit is finite so the bound
    only matters as a sanity guard).
    """
    t = angle(theta)
    k, p = period_preperiod(t)
    if k + p > max_depth:
        raise ValueError("angle orbit exceeds requested pullback depth")
    if biaccessible(t):
        return set(ray_pair(t))
    return {t}


# --- intrinsic addresses -------------------------------------------------

@dataclass(frozen=True)
class IntrinsicAddress:
    """Eventually periodic binary sequence s_1 s_2 ... (spine-side bits)."""

    preperiod: tuple
    period: tuple

    def bits(self, n: int):
        out = list(self.preperiod)
        if self.period:
            while len(out) < n:
                out.extend(self.period)
        else:
            out.extend([0] * (n - len(out)))
        return tuple(out[:n])

    def to_json(self):
        return {"preperiod": list(self.preperiod), "period": list(self.period)}

    @staticmethod
    def make(pre, per):
        pre, per = list(pre), list(per)
        if per and all(b == 0 for b in per):
            per = []
        if per:
            n = len(per)
            for d in range(1, n + 1):
                if n % d == 0 and per == per[:d] * (n // d):
                    per = per[:d]
                    break
            while pre and pre[-1] == per[-1]:
                pre.pop()
                per = [per[-1]] + per[:-1]
        else:
            while pre and pre[-1] == 0:
                pre.pop()
        return IntrinsicAddress(tuple(pre), tuple(per))


def intrinsic_address(ray_angle) -> IntrinsicAddress:
    """Intrinsic (spine-side) address of the bubble ray with angle theta.

    The ray's angle is the negative of the external angle of its landing
    point; the bits are the binary digits of that external angle, with the
    terminating expansion chosen when the orbit hits the spine ends.
    """
    t = angle(-angle(ray_angle))
    k, p = period_preperiod(t)
    bits = []
    s = t
    for _ in range(k + p):
        if s == 0:
            return IntrinsicAddress.make(bits, ())
        if s == HALF:
            bits.append(1)
            return IntrinsicAddress.make(bits, ())
        b = 1 if s >= HALF else 0
        bits.append(b)
        s = double(s)
    if all(b == 1 for b in bits[k:]):
        # non-terminating tail ...111 cannot arise from a reduced fraction
        raise AssertionError("unexpected all-ones cycle")
    return IntrinsicAddress.make(bits[:k], bits[k:])


def angle_of(address: IntrinsicAddress) -> Fraction:
    """Angle of the bubble ray with the given intrinsic address:
    -sum s_i 2^-i mod 1, evaluated exactly via the geometric series.
    """
    pre, per = address.preperiod, address.period
    val = Fraction(0)
    for i, b in enumerate(pre, start=1):
        val += Fraction(b, 2 ** i)
    if per:
        block = 0
        for b in per:
            block = 2 * block + b
        m = len(per)
        tail = Fraction(block, 2 ** m - 1)
        val += tail / 2 ** len(pre)
    return angle(-val)


def adjacency_to_depth(max_generation: int):
    """Bubble adjacency graph to a generation bound: list of (child, parent)
    word pairs plus the root leaf at each touching point.
    """
    edges = []
    for g in range(1, max_generation + 1):
        for w in bubbles_of_generation(g):
            edges.append(
                {
                    "bubble": word_str(w),
                    "generation": g,
                    "predecessor": word_str(predecessor(w)),
                    "root_leaf": [fmt_angle(x) for x in root_leaf(w)],
                    "half": "R" if in_right_half(w) else "L",
                    "spine_side": spine_side(w),
                }
            )
    return edges


def word_str(word: Word) -> str:
    return "".join("+" if e == PLUS else "-" for e in word) or "o"


def word_from_str(s: str) -> Word:
    if s == "o":
        return ()
    return tuple(PLUS if ch == "+" else MINUS for ch in s)
