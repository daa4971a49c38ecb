"""Dense univariate polynomials and rational functions over Q (exact)."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


class Poly:
    """Polynomial with Fraction coefficients, low degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence = ()):
        self.c = _trim(Fraction(x) for x in coeffs)

    @property
    def degree(self) -> int:
        return len(self.c) - 1 if self.c else -1

    def is_zero(self) -> bool:
        return not self.c

    def __eq__(self, other):
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(tuple(self.c))

    def __add__(self, other):
        n = max(len(self.c), len(other.c))
        a = self.c + [Fraction(0)] * (n - len(self.c))
        b = other.c + [Fraction(0)] * (n - len(other.c))
        return Poly([x + y for x, y in zip(a, b)])

    def __sub__(self, other):
        n = max(len(self.c), len(other.c))
        a = self.c + [Fraction(0)] * (n - len(self.c))
        b = other.c + [Fraction(0)] * (n - len(other.c))
        return Poly([x - y for x, y in zip(a, b)])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Poly([x * other for x in self.c])
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return Poly(out)

    __rmul__ = __mul__

    def __neg__(self):
        return Poly([-x for x in self.c])

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = [Fraction(0)] * max(0, len(self.c) - len(other.c) + 1)
        r = list(self.c)
        dl = other.degree
        lead = other.c[-1]
        while len(r) - 1 >= dl and _trim(r):
            k = len(r) - 1 - dl
            f = r[-1] / lead
            q[k] = f
            for j, y in enumerate(other.c):
                r[k + j] -= f * y
            r = _trim(r)
            r = r if r else [Fraction(0)]
            if len(r) == 1 and r[0] == 0:
                r = []
                break
        return Poly(q), Poly(r)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def monic(self) -> "Poly":
        if self.is_zero():
            return Poly()
        return Poly([x / self.c[-1] for x in self.c])

    def derivative(self) -> "Poly":
        return Poly([i * x for i, x in enumerate(self.c)][1:])

    def __call__(self, x):
        out = 0
        for coeff in reversed(self.c):
            out = out * x + (
                complex(coeff) if isinstance(x, complex) else coeff
            )
        return out

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        terms = []
        for i, x in enumerate(self.c):
            if x:
                terms.append(f"{x}*a^{i}" if i else f"{x}")
        return "Poly(" + " + ".join(terms) + ")"

    @staticmethod
    def const(v):
        return Poly([Fraction(v)])

    @staticmethod
    def x():
        return Poly([0, 1])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else Poly()


def squarefree(p: Poly) -> bool:
    if p.degree <= 1:
        return True
    return poly_gcd(p, p.derivative()).degree == 0


class RationalFunction1:
    """Rational function num/den in one variable, gcd-cancelled, with the
    denominator normalized monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = poly_gcd(num, den)
        if g.degree > 0:
            num = num // g
            den = den // g
        lead = den.c[-1]
        self.num = Poly([x / lead for x in num.c])
        self.den = den.monic()

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunction1)
            and self.num == other.num
            and self.den == other.den
        )

    def __call__(self, x):
        dv = self.den(x)
        nv = self.num(x)
        if dv == 0:
            return complex("inf") if isinstance(x, complex) else None
        return nv / dv

    def __repr__(self):
        return f"({self.num!r}) / ({self.den!r})"

    @staticmethod
    def from_poly(p: Poly):
        return RationalFunction1(p, Poly.const(1))
