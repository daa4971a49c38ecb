from fractions import Fraction as F

import pytest

from matebench.ratfunc import Poly, RationalFunction1, poly_gcd, squarefree


def test_poly_arith():
    p = Poly([1, 2, 1])  # 1 + 2a + a^2
    q = Poly([-1, 1])    # a - 1
    assert (p * q).c == [F(-1), F(-1), F(1), F(1)]
    assert (p + q).c == [F(0), F(3), F(1)]
    assert p.degree == 2 and Poly([]).degree == -1
    assert p(2) == 9 and p(1j) == (1j + 1) ** 2


def test_divmod_gcd():
    p = Poly([-1, 0, 1])   # a^2 - 1
    q = Poly([1, 1])       # a + 1
    quo, rem = p.divmod(q)
    assert rem.is_zero() and quo.c == [F(-1), F(1)]
    g = poly_gcd(Poly([-2, 0, 2]), Poly([1, 1]))
    assert g.c == [F(1), F(1)]


def test_squarefree():
    assert squarefree(Poly([-1, 0, 1]))
    assert not squarefree(Poly([1, 2, 1]))  # (a+1)^2


def test_rational_cancellation():
    f = RationalFunction1(Poly([0, 1, 1]), Poly([0, 2]))  # a(1+a) / 2a
    assert f.num.c == [F(1, 2), F(1, 2)] and f.den.c == [F(1)]
    assert f.degree == 1
    with pytest.raises(ZeroDivisionError):
        RationalFunction1(Poly([1]), Poly([]))


def test_rational_eval_pole():
    f = RationalFunction1(Poly([1]), Poly([-2, 1]))  # 1/(a-2)
    assert f(3 + 0j) == 1
    assert f(2 + 0j) == complex("inf")
