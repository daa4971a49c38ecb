import math
from fractions import Fraction as F

import pytest

from matebench import basilica as bas
from matebench import dynamics as dyn
from matebench import parameter as par


def test_xi_closed_forms():
    x1 = par.xi(1)
    assert x1.num.c == [F(0), F(-1)] and x1.den.c == [F(1)]
    x2 = par.xi(2)
    # 1/(a-2)
    assert x2.den.c == [F(-2), F(1)] and x2.num.c == [F(1)]
    x3 = par.xi(3)
    # a(a-2)^2/(2a-3), denominator normalized monic
    assert x3.den.c == [F(-3, 2), F(1)]
    assert x3.num.c == [F(0), F(2), F(-2), F(1, 2)]


def test_xi_matches_orbit_numerically():
    # float Horner loses digits past n ~ 6 (huge coefficients); the exact
    # object is the ground truth, numeric evaluation is only spot-checked
    for n in (2, 3, 5):
        f = par.xi(n)
        for a in (2.3 + 0.4j, -0.7 + 1.1j):
            orb = dyn.iterate(a, -1.0 + 0j, n)
            assert abs(f(a) - orb[n]) < 1e-6 * max(1.0, abs(orb[n]))


def test_xi_coprime_invariant():
    # the fast cancellation must produce coprime num/den (sympy oracle)
    import sympy as sp

    av = sp.symbols("a")
    for n in range(1, 9):
        num, den = par._xi_raw(n)
        pn = sum(sp.Rational(c.numerator, c.denominator) * av ** i for i, c in enumerate(num.c))
        pd = sum(sp.Rational(c.numerator, c.denominator) * av ** i for i, c in enumerate(den.c))
        assert sp.gcd(pn, pd) == 1
        xi_sym = -av
        for _ in range(n - 1):
            xi_sym = sp.cancel(av / (xi_sym * (xi_sym + 2)))
        assert sp.simplify(pn / pd - xi_sym) == 0


def test_degree_count_identity():
    for n in range(1, 11):
        assert par.xi(n).degree == bas.count_bubbles(n, "right")


def test_capture_centers_examples():
    assert par.capture_centers(1) == []
    c2 = par.capture_centers(2)
    assert len(c2) == 1 and abs(c2[0] - 2) < 1e-12
    c3 = par.capture_centers(3)
    assert len(c3) == 1 and abs(c3[0] - 1.5) < 1e-12
    assert len(par.capture_centers(4)) == 3


def test_capture_center_counts_match_right_basilica():
    # fresh generation-n centers correspond to generation-(n-1) bubbles in R
    for n in range(2, 9):
        assert len(par.capture_centers(n)) == bas.count_bubbles(n - 1, "right")


def test_fresh_poles_simple():
    for n in range(2, 9):
        assert par.centers_are_simple(n)


def test_capture_generation_examples():
    r = par.capture_generation(2.0 + 0j)
    assert r.generation == 2 and r.status == "captured"
    r = par.capture_generation(10.0 + 0j)
    assert r.generation == 0 and r.status == "p-infinity"
    # center of the rabbit-like mating component: critically periodic, never
    # captured
    r = par.capture_generation((3 + math.sqrt(3) * 1j) / 2, budget=120)
    assert r.status == "not-captured-within-budget"


def test_capture_generation_centers_exact():
    for n in range(2, 9):
        for c in par.capture_centers(n):
            r = par.capture_generation(c)
            assert r.generation == n, (n, c, r)


def test_param_internal_ray_gen2_lands_at_three():
    tr = par.param_internal_ray(2.0 + 0j, 2, F(0))
    assert tr.landing is not None
    assert abs(tr.landing - 3.0) < 1e-6
    # at the landing parameter the critical orbit meets p_a
    a0 = tr.landing
    z = dyn.iterate(a0, -1.0 + 0j, 2)[2]
    assert abs(z - dyn.p_fixed(a0)) < 1e-6


def test_param_ray_potential_decreases():
    tr = par.param_internal_ray(2.0 + 0j, 2, F(0), potential_low=1e-4)
    assert tr.potentials[0] > tr.potentials[-1]
    # |g_n| -> 1 along the ray means log-potential -> 0
    assert tr.potentials[-1] < 2e-4


def test_psi_address_gen2():
    addr = par.psi_address(2.0 + 0j, 2)
    assert addr == (bas.PLUS,)
    assert bas.in_right_half(addr)


def test_psi_addresses_distinct_and_predecessor_closed():
    cat = []
    for n in range(2, 7):
        for c in par.capture_centers(n):
            cat.append((n, c, par.psi_address(c, n)))
    addrs = [a for (_, _, a) in cat]
    assert len(set(addrs)) == len(addrs)
    by_gen = {}
    for (n, c, a) in cat:
        by_gen.setdefault(len(a), set()).add(a)
    # predecessor of each address is realized by a lower-generation
    # parabubble (psi preserves the touching tree)
    for (n, c, a) in cat:
        pred = bas.predecessor(a)
        if pred == ():
            continue
        assert pred in by_gen.get(len(pred), set()), (a, pred)


def test_wake_descriptor():
    w = par.wake(F(1, 7), F(2, 7))
    assert w.portrait_angles == (F(1, 7), F(2, 7), F(4, 7))
    assert abs(w.parabolic_root - (4 / 3 + 4 * math.sqrt(3) / 9 * 1j)) < 1e-12
    with pytest.raises(ValueError):
        par.wake(F(2, 7), F(4, 7))  # not the characteristic arc


def test_wake_membership():
    w = par.wake(F(1, 7), F(2, 7))
    m = par.wake_membership(w, 2.5 + 0.5j, depth=60)
    assert m.member and m.conclusive
    assert abs(m.multiplier) > 1
    m10 = par.wake_membership(w, 10.0 + 0j, depth=40)
    assert not m10.member
    m_mirror = par.wake_membership(w, 2.5 - 0.5j, depth=60)
    assert not m_mirror.member


def test_wake_for_target():
    w = par.wake_for_target(F(1, 6))
    assert (w.t_minus, w.t_plus) == (F(1, 7), F(2, 7))
    # 1/10 sits in the 1/4-limb wake (1/15, 2/15)
    w2 = par.wake_for_target(F(1, 10))
    assert (w2.t_minus, w2.t_plus) == (F(1, 15), F(2, 15))
    # the dyadic angle 1/4 also lands inside the 1/3-limb wake
    w3 = par.wake_for_target(F(1, 4))
    assert (w3.t_minus, w3.t_plus) == (F(1, 7), F(2, 7))


def test_angle_window():
    w = par.wake(F(1, 7), F(2, 7))
    lo, hi = par.angle_window(F(1, 6), w.portrait_angles, 0)
    assert (lo, hi) == (F(1, 7), F(2, 7))
    lo1, hi1 = par.angle_window(F(1, 6), w.portrait_angles, 3)
    assert lo <= lo1 < hi1 <= hi
    assert lo1 < F(1, 6) < hi1


def test_fresh_poles_simple_deep_oracle():
    # squarefree through n = 10 via the sympy modular gcd (the exact
    # Fraction Euclid is exponential at degree 171)
    import sympy as sp

    av = sp.symbols("a")
    for n in (9, 10):
        poly = par.fresh_center_poly(n)
        pn = sum(
            sp.Rational(c.numerator, c.denominator) * av ** i
            for i, c in enumerate(poly.c)
        )
        assert sp.gcd(pn, sp.diff(pn, av)) == 1


def test_xi_blowup_guard():
    with pytest.raises(ValueError):
        par.xi(25)


def test_wake_roots_are_parabolic():
    # the bounding parameter rays land at a parameter whose fixed point has
    # multiplier exactly e^{2 pi i / q} (rotation number of the portrait)
    import cmath

    for tm, tp, q in [(F(1, 7), F(2, 7), 3), (F(1, 15), F(2, 15), 4),
                      (F(1, 31), F(2, 31), 5)]:
        w = par.wake(tm, tp)
        fps = dyn._cubic_roots(w.parabolic_root)
        lam = cmath.exp(2j * cmath.pi / q)
        best = min(abs(dyn.d_rmap(w.parabolic_root, z) - lam) for z in fps)
        assert best < 1e-12
