import math
from fractions import Fraction as F

import pytest

from matebench import puzzle as puz

CYCLE_13 = [F(1, 7), F(2, 7), F(4, 7)]


def test_depth0_pieces():
    P = puz.QuadraticPuzzle(F(1, 6), CYCLE_13, 6)
    assert [p.word for p in P.pieces(0)] == [(1,), (2,), (3,)]
    arcs = P.arcs
    assert {(a.start, a.end) for a in arcs} == {
        (F(4, 7), F(1, 7)), (F(1, 7), F(2, 7)), (F(2, 7), F(4, 7))
    }
    # the critical sector corresponds to the long arc
    assert P.critical_digit == 1


def test_markov_exhaustive():
    P = puz.QuadraticPuzzle(F(1, 6), CYCLE_13, 8)
    assert P.markov_check()


def test_piece_flags():
    P = puz.QuadraticPuzzle(F(1, 6), CYCLE_13, 5)
    for d in range(4):
        pieces = P.pieces(d)
        assert sum(1 for p in pieces if p.critical) == 1
        assert sum(1 for p in pieces if p.critical_value) == 1
    assert P.piece_of_angle(F(1, 6), 3) == P.value_word(3)


def test_trichotomy_marks():
    svals = [math.inf, 2.0, -1.0, 0.0]
    marks = puz.marks_from_s_values(svals, 3)
    col1 = [marks[d][1] for d in range(4)]
    assert col1 == [puz.CRITICAL, puz.CRITICAL, puz.SEMI, puz.OFF]
    col2 = [marks[d][2] for d in range(4)]
    assert col2 == [puz.OFF] * 4
    col0 = [marks[d][0] for d in range(4)]
    assert col0 == [puz.CRITICAL] * 4


def test_tableau_c_i_nonrecurrent():
    t = puz.build_tableau_angles(F(1, 6), CYCLE_13, depth=10, columns=16)
    assert t.classification == "non-recurrent"
    assert max(s for s in t.s_values[1:]) <= 0
    assert puz.validate_tableau_rules(t) == []


def test_tableau_real_period3_periodic():
    t = puz.build_tableau_orbit(-1.77, depth=14, columns=20)
    assert t.classification == "periodic"
    assert puz.validate_tableau_rules(t) == []
    assert math.isinf(t.s_values[3])


def test_tableau_fibonacci_recurrent():
    t = puz.build_tableau_orbit(-1.8705286321646448, depth=150, columns=300)
    assert t.classification == "recurrent"
    assert puz.validate_tableau_rules(t) == []


def test_all_critical_single_column():
    t = puz.Tableau(3, 0, [[puz.CRITICAL]] * 4, [math.inf], "periodic")
    assert puz.validate_tableau_rules(t) == []


def test_injected_modulus_fault():
    t = puz.build_tableau_angles(F(1, 6), CYCLE_13, depth=4, columns=6)
    # attach formal moduli obeying the rules, then break one critical cell
    D, N = t.depth, t.columns
    mu = [[1.0 for _ in range(N + 1)] for _ in range(D + 1)]
    for n in range(N):
        for d in range(D, 0, -1):
            if t.marks[d][n] == puz.CRITICAL:
                mu[d - 1][n + 1] = 2 * mu[d][n]
            elif t.marks[d][n] == puz.OFF:
                mu[d - 1][n + 1] = mu[d][n]
            else:
                mu[d - 1][n + 1] = 1.5 * mu[d][n]
    t.moduli = mu
    base = puz.validate_tableau_rules(t)
    assert all(v.rule.startswith("column") is False or True for v in base)
    # break the iterate relation at a critical cell
    d0 = 2
    t.moduli[d0 - 1][1] = 100.0
    viol = puz.validate_tableau_rules(t)
    assert any(v.rule == "modulus-critical" and v.position == (d0, 0) for v in viol)


def test_injected_column_fault():
    t = puz.build_tableau_angles(F(1, 6), CYCLE_13, depth=4, columns=6)
    t.marks[2][3] = puz.CRITICAL
    t.marks[0][3] = puz.OFF
    assert puz.validate_tableau_rules(t)


def test_children_periodic_single_chain():
    t = puz.build_tableau_orbit(-1.77, depth=20, columns=24)
    kids = puz.children(t, 0)
    assert kids == [3]
    tree = puz.descendant_tree(t, 0, 4)
    assert all(len(v) == 1 for g, v in tree.items() if g >= 1)


def test_fibonacci_descendant_counts():
    t = puz.build_tableau_orbit(-1.8705286321646448, depth=400, columns=760)
    tree = puz.descendant_tree(t, 1, 4)
    for g in range(1, 5):
        assert len(tree[g]) >= 2 ** g, (g, tree)


def test_divergence_diagnostic():
    t = puz.build_tableau_orbit(-1.8705286321646448, depth=400, columns=760)
    diag = puz.divergence_diagnostic(t, generations=6)
    # per-generation contribution bounded below by M0
    assert all(g >= diag.m0 - 1e-12 for g in diag.generation_sums)
    # partial sums strictly increase as generations complete
    assert all(b > a for a, b in zip(diag.partial_sums, diag.partial_sums[1:]))
    assert diag.partial_sums[-1] > 10 * diag.m0


def test_divergence_refuses_periodic():
    t = puz.build_tableau_orbit(-1.77, depth=20, columns=24)
    with pytest.raises(ValueError):
        puz.divergence_diagnostic(t)


WAKE_A = 2.5 + 0.5j


def test_sector_locator_critical_value():
    loc = puz.SectorLocator(WAKE_A, CYCLE_13)
    target = puz._target_value_itinerary(F(1, 6), CYCLE_13, 5)
    got = loc.itinerary(-WAKE_A, 5)
    assert got == target


def test_critical_value_itinerary_match():
    assert puz.critical_value_itinerary_match(WAKE_A, WAKE_A, F(1, 6), 3)
    assert not puz.critical_value_itinerary_match(10 + 0j, WAKE_A, F(1, 6), 3)


def test_bubble_puzzle_catalog_matches_quadratic():
    bp = puz.bubble_puzzle(WAKE_A, F(1, 6), depth=6, collar_samples=48)
    q = puz.QuadraticPuzzle(F(1, 6), CYCLE_13, 6)
    for d in range(7):
        assert [p.word for p in bp.piece_catalog(d)] == [
            p.word for p in q.pieces(d)
        ]


def test_bubble_puzzle_nondegeneracy_margin():
    bp = puz.bubble_puzzle(WAKE_A, F(1, 6), depth=3, collar_samples=48)
    m = puz.realized_piece_margin(bp, 1)
    assert m > 0.01
