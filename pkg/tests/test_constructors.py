import math
from fractions import Fraction

import mpmath
import pytest

from distchaos import BudgetError, ContractError, ParameterError
from distchaos import harmonic as hc
from distchaos.constructors import (ConstructionParams, WeightSchedule, WitnessTailBound,
                                    antiderivative_chain, build_irregular_entire,
                                    build_irregular_harmonic, build_periodic_point,
                                    build_weight_star, choose_block_parameters,
                                    derivative_readout, growth_constants, selection_log_bound)
from distchaos.density import IndexSet
from distchaos.series import EntireSeries, orbit_norms


def selection_oracle(a, K, order, A, C, terms=200):
    """High-precision sum of the first ``terms`` terms plus a geometric remainder."""
    mpmath.mp.dps = 50
    a2 = a * a
    total = mpmath.mpf(0)
    for n in range(2 * a2, 2 * a2 + terms):
        total += C * mpmath.mpf(n) ** A * mpmath.mpf(K) ** (n * order) / mpmath.factorial((n - a2) * order)
    n = 2 * a2 + terms
    last = C * mpmath.mpf(n) ** A * mpmath.mpf(K) ** (n * order) / mpmath.factorial((n - a2) * order)
    rho = (mpmath.mpf(n + 1) / n) ** A * mpmath.mpf(K) ** order / mpmath.fprod(
        (n - a2) * order + i for i in range(1, order + 1))
    assert rho < 0.5
    return total + last / (1 - rho)


class TestBlockParameters:
    def test_first_anchor_matches_oracle(self):
        p = choose_block_parameters("D", 2, 1)
        # scan a = 1, 2, ... with the independent oracle
        a = 1
        while not selection_oracle(a, 1, 1, 1, 1) < 1:
            a += 1
        assert p.anchors_a[0] == a <= 4
        assert p.anchors_b[0] == 2 * a * a + 1

    def test_log_bound_agrees_with_oracle(self):
        for a, K, order in [(1, 1, 1), (2, 1, 1), (3, 2, 2), (5, 3, 1)]:
            ours = selection_log_bound(a, K, order, 1.0, 1.0)
            exact = float(mpmath.log(selection_oracle(a, K, order, 1, 1)))
            # both bound the same series from above and agree to rounding
            assert ours == pytest.approx(exact, abs=1e-12)

    def test_anchor_chain(self):
        p = choose_block_parameters("D", 1, 3)
        assert p.anchors_a == (2, 82, 180875602)
        assert p.anchors_b[:2] == (9, 13449)
        assert all(x <= y for x, y in zip(p.anchors_a, p.anchors_a[1:]))
        for K, (a, b) in enumerate(zip(p.anchors_a, p.anchors_b), start=1):
            assert b == 2 * a * a + 1
            assert selection_log_bound(a, K, 1, 1.0, 1.0) < -math.log(K)

    def test_minimality(self):
        p = choose_block_parameters((1, 1), 2, 2, A_const=2.0, C_const=3.0)
        a1, a2 = p.anchors_a
        if a1 > 1:
            assert selection_log_bound(a1 - 1, 1, 2, 2.0, 3.0) >= 0
        if a2 > p.anchors_b[0] ** 2 + 1:
            assert selection_log_bound(a2 - 1, 2, 2, 2.0, 3.0) >= -math.log(2)

    def test_budget(self):
        with pytest.raises(BudgetError):
            choose_block_parameters("D", 1, 1, A_const=1.0, C_const=1e300, budget=2)

    def test_contract(self):
        with pytest.raises(ContractError):
            ConstructionParams("D", 1, 1.0, 1.0, (2, 5), (9, 100))
        with pytest.raises(ContractError):
            ConstructionParams("D", 1, 1.0, 1.0, (2,), (8,))
        with pytest.raises(ParameterError):
            choose_block_parameters("D", 1, 0)

    def test_json_round_trip(self):
        p = choose_block_parameters((1, 0), 2, 2).with_cap(40)
        assert ConstructionParams.from_json(p.to_json()) == p


class TestWeights:
    def test_clamp(self):
        s = build_weight_star(lambda n: float(n * n), IndexSet(((1, 50),)), 50)
        assert s.omega_tilde == tuple(float(n) for n in range(1, 51))

    def test_empty_support(self):
        s = build_weight_star(lambda n: math.log(n + 1), IndexSet(), 30)
        assert all(w == 0 for w in s.omega_star)

    def test_sqrt_example(self):
        s = build_weight_star(lambda n: math.sqrt(n), IndexSet(((4, 16),)), 20)
        assert s.star(9) == 3.0 and s.star(17) == 0

    def test_sequence_input_and_round_trip(self):
        s = build_weight_star([Fraction(n, 2) for n in range(1, 11)], IndexSet(((2, 5),)), 10)
        assert s.star(4) == 2 and s.star(6) == 0
        assert WeightSchedule.from_json(s.to_json()) == s

    def test_negative_weights_rejected(self):
        with pytest.raises(ContractError):
            build_weight_star([1, -1], IndexSet(), 2)


def _entire(cap, K_max=2):
    p = choose_block_parameters("D", 1, K_max).with_cap(cap)
    return p, build_weight_star(lambda n: math.log(n + 1), p.B, cap)


class TestEntireWitness:
    def test_zero_weights(self):
        p = choose_block_parameters("D", 1, 1).with_cap(10)
        s = build_weight_star(lambda n: 0.0, p.B, 10)
        assert all(c == 0 for c in build_irregular_entire(p, s).coeffs)

    def test_single_weight(self):
        p = choose_block_parameters("D", 1, 1).with_cap(8)
        s = build_weight_star([0, 0, 0, 0, 2, 0, 0, 0], IndexSet(((5, 5),)), 8)
        f = build_irregular_entire(p, s)
        assert f == EntireSeries.e_n(5).scale(Fraction(2)) + EntireSeries.zero(8)

    def test_readout_matches_schedule(self):
        p, s = _entire(2000)
        f = build_irregular_entire(p, s)
        for j in p.B.members_upto(2000):
            assert f.derivative_at_zero(j) == Fraction(s.tilde(j))
        assert f.derivative_at_zero(5) == 0

    def test_inexact_coefficients_agree(self):
        p, s = _entire(300)
        f = build_irregular_entire(p, s)
        g = build_irregular_entire(p, s, exact=False)
        for a, b in zip(f.coeffs[::17], g.coeffs[::17]):
            assert float(b) == pytest.approx(float(a), rel=1e-14)

    def test_near_zero_on_first_blocks(self):
        p, s = _entire(2000)
        f = build_irregular_entire(p, s)
        for K, (lo, hi) in enumerate(p.A.intervals, start=1):
            r = float(K)
            o = orbit_norms(f, min(hi, 2000), r, tail_bound=WitnessTailBound(p.B))
            for j in range(lo, min(hi, 2000) + 1):
                assert o[j] + o.tail_errors[j] < 1 / K

    def test_tail_bound_is_sparse(self):
        p, _ = _entire(10)
        tb = WitnessTailBound(p.B)
        assert tb(5) == 0 and tb(9) == pytest.approx(9 / math.factorial(9))
        assert tb.log_bound(13449) == pytest.approx(math.log(13449) - math.lgamma(13450))

    def test_short_schedule_rejected(self):
        p, s = _entire(20)
        with pytest.raises(ParameterError):
            build_irregular_entire(p.with_cap(30), s)


class TestHarmonicWitness:
    def test_single_index(self):
        p = choose_block_parameters((1, 0), 2, 1).with_cap(7)
        s = build_weight_star([0] * 6 + [3, 0], IndexSet(((7, 7),)), 8)
        h = build_irregular_harmonic(p, s)
        assert h.is_homogeneous() and h.degree == 7
        assert derivative_readout(h, (1, 0), 7) == 3
        assert derivative_readout(h, (1, 0), 6) == 0

    def test_zero(self):
        p = choose_block_parameters((1, 0), 2, 1).with_cap(5)
        s = build_weight_star(lambda n: 0.0, p.B, 6)
        assert build_irregular_harmonic(p, s).is_zero()

    def test_readouts_and_harmonicity(self):
        p = choose_block_parameters((1, 0), 2, 2).with_cap(60)
        s = build_weight_star(lambda n: math.log(n + 1), p.B, 61)
        h = build_irregular_harmonic(p, s)
        assert hc.is_harmonic(h)
        for j in range(1, 61):
            assert derivative_readout(h, (1, 0), j) == Fraction(s.star(j))

    def test_three_dimensional_partial_sums_are_harmonic(self):
        p = choose_block_parameters((0, 1, 1), 3, 1, A_const=0.5, C_const=0.4).with_cap(4)
        s = build_weight_star(lambda n: float(n), IndexSet(((1, 5),)), 5)
        chain = antiderivative_chain((0, 1, 1), 5)
        for n, H in enumerate(chain):
            g = H
            for _ in range(n):
                g = hc.partial_derivative(g, (0, 1, 1))
            assert g == chain[0]
        h = build_irregular_harmonic(p, s, chain=chain)
        assert hc.is_harmonic(h)

    def test_budget(self):
        p = choose_block_parameters((1, 0), 2, 1).with_cap(50)
        s = build_weight_star(lambda n: 1.0, p.B, 51)
        with pytest.raises(BudgetError):
            build_irregular_harmonic(p, s, max_degree=20)

    def test_growth_constants_two_dimensions(self):
        g = growth_constants(2, (1, 0))
        # the majorant is sqrt(2) r e^r exactly
        assert g["A"] == 1.0 and g["C"] == pytest.approx(math.sqrt(2), rel=1e-9)


class TestPeriodicPoint:
    def test_exp_truncation(self):
        one = EntireSeries((Fraction(1),))
        w, defect, tail = build_periodic_point("D", one, 1, 12)
        assert w == EntireSeries.exp(12)
        # D w - w is minus the top monomial
        assert defect == pytest.approx(1 / math.factorial(12))
        assert tail == pytest.approx(defect)

    def test_zero(self):
        w, defect, _ = build_periodic_point("D", EntireSeries.zero(3), 2, 5)
        assert all(c == 0 for c in w.coeffs) and defect == 0

    def test_defect_decreases(self):
        z = EntireSeries((Fraction(1), Fraction(2), Fraction(0), Fraction(1)))
        defects = [build_periodic_point("D", z, 2, L).defect for L in (10, 20, 40)]
        assert defects[0] > defects[1] > defects[2] > 0

    def test_harmonic_shift(self):
        x = hc.MultiIndexPoly.variable(2, 0)
        w, defect, tail = build_periodic_point((1, 0), x, 1, 6)
        assert hc.is_harmonic(w)
        assert defect == pytest.approx(tail)
