import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from distchaos import ContractError, ParameterError
from distchaos.series import (EntireSeries, GrowthEnvelope, critical_exponent, differentiate,
                              exp_type_estimate, integrate, log_m2_norm, m2_norm, mp_norm,
                              orbit_norms, sup_norm, translate)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=20)
polys = st.lists(fractions, min_size=1, max_size=11).map(lambda c: EntireSeries(tuple(c)))


def poly(*coeffs):
    return EntireSeries(tuple(Fraction(c) for c in coeffs))


class TestOperators:
    def test_power_rule(self):
        assert differentiate(poly(0, 0, 1)) == poly(0, 2)

    def test_shift_of_normalised_monomials(self):
        for n in range(1, 8):
            assert differentiate(EntireSeries.e_n(n)) == EntireSeries.e_n(n - 1)

    def test_exp_truncation_drops_one_degree(self):
        assert differentiate(EntireSeries.exp(50)) == EntireSeries.exp(49)

    def test_cap_zero(self):
        d = differentiate(poly(3))
        assert d.cap == 0 and d.coeffs == (0,)

    def test_integrate_one(self):
        assert integrate(poly(1)) == poly(0, 1)

    def test_iterated_integral_of_one(self):
        g = poly(1)
        for n in range(1, 21):
            g = integrate(g)
            assert g == EntireSeries.e_n(n)

    @settings(max_examples=60, deadline=None)
    @given(polys)
    def test_d_after_s_is_identity(self, g):
        assert differentiate(integrate(g)) == g

    def test_translate_examples(self):
        assert translate(poly(0, 1), 3) == poly(3, 1)
        assert translate(poly(0, 0, 1), 1) == poly(1, 2, 1)

    @settings(max_examples=40, deadline=None)
    @given(polys, fractions)
    def test_translate_value_at_zero(self, f, a):
        assert translate(f, a).coeffs[0] == f(a)

    @settings(max_examples=30, deadline=None)
    @given(polys, polys, fractions)
    def test_translate_is_multiplicative(self, f, g, a):
        # pad both factors so the truncated product is the full polynomial product
        cap = f.cap + g.cap
        F, G = f + EntireSeries.zero(cap), g + EntireSeries.zero(cap)
        assert translate(F * G, a) == translate(F, a) * translate(G, a)

    def test_translate_refuses_larger_cap(self):
        with pytest.raises(ContractError):
            translate(poly(1, 1), 0, cap_out=3)


class TestNorms:
    def test_simple_values(self):
        assert m2_norm(poly(1), 7.0) == pytest.approx(1.0)
        assert m2_norm(poly(0, 1), 2.0) == pytest.approx(2.0)

    def test_exp_matches_bessel(self):
        oracle = mpmath.sqrt(mpmath.besseli(0, 10))
        assert m2_norm(EntireSeries.exp(200), 5.0) == pytest.approx(float(oracle), rel=1e-8)

    def test_large_radius_stays_finite_in_logs(self):
        lv = log_m2_norm(EntireSeries.exp(400), 150.0)
        assert lv == pytest.approx(150 - 0.25 * math.log(4 * math.pi * 150), rel=1e-4)

    def test_sup_of_cube(self):
        assert sup_norm(poly(0, 0, 0, 1), 2.0) == pytest.approx(8.0, rel=1e-12)

    def test_l1_of_constant(self):
        assert mp_norm(poly(1), 3.0, 1) == pytest.approx(1.0)

    def test_l4_closed_form(self):
        assert mp_norm(poly(1, 1), 1.0, 4) == pytest.approx(6 ** 0.25, rel=1e-12)

    def test_quadrature_precondition(self):
        with pytest.raises(ParameterError):
            mp_norm(EntireSeries.exp(20), 1.0, 3, quad_points=40)

    def test_radius_must_be_positive(self):
        with pytest.raises(ParameterError):
            m2_norm(poly(1), 0.0)

    @settings(max_examples=25, deadline=None)
    @given(polys, st.floats(0.2, 10.0))
    def test_quadrature_matches_coefficient_formula(self, f, r):
        if all(c == 0 for c in f.coeffs):
            return
        assert mp_norm(f, r, 2) == pytest.approx(m2_norm(f, r), rel=1e-10)

    @settings(max_examples=25, deadline=None)
    @given(polys, st.floats(0.2, 3.0))
    def test_norms_increase_with_p(self, f, r):
        vals = [mp_norm(f, r, p) for p in (1, 1.5, 2, 3, math.inf)]
        for lo, hi in zip(vals, vals[1:]):
            assert lo <= hi * (1 + 1e-9) + 1e-300


class TestOrbits:
    def test_cube(self):
        o = orbit_norms(poly(0, 0, 0, 1), 4, 1.0, tail_bound=0)
        assert o.values == pytest.approx([1, 3, 6, 6, 0], rel=1e-12)

    def test_horizon_past_cap_needs_a_tail_bound(self):
        with pytest.raises(ContractError):
            orbit_norms(poly(0, 0, 0, 1), 4, 1.0)

    def test_monomial_shift(self):
        o = orbit_norms(EntireSeries.e_n(5), 5, 2.0, p=2)
        for n in range(6):
            assert o[n] == pytest.approx(m2_norm(EntireSeries.e_n(5 - n), 2.0), rel=1e-12)

    def test_exp_orbit_is_flat(self):
        o = orbit_norms(EntireSeries.exp(120), 40, 1.0, p=2)
        assert max(o.values) / min(o.values) - 1 < 1e-12

    def test_tail_bound_sets_faithful_horizon(self):
        f = EntireSeries.exp(30)
        o = orbit_norms(f, 40, 1.0, p=2, tail_bound=lambda n: 1 / math.factorial(n))
        assert o.faithful_horizon < 30
        assert o.tail_errors[0] < 1e-25


class TestGrowth:
    def test_exp_type_of_constant(self):
        assert exp_type_estimate(poly(1), [1, 5, 20]) == 0.0

    def test_exp_type_of_exp(self):
        grid = np.linspace(1, 20, 20)
        est = exp_type_estimate(EntireSeries.exp(200), grid)
        assert est == pytest.approx(1.0, abs=1e-12)
        vals = [exp_type_estimate(EntireSeries.exp(200), [r]) for r in grid]
        assert all(v <= 1 + 1e-12 for v in vals)

    def test_exp_type_of_cubic(self):
        f = poly(0, 0, 0, 1)
        for r in (5.0, 20.0, 100.0):
            assert exp_type_estimate(f, [r]) == pytest.approx(3 * math.log(r) / r, rel=1e-9)

    def test_envelope_positive(self):
        env = GrowthEnvelope(a=0.25, phi="log", scale=2.0)
        for r in (0.1, 1.0, 50.0):
            assert env(r) > 0
        assert env.log_value(3.0) == pytest.approx(math.log(2 * math.log(math.e + 3)) + 3 - 0.25 * math.log(3))

    def test_envelope_round_trip(self):
        env = GrowthEnvelope(a=0.5, phi="table", table=((1.0, 2.0), (10.0, 4.0)))
        assert GrowthEnvelope.from_json(env.to_json()) == env

    def test_critical_exponents(self):
        assert critical_exponent(2) == 0.25
        assert critical_exponent(4) == 0.125
        assert critical_exponent(1.5, upper=False) == pytest.approx(1 / 3)


class TestJson:
    def test_exact_round_trip(self):
        f = EntireSeries.exp(30)
        assert EntireSeries.from_json(f.to_json()) == f

    def test_float_round_trip(self):
        f = EntireSeries((0.5, -1.25, 3e-7))
        g = EntireSeries.from_json(f.to_json())
        assert g.coeffs == f.coeffs and not g.exact

    def test_tiny_coefficients_survive(self):
        f = EntireSeries((mpmath.mpf(1), mpmath.mpf(1) / mpmath.factorial(400)))
        g = EntireSeries.from_json(f.to_json())
        assert mpmath.almosteq(g.coeffs[1], f.coeffs[1], rel_eps=1e-15)
