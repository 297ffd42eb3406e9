import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from distchaos import ContractError, ParameterError, SingularityError
from distchaos import harmonic as hc
from distchaos.harmonic import MultiIndexPoly as P

X2, Y2 = P.variable(2, 0), P.variable(2, 1)
X3, Y3, Z3 = (P.variable(3, k) for k in range(3))


def random_harmonic(rng, N, max_degree):
    h = P(N)
    for m in range(max_degree + 1):
        for b in hc.harmonic_basis(N, m):
            c = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
            if c:
                h = h + b * P.constant(N, c)
    return h


class TestAlgebra:
    def test_laplacian_examples(self):
        assert hc.laplacian(X2 * X2 - Y2 * Y2).is_zero()
        assert hc.laplacian(X2 * X2) == P.constant(2, 2)
        assert hc.laplacian(X3 * X3 + Y3 * Y3 + Z3 * Z3) == P.constant(3, 6)

    def test_partial_derivative(self):
        assert hc.partial_derivative(X2 * X2 - Y2 * Y2, (1, 0)) == X2 * P.constant(2, 2)

    def test_derivative_of_matching_degree_is_constant(self):
        for H in hc.harmonic_basis(3, 3):
            for alpha in hc.monomials(3, 3):
                assert hc.partial_derivative(H, alpha).degree <= 0

    def test_iterated_alpha_derivative(self):
        rng = random.Random(3)
        h = random_harmonic(rng, 3, 6)
        alpha = (1, 0, 1)
        twice = hc.partial_derivative(hc.partial_derivative(h, alpha), alpha)
        assert twice == hc.partial_derivative(h, (2, 0, 2))

    def test_decomposition(self):
        h = P.constant(2, 1) + X2 + X2 * X2 - Y2 * Y2
        parts = hc.homogeneous_decompose(h)
        assert parts == [P.constant(2, 1), X2, X2 * X2 - Y2 * Y2]
        assert all(hc.is_harmonic(p) for p in parts)

    def test_json_round_trip(self):
        h = random_harmonic(random.Random(1), 3, 4)
        assert P.from_json(h.to_json()) == h


class TestDimensions:
    def test_values(self):
        assert hc.dim_harmonic(2, 0) == 1
        assert hc.dim_harmonic(2, 7) == 2
        assert hc.dim_harmonic(3, 2) == 5

    @pytest.mark.parametrize("N", [2, 3, 4])
    def test_against_sympy_nullspace(self, N):
        for m in range(0, 6):
            A, ncols = hc.laplacian_matrix(N, m)
            rows = [[row.get(j, 0) for j in range(ncols)] for row in A]
            rank = sympy.Matrix(rows).rank() if rows else 0
            assert hc.dim_harmonic(N, m) == ncols - rank

    def test_growth_order(self):
        for N in (2, 3, 4, 5):
            ratios = [hc.dim_harmonic(N, m) / m ** (N - 2) for m in range(1, 201)]
            assert max(ratios) <= N
            # leading coefficient of d_m is 2 / (N-2)!
            assert ratios[-1] == pytest.approx(2 / math.factorial(N - 2), rel=0.05)

    def test_bases(self):
        b = hc.harmonic_basis(3, 1)
        assert len(b) == 3
        b2 = hc.harmonic_basis(2, 2)
        assert len(b2) == 2
        span = sympy.Matrix([[e.terms.get(m, 0) for m in hc.monomials(2, 2)] for e in b2])
        target = sympy.Matrix([[1, 0, -1], [0, 1, 0]])
        # same row space as {x^2 - y^2, xy}
        assert span.rank() == 2 and span.col_join(target).rank() == 2
        for e in hc.harmonic_basis(3, 2):
            assert hc.is_harmonic(e) and e.is_homogeneous()

    def test_basis_export(self):
        doc = hc.harmonic_basis(3, 2).to_json()
        assert doc["degree"] == 2 and len(doc["elements"]) == 5


class TestSphere:
    def test_moments(self):
        assert hc.sphere_moment(3, (1, 2, 0)) == 0
        assert hc.sphere_moment(3, (2, 0, 0)) == Fraction(1, 3)
        t = 2 * np.pi * np.arange(64) / 64
        assert float(hc.sphere_moment(2, (2, 0))) == pytest.approx(np.mean(np.cos(t) ** 2))

    def test_moment_against_gamma_formula(self):
        for N in (2, 3, 5):
            for beta in [(2,) + (0,) * (N - 1), (4, 2) + (0,) * (N - 2), (2,) * N]:
                num = mpmath.fprod(mpmath.gamma((b + 1) / mpmath.mpf(2)) for b in beta)
                val = num * mpmath.gamma(N / mpmath.mpf(2)) / (
                    mpmath.gamma((sum(beta) + N) / mpmath.mpf(2)) * mpmath.pi ** (N / mpmath.mpf(2)))
                assert float(hc.sphere_moment(N, beta)) == pytest.approx(float(val), rel=1e-14)

    def test_inner_products(self):
        assert hc.inner_product_r(P.constant(3, 1), P.constant(3, 1), 5) == 1
        assert hc.inner_product_r(X3, X3, 1) == Fraction(1, 3)
        with pytest.raises(ParameterError):
            hc.inner_product_r(X2, X3, 1)

    def test_orthogonality_across_degrees(self):
        rng = random.Random(7)
        for N in (2, 3):
            for j in range(4):
                for k in range(j + 1, 5):
                    g = random_harmonic(rng, N, j).homogeneous_part(j)
                    h = random_harmonic(rng, N, k).homogeneous_part(k)
                    assert hc.inner_product_r(g, h, Fraction(3, 2)) == 0

    def test_norm_examples(self):
        assert hc.m2_sphere(X3, 2) == pytest.approx(2 / math.sqrt(3))
        assert hc.m2_sphere(P.constant(3, 1) + X3, 1) == pytest.approx(math.sqrt(1 + 1 / 3))
        H = hc.harmonic_basis(3, 3)[1]
        assert hc.m2_sphere(H, 3) == pytest.approx(27 * hc.m2_sphere(H, 1))

    def test_parseval(self):
        h = random_harmonic(random.Random(2), 3, 5)
        parts = hc.homogeneous_decompose(h)
        assert hc.inner_product_r(h, h, 2) == sum(hc.inner_product_r(p, p, 2) for p in parts)

    def test_sup_norm_examples(self):
        assert hc.sup_norm_sphere(X2, 1) == pytest.approx(1.0, rel=1e-10)
        assert hc.sup_norm_sphere(X2 * X2 - Y2 * Y2, 2) == pytest.approx(4.0, rel=1e-10)
        with pytest.raises(ParameterError):
            hc.sup_norm_sphere(P.variable(4, 0), 1.0)

    def test_sup_norm_dominates_l2_and_obeys_dimension_bound(self):
        rng = random.Random(11)
        for N in (2, 3):
            for m in range(1, 11, 3):
                H = random_harmonic(rng, N, m).homogeneous_part(m)
                if H.is_zero():
                    continue
                sup = hc.sup_norm_sphere(H, 1.0, samples=96)
                l2 = hc.m2_sphere(H, 1)
                assert l2 <= sup * (1 + 1e-9)
                assert sup <= math.sqrt(hc.dim_harmonic(N, m)) * l2 * (1 + 1e-9)

    def test_constant_derivative_bound(self):
        rng = random.Random(5)
        for N in (2, 3):
            for m in range(1, 9):
                H = random_harmonic(rng, N, m).homogeneous_part(m)
                if H.is_zero():
                    continue
                for alpha in hc.monomials(N, m)[:3]:
                    c = abs(hc.partial_derivative(H, alpha).terms.get((0,) * N, 0))
                    for r in (0.5, 1, 2, 5):
                        bound = math.factorial(m) * math.sqrt(hc.dim_harmonic(N, m)) * r ** -m \
                            * hc.m2_sphere(H, r)
                        assert float(c) <= bound * (1 + 1e-12)


class TestAntiderivatives:
    def test_first_and_second_antiderivative_of_one(self):
        one = P.constant(2, 1)
        assert hc.antiderivative_coord(one, 1, 1) == X2
        P2 = hc.antiderivative_coord(one, 2, 1)
        assert P2 == (X2 * X2 - Y2 * Y2) * P.constant(2, Fraction(1, 2))
        assert hc.m2_sphere_sq(P2, 1) == Fraction(1, 8)
        assert hc.antiderivative_alpha(one, (1, 0)) == X2

    def test_identity_and_bound_on_corpus(self):
        for N in (2, 3):
            for m in range(0, 3):
                for H in hc.harmonic_basis(N, m):
                    for alpha in [(1,) + (0,) * (N - 1), (0, 2) + (0,) * (N - 2),
                                  (1, 1) + (0,) * (N - 2)]:
                        Ha = hc.antiderivative_alpha(H, alpha)
                        assert hc.is_harmonic(Ha)
                        assert hc.partial_derivative(Ha, alpha) == H
                        if N == 2:
                            ratio = hc.norm_ratio_sq(Ha, H)
                            assert ratio <= Fraction(1, math.factorial(sum(alpha)) ** 2)

    def test_rejects_non_harmonic(self):
        with pytest.raises(ContractError):
            hc.antiderivative_coord(X2 * X2, 1, 1)
        with pytest.raises(ContractError):
            hc.antiderivative_coord(P.constant(2, 1) + X2, 1, 1)

    def test_compatibility_is_reported(self):
        rep = hc.compatibility_check(P.constant(2, 1), 2, 1, 1)
        assert rep["equal"] in (True, False)
        assert rep["derivative_identity"] is True

    def test_report_keys(self):
        rep = hc.antiderivative_report(P.constant(3, 1), 2, 2)
        assert rep["identity"] and rep["holds"]


class TestConstants:
    def test_c_coeff_values(self):
        assert hc.c_coeff(1, 0, 2) == Fraction(1, 2)
        assert hc.c_coeff(2, 0, 2) == Fraction(1, 8)
        # independent big-integer evaluation
        f = math.factorial
        assert hc.c_coeff(1, 1, 3) == Fraction(f(3), f(1) * f(3) * 5)

    def test_estimate_dominates(self):
        for N in range(2, 6):
            for m in range(0, 11):
                for n in range(0, 51):
                    if N + 2 * m + n >= 3:
                        assert hc.c_coeff(n, m, N) <= hc.c_coeff_estimate(n, m, N)

    def test_cN(self):
        assert hc.cN_constant(2) == 1.0
        mpmath.mp.dps = 40
        oracle = 3 * (mpmath.mpf(4) / 27 * mpmath.mpf(256) / 3125) ** (mpmath.mpf(1) / 6)
        assert hc.cN_constant(3) == pytest.approx(float(oracle), abs=1e-12)
        gaps = [hc.cN_constant(N) - math.sqrt(N / 2) for N in (10, 20, 50, 100)]
        assert all(a > b for a, b in zip(gaps, gaps[1:]))

    def test_translation_constant(self):
        assert hc.translation_constant(2, Fraction(1), Fraction(2)) == 2
        assert hc.translation_constant(3, Fraction(1), Fraction(1)) == 6

    def test_calibration(self):
        cal = hc.calibrate_antiderivative_constants(3, max_order=3, max_degree=1)
        assert cal["C"] > 0 and cal["A"] >= 0
        for k, v in cal["per_order"].items():
            assert v <= cal["C"] * k ** cal["A"] * (1 + 1e-12)


class TestTranslationAndPoisson:
    def test_translate_examples(self):
        assert hc.translate_harmonic(X3, (1, 0, 0)) == X3 + P.constant(3, 1)
        h = random_harmonic(random.Random(4), 3, 4)
        a = (Fraction(1, 2), Fraction(-1, 3), 2)
        ha = hc.translate_harmonic(h, a)
        assert ha((0, 0, 0)) == h(a)
        assert hc.is_harmonic(ha)
        assert all(hc.is_harmonic(p) for p in hc.homogeneous_decompose(ha))

    def test_kernel_center_and_positivity(self):
        for N in (2, 3):
            x0 = np.zeros(N)
            y = np.eye(N)[0] * 2.0
            assert hc.poisson_kernel(x0, 2.0, x0, y) == pytest.approx(1 / (hc.sphere_area(N) * 2.0 ** (N - 1)))
            assert hc.poisson_kernel(x0, 2.0, np.full(N, 0.5), y) > 0
        with pytest.raises(SingularityError):
            hc.poisson_kernel([0, 0], 1.0, [1, 0], [1, 0])

    def test_reproduction_in_three_dimensions(self):
        rng = np.random.default_rng(0)
        for H in hc.harmonic_basis(3, 3):
            x = rng.uniform(-0.4, 0.4, 3)
            val = hc.poisson_integral(H, [0, 0, 0], 1.0, x, nodes=48)
            assert val == pytest.approx(float(H(tuple(Fraction(v) for v in x))), abs=1e-8)
