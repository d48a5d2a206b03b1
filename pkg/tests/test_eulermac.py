import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import loglog_slope
from waringsums import arith, eulermac
from waringsums.eulermac import LatticeSumSpec


def brute_progression(q, r, X, theta, k, variant):
    total = []
    P = math.floor(X)
    for x in range(-P, P + 1):
        if (x - r) % q != 0:
            continue
        if variant == "positive" and x <= 0:
            continue
        base = X**k - x**k
        if base < 0:
            continue
        total.append(float(base) ** theta)
    return math.fsum(total)


class TestProgressionDirect:
    def test_zero_exponent_counts_lattice_points(self):
        spec = LatticeSumSpec(3, 1, 100, 0.0, 2)
        count = math.floor((100 - 1) / 3) - math.ceil(-(100 + 1) / 3) + 1
        assert eulermac.progression_power_sum(spec) == count

    def test_exact_endpoint_membership(self):
        # (X - r)/q = 3 exactly: the boundary term contributes 1 at theta=0
        spec = LatticeSumSpec(3, 1, 10, 0.0, 2)
        assert eulermac.progression_power_sum(spec) == 7  # h = -3..3

    def test_closed_form_quadratic(self):
        X = 37
        spec = LatticeSumSpec(1, 0, X, 1.0, 2)
        assert eulermac.progression_power_sum(spec) == pytest.approx(
            X * (4 * X**2 - 1) / 3
        )

    def test_positive_variant_count(self):
        spec = LatticeSumSpec(1, 0, 7.5, 0.0, 2)
        assert eulermac.progression_power_sum(spec, "positive") == 7

    def test_positive_excludes_left_endpoint_exactly(self):
        # r = 0: h > 0 strictly, so x = 0 never contributes
        spec = LatticeSumSpec(2, 0, 8, 0.0, 3)
        assert eulermac.progression_power_sum(spec, "positive") == 4  # x=2,4,6,8

    def test_against_brute_force(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            q = int(rng.integers(1, 7))
            r = int(rng.integers(-4, 9))
            X = float(rng.integers(20, 90)) + float(rng.choice([0.0, 0.5, 0.25]))
            theta = float(rng.choice([0.0, 0.5, 1.0, 1.5, 2.5]))
            k = int(rng.choice([2, 3, 4]))
            variant = str(rng.choice(["two_sided", "positive"]))
            spec = LatticeSumSpec(q, r, X, theta, k)
            got = eulermac.progression_power_sum(spec, variant)
            want = brute_progression(q, r, X, theta, k, variant)
            assert got == pytest.approx(want, rel=1e-12, abs=1e-9)

    def test_fraction_argument(self):
        spec = LatticeSumSpec(3, 1, Fraction(21, 2), 0.0, 2)
        assert eulermac.progression_power_sum(spec) == brute_progression(
            3, 1, 10.5, 0.0, 2, "two_sided"
        )

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            LatticeSumSpec(0, 1, 10, 0.0, 2)
        with pytest.raises(ValueError):
            LatticeSumSpec(1, 1, -3, 0.0, 2)
        with pytest.raises(ValueError):
            LatticeSumSpec(1, 1, 10, -0.5, 2)


class TestProgressionAsymptotic:
    def test_zero_exponent_main_term(self):
        spec = LatticeSumSpec(4, 1, 1000, 0.0, 3, N=1)
        main, psi, scale = eulermac.progression_power_sum_asymptotic(spec)
        assert main == pytest.approx(2 * 1000 / 4, rel=1e-12)
        assert psi == 0.0
        assert scale == pytest.approx(1.0)

    def test_quadratic_main_term(self):
        spec = LatticeSumSpec(1, 0, 50, 1.0, 2, N=1)
        main, _, _ = eulermac.progression_power_sum_asymptotic(spec)
        assert main == pytest.approx(4 * 50**3 / 3, rel=1e-12)

    def test_positive_psi_single_term_below_k(self):
        # N <= k admits only nu = 0: psi = X^{k theta} * B_1({-r/q})
        spec = LatticeSumSpec(4, 1, 200, 2.5, 3, N=2)
        _, psi, _ = eulermac.progression_power_sum_asymptotic(spec, "positive")
        expect = 200.0 ** (3 * 2.5) * arith.periodic_bernoulli(1, -1 / 4)
        assert psi == pytest.approx(expect, rel=1e-12)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            eulermac.progression_power_sum_asymptotic(
                LatticeSumSpec(3, 1, 100, 2.5, 2, N=4)
            )
        with pytest.raises(ValueError):
            eulermac.progression_power_sum_asymptotic(
                LatticeSumSpec(3, 1, 100, 0.0, 2, N=2)
            )

    def test_positive_requires_odd_k(self):
        with pytest.raises(ValueError):
            eulermac.progression_power_sum_asymptotic(
                LatticeSumSpec(3, 1, 100, 2.5, 2, N=2), "positive"
            )

    def test_two_sided_error_has_endpoint_order(self):
        # All Bernoulli boundary terms vanish for the two-sided sum, so the
        # true error is carried by the endpoint region at order (k-1)*theta,
        # strictly inside the guaranteed O(X^{k theta} (q/X)^{N-1}) scale.
        # X = 1 mod 3 keeps the endpoint phases identical across sizes.
        xs = [1000, 2503, 6301, 15853]
        errs = []
        for X in xs:
            spec = LatticeSumSpec(3, 1, X, 2.5, 2, N=2)
            direct = eulermac.progression_power_sum(spec)
            main, _, scale = eulermac.progression_power_sum_asymptotic(spec)
            errs.append(abs(direct - main))
            assert abs(direct - main) <= 0.01 * scale
        assert loglog_slope(xs, errs) == pytest.approx((2 - 1) * 2.5, abs=0.2)

    def test_psi_second_correction_term(self):
        # theta = 4.5 admits N = 4 and with it the nu = 1 boundary term,
        # of size X^{k theta} (q/X)^k; including it must cancel the
        # residual left by the nu = 0 term down to (near) the rounding
        # floor of the direct sum.  X kept small enough that the target
        # term is resolvable in doubles.
        X = 2000
        spec = LatticeSumSpec(4, 1, X, 4.5, 3, N=4)
        direct = eulermac.progression_power_sum(spec, "positive")
        main, psi_full, scale = eulermac.progression_power_sum_asymptotic(
            spec, "positive"
        )
        _, psi_nu0, _ = eulermac.progression_power_sum_asymptotic(
            LatticeSumSpec(4, 1, X, 4.5, 3, N=2), "positive"
        )
        err_nu0 = abs(direct - main - psi_nu0)
        err_full = abs(direct - main - psi_full)
        assert err_full <= err_nu0 / 50.0
        assert err_full <= 1e-4 * scale

    def test_psi_term_lowers_error_order(self):
        xs = [1000, 3163, 10000]
        without, with_psi = [], []
        for X in xs:
            spec = LatticeSumSpec(4, 1, X, 2.5, 3, N=2)
            direct = eulermac.progression_power_sum(spec, "positive")
            main, psi, _ = eulermac.progression_power_sum_asymptotic(spec, "positive")
            without.append(abs(direct - main))
            with_psi.append(abs(direct - main - psi))
        k_theta = 3 * 2.5
        assert loglog_slope(xs, without) == pytest.approx(k_theta, abs=0.1)
        assert loglog_slope(xs, with_psi) <= k_theta - 1 + 0.25


class TestLatticeSums:
    def test_dimension_one_reduces_exactly(self):
        rng = np.random.default_rng(17)
        for _ in range(100):
            q = int(rng.integers(1, 8))
            r = int(rng.integers(-5, 12))
            X = int(rng.integers(15, 250))
            theta = float(rng.choice([0.0, 0.5, 1.0, 2.5]))
            k = int(rng.choice([2, 3, 5]))
            variant = str(rng.choice(["two_sided", "positive"]))
            one = LatticeSumSpec(q, (r,), X, theta, k)
            scalar = LatticeSumSpec(q, r, X, theta, k)
            assert eulermac.lattice_power_sum(one, variant) == eulermac.progression_power_sum(scalar, variant)

    def test_disk_lattice_point_count(self):
        X = 20.5
        spec = LatticeSumSpec(1, (0, 0), X, 0.0, 2)
        got = eulermac.lattice_power_sum(spec)
        want = sum(
            1
            for x in range(-20, 21)
            for y in range(-20, 21)
            if x * x + y * y <= X * X
        )
        assert got == want

    def test_positive_pair_against_brute_force(self):
        spec = LatticeSumSpec(3, (1, 2), 40, 1.5, 3)
        got = eulermac.lattice_power_sum(spec, "positive")
        terms = []
        for x1 in range(1, 41):
            if x1 % 3 != 1:
                continue
            for x2 in range(1, 41):
                if x2 % 3 != 2:
                    continue
                base = 40**3 - x1**3 - x2**3
                if base >= 0:
                    terms.append(float(base) ** 1.5)
        assert got == pytest.approx(math.fsum(terms), rel=1e-12)

    def test_odd_k_two_sided_budget_handling(self):
        # negative entries relax the budget; enumeration must not prune them
        spec = LatticeSumSpec(2, (1, 0), 9, 1.0, 3)
        got = eulermac.lattice_power_sum(spec)
        terms = []
        for x1 in range(-9, 10):
            if (x1 - 1) % 2 != 0:
                continue
            for x2 in range(-9, 10):
                if x2 % 2 != 0:
                    continue
                base = 9**3 - x1**3 - x2**3
                if base >= 0 and abs(x1) <= 9 and abs(x2) <= 9:
                    terms.append(float(base))
        assert got == pytest.approx(math.fsum(terms), rel=1e-12)

    def test_asymptotic_two_sided_scaled_error_bounded(self):
        for X in (50, 100, 200):
            spec = LatticeSumSpec(1, (0, 0), X, 2.0, 2, N=2)
            direct = eulermac.lattice_power_sum(spec)
            (term,), scale = eulermac.lattice_power_sum_asymptotic(spec)
            assert abs(direct - term) <= 0.01 * scale

    def test_consistency_of_one_dimensional_expansions(self):
        # the l = 1 multidimensional expansion must reproduce main + psi
        spec = LatticeSumSpec(4, (3,), 500, 2.5, 3, N=2)
        terms, scale_l = eulermac.lattice_power_sum_asymptotic(spec, "positive")
        scalar = LatticeSumSpec(4, 3, 500, 2.5, 3, N=2)
        main, psi, scale_u = eulermac.progression_power_sum_asymptotic(scalar, "positive")
        assert terms[0] == pytest.approx(main, rel=1e-12)
        assert terms[1] == pytest.approx(psi, rel=1e-12)
        assert scale_l == pytest.approx(scale_u, rel=1e-12)

    def test_leading_term_is_density_times_volume(self):
        spec = LatticeSumSpec(5, (1, 2, 3), 300, 1.5, 3, N=1)
        terms, _ = eulermac.lattice_power_sum_asymptotic(spec, "positive")
        X, q, k, theta, l = 300.0, 5, 3, 1.5, 3
        ratio = (
            math.gamma(1 + theta)
            * math.gamma(1 + 1 / k) ** l
            / math.gamma(1 + theta + l / k)
        )
        assert terms[0] == pytest.approx(X ** (k * theta) * (X / q) ** l * ratio, rel=1e-12)

    def test_order_cap_for_positive_variant(self):
        with pytest.raises(ValueError):
            eulermac.lattice_power_sum_asymptotic(
                LatticeSumSpec(3, (1, 2), 100, 9.5, 3, N=5), "positive"
            )  # N must stay <= k + 1


class TestSymmetricBernoulli:
    def test_order_zero_is_one(self):
        assert eulermac.symmetric_bernoulli(7, (1, 2, 3), 0).value == 1.0

    def test_convention_minus_one(self):
        assert eulermac.symmetric_bernoulli(7, (1, 2), -1).value == 0.0

    def test_half_residue_vanishes(self):
        assert eulermac.symmetric_bernoulli(2, (1,), 1).value == pytest.approx(0.0)

    def test_pair_of_zero_residues(self):
        assert eulermac.symmetric_bernoulli(1, (0, 0), 2).value == pytest.approx(0.25)

    def test_against_product_expansion(self):
        import itertools

        q, rs = 7, (1, 2, 4, 6)
        ys = [arith.periodic_bernoulli(1, -r / q) for r in rs]
        for m in range(len(rs) + 1):
            want = math.fsum(
                math.prod(c) for c in itertools.combinations(ys, m)
            )
            got = eulermac.symmetric_bernoulli(q, rs, m).value
            assert got == pytest.approx(want, rel=1e-12, abs=1e-15)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            eulermac.symmetric_bernoulli(3, (1, 2), 3)


class TestEulerMaclaurin:
    def test_sum_of_integers(self):
        val, rem = eulermac.euler_maclaurin_sum(
            [lambda x: x, lambda x: 1.0], 0.0, 20.0, 1
        )
        assert val == pytest.approx(210.0, rel=1e-12)
        assert rem == pytest.approx(0.0, abs=1e-10)

    def test_counts_integers_in_half_open_interval(self):
        val, _ = eulermac.euler_maclaurin_sum(
            [lambda x: 1.0, lambda x: 0.0], 0.3, 9.7, 1
        )
        assert val == pytest.approx(9.0, abs=1e-9)

    def test_sum_of_cubes(self):
        val, _ = eulermac.euler_maclaurin_sum(
            [lambda x: x**3, lambda x: 3 * x**2, lambda x: 6.0 * x], 0.0, 20.0, 2
        )
        assert val == pytest.approx(44100.0, rel=1e-9)

    def test_reproduces_progression_sum_via_composed_derivatives(self):
        # F(y) = y^theta (integer theta), G(x) = X^k - (qx + r)^k; the sum
        # over (hmin - 1/2, hmax] equals the two-sided progression sum.
        q, r, X, theta, k, K = 3, 1, 50, 2, 2, 2
        spec = LatticeSumSpec(q, r, X, float(theta), k)
        direct = eulermac.progression_power_sum(spec)
        hmin = math.ceil(Fraction(-(X + r), q))
        hmax = math.floor(Fraction(X - r, q))
        f_derivs = [
            lambda y: y**2,
            lambda y: 2.0 * y,
            lambda y: 2.0,
            lambda y: 0.0,
        ]

        def g_deriv(j):
            def g(x):
                m = q * x + r
                if j == 0:
                    return float(X**k) - m**k
                if j > k:
                    return 0.0
                c = math.factorial(k) // math.factorial(k - j)
                return -c * q**j * m ** (k - j)

            return g

        g_derivs = [g_deriv(j) for j in range(K + 1)]
        derivs = [lambda x: f_derivs[0](g_derivs[0](x))]
        for order in range(1, K + 1):
            derivs.append(arith.compose_nth_derivative(f_derivs, g_derivs, order))
        val, _ = eulermac.euler_maclaurin_sum(derivs, hmin - 0.5, float(hmax), K)
        assert val == pytest.approx(direct, rel=1e-8)

    def test_validation(self):
        with pytest.raises(ValueError):
            eulermac.euler_maclaurin_sum([lambda x: x], 0.0, 5.0, 1)
        with pytest.raises(ValueError):
            eulermac.euler_maclaurin_sum([lambda x: x, lambda x: 1.0], 5.0, 0.0, 1)
        with pytest.raises(ValueError):
            eulermac.euler_maclaurin_sum([lambda x: x, lambda x: 1.0], 0.0, 5.0, 0)

    def test_quadrature_failure_is_reported(self):
        jump = lambda x: -1.0 if x < 0.31 else 1.0
        with pytest.raises(eulermac.QuadratureError):
            eulermac._adaptive_simpson(jump, 0.0, 1.0, 1e-14, max_depth=12)
