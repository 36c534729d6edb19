import itertools
import math

import numpy as np
import pytest

import pmaxevt as pm

SQRT2 = math.sqrt(2.0)

# one-time high-precision quadrature value (40-digit arithmetic), frozen:
# Hellinger distance between the family-2 laws at alpha = 1 and alpha = 2
HELLINGER_H21_H22 = 0.4355410358627448


def uniform_handle():
    return pm.law_handle(pm.PMaxLawSpec(2, 1.0))


class TestHellinger:
    def test_identical_densities(self):
        h3 = pm.law_handle(pm.PMaxLawSpec(3))
        rep = pm.hellinger(h3, h3, tol=1e-11)
        assert rep.value <= 1e-10
        assert rep.kind == "hellinger"

    def test_disjoint_supports(self):
        w3 = pm.glogpd_handle(pm.GLogParetoSpec(3))
        w6 = pm.glogpd_handle(pm.GLogParetoSpec(6))
        rep = pm.hellinger(w3, w6, tol=1e-11)
        assert abs(rep.value - SQRT2) <= 1e-10

    def test_frozen_regression_value(self):
        rep = pm.hellinger(uniform_handle(), pm.law_handle(pm.PMaxLawSpec(2, 2.0)), tol=1e-12)
        assert abs(rep.value - HELLINGER_H21_H22) <= 1e-9

    def test_symmetry(self):
        f = pm.law_handle(pm.PMaxLawSpec(3))
        g = pm.kth_limit_handle(pm.PMaxLawSpec(3), 2)
        a = pm.hellinger(f, g, tol=1e-10)
        b = pm.hellinger(g, f, tol=1e-10, check_mass=False)
        assert abs(a.value - b.value) <= a.error_estimate + b.error_estimate + 1e-13

    def test_mass_precondition(self):
        half = lambda x: 0.5 * np.ones_like(np.asarray(x, dtype=float))
        with pytest.raises(ValueError, match="integrates to"):
            pm.hellinger(half, uniform_handle(), support=(0.0, 1.0))

    def test_bare_callables_need_support(self):
        f = lambda x: np.ones_like(np.asarray(x, dtype=float))
        with pytest.raises(ValueError, match="support"):
            pm.hellinger(f, f)


class TestTotalVariation:
    def test_identical(self):
        h3 = pm.law_handle(pm.PMaxLawSpec(3))
        assert pm.total_variation(h3, h3, tol=1e-11).value <= 1e-10

    def test_disjoint(self):
        w3 = pm.glogpd_handle(pm.GLogParetoSpec(3))
        w6 = pm.glogpd_handle(pm.GLogParetoSpec(6))
        assert abs(pm.total_variation(w3, w6, tol=1e-11).value - 1.0) <= 1e-10

    def test_uniform_vs_second_largest_limit(self):
        # closed form: (1/2) int_0^1 |1 + log x| dx = exp(-1)
        rep = pm.total_variation(uniform_handle(), pm.kth_limit_handle(pm.PMaxLawSpec(2, 1.0), 2), tol=1e-12)
        assert abs(rep.value - math.exp(-1.0)) <= 1e-10


class TestKolmogorov:
    def test_identical(self):
        h3 = pm.law_handle(pm.PMaxLawSpec(3))
        assert pm.kolmogorov(h3, h3).value <= 1e-12

    def test_below_tv(self):
        f = uniform_handle()
        g = pm.law_handle(pm.PMaxLawSpec(2, 2.0))
        ks = pm.kolmogorov(f, g)
        tv = pm.total_variation(f, g, tol=1e-10)
        assert ks.value <= tv.value + 1e-9

    def test_needs_cdfs(self):
        f = lambda x: np.ones_like(np.asarray(x, dtype=float))
        with pytest.raises(ValueError, match="cdf"):
            pm.kolmogorov(f, f, support=(0.0, 1.0))


class TestDistanceProperties:
    PAIR_HANDLES = [
        pm.law_handle(pm.PMaxLawSpec(1, 2.0)),
        pm.law_handle(pm.PMaxLawSpec(2, 1.0)),
        pm.law_handle(pm.PMaxLawSpec(3)),
        pm.law_handle(pm.PMaxLawSpec(5, 0.5)),
        pm.law_handle(pm.PMaxLawSpec(6)),
        pm.kth_limit_handle(pm.PMaxLawSpec(3), 2),
    ]

    @pytest.mark.parametrize("f,g", list(itertools.combinations(PAIR_HANDLES, 2)), ids=lambda h: getattr(h, "label", ""))
    def test_inequality_chain(self, f, g):
        h = pm.hellinger(f, g, tol=1e-9, check_mass=False)
        t = pm.total_variation(f, g, tol=1e-9, check_mass=False)
        k = pm.kolmogorov(f, g)
        slack = h.error_estimate + t.error_estimate + 1e-10
        assert 0.0 <= h.value <= SQRT2 + slack
        assert 0.0 <= t.value <= 1.0 + slack
        assert h.value**2 / 2.0 <= t.value + slack
        assert t.value <= h.value + slack
        assert k.value <= t.value + slack + 1e-9


class TestHellingerUpperBound:
    def test_ratio_one_gives_tail_only(self):
        # synthetic density f = w/n scaled so that n f / w is exactly 1
        spec = pm.PMaxLawSpec(2, 1.0)
        n, x0 = 10, 0.6**10
        f = lambda x: np.atleast_1d(pm.hazard_w(spec, x)) / n
        bound = pm.hellinger_upper_bound(f, spec, x0, n, c=1.0, support=(x0, 1.0))
        assert abs(bound.integral_term) <= 1e-12
        want_tail = 2 * x0 - x0 * math.log(x0)
        assert abs(bound.tail_term - want_tail) <= 1e-14
        assert abs(bound.total - (math.sqrt(want_tail) + 0.1)) <= 1e-9

    def test_dominates_uniform_catalog(self):
        base = pm.build_perturbed(2, 1.0, L=1.0, delta=1.0, g_choice="uniform")
        spec = pm.PMaxLawSpec(2, 1.0)
        rep = pm.exact_vs_limit("hellinger", base, spec, 10, x0=0.6**10)
        assert rep.bound is not None
        assert rep.bound.total >= rep.value

    def test_nonincreasing_in_n(self):
        base = pm.build_perturbed(2, 1.0, g_choice="zero")
        spec = pm.PMaxLawSpec(2, 1.0)
        totals = [pm.exact_vs_limit("hellinger", base, spec, n).bound.total for n in (10, 100, 1000)]
        assert totals[0] >= totals[1] >= totals[2]

    def test_interior_zero_density_is_domain_error(self):
        spec = pm.PMaxLawSpec(2, 1.0)

        def f(x):
            x = np.asarray(x, dtype=float)
            return np.where(x >= 0.5, 2.0, 0.0)  # vanishes inside (x0, 1)

        with pytest.raises(ValueError, match="nonpositive"):
            pm.hellinger_upper_bound(f, spec, 0.2, 5, support=(0.2, 1.0))

    def test_n_validation(self):
        spec = pm.PMaxLawSpec(2, 1.0)
        f = lambda x: np.ones_like(np.asarray(x, dtype=float))
        with pytest.raises(ValueError):
            pm.hellinger_upper_bound(f, spec, 0.5, 0, support=(0.0, 1.0))


class TestTopKVariationalBound:
    def test_k1_reduces_to_max_structure(self):
        base = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice="envelope")
        spec = pm.PMaxLawSpec(2, 1.0)
        n = 10
        constants = pm.derive_norming(spec, n)
        f = pm.normalized_handle(pm.perturbed_handle(base), constants)
        x0 = base.x0**n
        b1 = pm.top_k_variational_bound(f, spec, 1, n, x0)
        eq = pm.hellinger_upper_bound(f, spec, x0, n)
        assert abs(b1.integral_term - eq.integral_term) <= 1e-10
        assert b1.joint_term == 0.0
        # tail term follows the k-th largest display with H_0 = 0
        assert abs(b1.tail_term - float(pm.kth_limit_cdf(spec, 1, x0))) <= 1e-15
        assert any("H_0" in note for note in b1.notes)

    def test_zero_perturbation_kills_integral_terms(self):
        base = pm.build_perturbed(2, 1.0, g_choice="zero")
        spec = pm.PMaxLawSpec(2, 1.0)
        n = 20
        f = pm.normalized_handle(pm.perturbed_handle(base), pm.derive_norming(spec, n))
        b = pm.top_k_variational_bound(f, spec, 3, n, base.x0**n, mc_samples=5000)
        assert abs(b.integral_term) <= 1e-10

    def test_tail_term_from_kth_limit(self):
        base = pm.build_perturbed(2, 1.0, g_choice="zero")
        spec = pm.PMaxLawSpec(2, 1.0)
        n, k = 10, 2
        x0 = 0.6**n
        f = pm.normalized_handle(pm.perturbed_handle(base), pm.derive_norming(spec, n))
        b = pm.top_k_variational_bound(f, spec, k, n, x0, mc_samples=5000)
        want = float(pm.kth_limit_cdf(spec, 2, x0)) + 2 * float(pm.kth_limit_cdf(spec, 1, x0))
        assert abs(b.tail_term - want) <= 1e-13

    def test_joint_term_reported_both_ways(self):
        base = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice="envelope")
        spec = pm.PMaxLawSpec(2, 1.0)
        n = 10
        f = pm.normalized_handle(pm.perturbed_handle(base), pm.derive_norming(spec, n))
        b = pm.top_k_variational_bound(f, spec, 3, n, base.x0**n, mc_samples=40000, seed=3)
        assert b.joint_term == abs(b.joint_term_signed)
        assert b.joint_term_stderr is not None and b.joint_term_stderr >= 0.0
        assert b.joint_term > 0.0  # the truncation region is reachable at n = 10

    def test_mc_determinism(self):
        base = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice="envelope")
        spec = pm.PMaxLawSpec(2, 1.0)
        f = pm.normalized_handle(pm.perturbed_handle(base), pm.derive_norming(spec, 10))
        b1 = pm.top_k_variational_bound(f, spec, 3, 10, base.x0**10, mc_samples=10000, seed=3)
        b2 = pm.top_k_variational_bound(f, spec, 3, 10, base.x0**10, mc_samples=10000, seed=3)
        assert b1 == b2


class TestRateFunctions:
    def test_envelope_rate_example(self):
        got = pm.hellinger_rate_bound(1.0, 0.5, 100, d_star=1.0)
        assert abs(got - math.sqrt(0.5) * 0.1) <= 1e-14

    def test_delta_above_one_uses_unit_exponent(self):
        v2 = pm.hellinger_rate_bound(1.0, 2.0, 50)
        v3 = pm.hellinger_rate_bound(1.0, 3.0, 50)
        d2 = math.sqrt(0.5) * math.sqrt(pm.gamma_function(5.0))
        assert abs(v2 - d2 / 50.0) <= 1e-13
        assert abs(v3 * 50.0 / math.sqrt(pm.gamma_function(7.0) / 2.0) - 1.0) <= 1e-12

    def test_linearity_in_L(self):
        a = pm.hellinger_rate_bound(1.0, 0.5, 100)
        b = pm.hellinger_rate_bound(2.0, 0.5, 100)
        assert abs(b - 2.0 * a) <= 1e-14

    def test_top_k_rate_examples(self):
        assert abs(pm.top_k_rate_bound(4, 100, 1.0, 1.0) - 0.12) <= 1e-14
        n, delta, D = 50, 0.7, 1.3
        want = D * ((1 / n) ** delta + 1 / n)
        assert abs(pm.top_k_rate_bound(1, n, delta, D) - want) <= 1e-14

    def test_monotone_in_k(self):
        vals = [pm.top_k_rate_bound(k, 100, 0.5, 1.0) for k in range(1, 10)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_validation(self):
        with pytest.raises(ValueError):
            pm.hellinger_rate_bound(-1.0, 0.5, 10)
        with pytest.raises(ValueError):
            pm.top_k_rate_bound(5, 4, 0.5, 1.0)


class TestExactVsLimit:
    def test_uniform_degenerate(self):
        base = pm.build_perturbed(2, 1.0, L=1.0, delta=1.0, g_choice="uniform")
        spec = pm.PMaxLawSpec(2, 1.0)
        for kind in ("hellinger", "tv", "ks"):
            rep = pm.exact_vs_limit(kind, base, spec, 100)
            assert rep.value <= 1e-10

    def test_tabulated_norming_shows_mismatch(self):
        base = pm.build_perturbed(3, g_choice="zero")
        spec = pm.PMaxLawSpec(3)
        derived = pm.exact_vs_limit("ks", base, spec, 100, norming="derived", with_bound=False)
        tabulated = pm.exact_vs_limit("ks", base, spec, 100, norming="tabulated", with_bound=False)
        assert derived.value < 0.01
        assert tabulated.value > 0.1

    def test_reports_carry_n_k(self):
        base = pm.build_perturbed(3, g_choice="zero")
        rep = pm.exact_vs_limit("tv", base, pm.PMaxLawSpec(3), 50, k=2, mc_samples=2000)
        assert rep.n == 50 and rep.k == 2
        assert rep.bound is not None

    def test_unknown_kind(self):
        base = pm.build_perturbed(3, g_choice="zero")
        with pytest.raises(ValueError):
            pm.exact_vs_limit("wasserstein", base, pm.PMaxLawSpec(3), 10)
