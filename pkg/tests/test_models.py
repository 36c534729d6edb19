import math

import numpy as np
import pytest

import pmaxevt as pm
from pmaxevt.distances import density_mass

E = math.e


class TestBuildPerturbed:
    def test_zero_is_the_glogpd(self):
        spec = pm.build_perturbed(3, g_choice="zero")
        assert abs(spec.x0 - math.exp(-1.0)) < 1e-15
        assert spec.normalizer == 1.0
        x = np.linspace(1.001, 60.0, 400)
        gap = np.abs(spec.pdf(x) - np.atleast_1d(pm.glogpd_pdf(pm.GLogParetoSpec(3), x)))
        assert np.max(gap) == 0.0

    def test_uniform_is_uniform(self):
        spec = pm.build_perturbed(2, 1.0, L=1.0, delta=1.0, g_choice="uniform")
        assert spec.x0 == 0.0 and spec.normalizer == 1.0
        x = np.linspace(0.01, 0.99, 99)
        assert np.max(np.abs(spec.pdf(x) - 1.0)) < 1e-14
        assert abs(spec.cdf(0.3) - 0.3) < 1e-14

    def test_uniform_requires_family2_alpha1_delta1(self):
        with pytest.raises(ValueError):
            pm.build_perturbed(3, g_choice="uniform")
        with pytest.raises(ValueError):
            pm.build_perturbed(2, 1.0, delta=0.5, g_choice="uniform")
        with pytest.raises(ValueError):
            pm.build_perturbed(2, 1.0, L=0.5, delta=1.0, g_choice="uniform")

    def test_envelope_solves_unit_mass_truncation(self):
        spec = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice="envelope")
        assert 0.5 < spec.x0 < 1.0
        assert spec.normalizer == 1.0
        sup = spec.support()
        mass = pm.integrate(spec.pdf, sup.lower, sup.upper, tol=1e-12)
        assert abs(mass.value - 1.0) <= 1e-10

    def test_envelope_negative_sign(self):
        spec = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice="envelope", sign=-1)
        assert spec.normalizer == 1.0
        sup = spec.support()
        mass = pm.integrate(spec.pdf, sup.lower, sup.upper, tol=1e-12)
        assert abs(mass.value - 1.0) <= 1e-10

    def test_envelope_negative_infeasible_mass(self):
        # exp(-L u) total mass 1/L < 1 can never reach unit mass
        with pytest.raises(ValueError, match="never reaches 1"):
            pm.build_perturbed(2, 1.0, L=2.0, delta=1.0, g_choice="envelope", sign=-1)

    def test_envelope_sine_mass_and_bound(self):
        spec = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice="envelope-sine")
        assert spec.normalizer == 1.0
        sup = spec.support()
        mass = pm.integrate(spec.pdf, sup.lower, sup.upper, tol=1e-10)
        assert abs(mass.value - 1.0) <= 1e-8

    def test_forced_x0_records_normalizer(self):
        spec = pm.build_perturbed(3, g_choice="zero", x0=0.6)
        assert abs(spec.normalizer - 1.0 / (-math.log(0.6))) < 1e-12
        sup = spec.support()
        mass = pm.integrate(spec.pdf, sup.lower, sup.upper, tol=1e-11)
        assert abs(mass.value - 1.0) <= 1e-9

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            pm.build_perturbed(2, 1.0, L=-1.0)
        with pytest.raises(ValueError):
            pm.build_perturbed(2, 1.0, delta=0.0)
        with pytest.raises(ValueError):
            pm.build_perturbed(2, 1.0, g_choice="nope")
        with pytest.raises(ValueError):
            pm.build_perturbed(2, 1.0, sign=0)
        with pytest.raises(ValueError):
            pm.build_perturbed(2, 1.0, x0=1.5)

    def test_quantile_cdf_round_trip(self):
        for g_choice in ("zero", "envelope", "envelope-sine"):
            spec = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice=g_choice)
            p = np.linspace(0.01, 0.99, 33)
            x = spec.quantile(p)
            assert np.max(np.abs(spec.cdf(x) - p)) < 1e-8


class TestEnvelopeCheck:
    def test_zero_ratio(self):
        spec = pm.build_perturbed(2, 1.0, g_choice="zero")
        chk = pm.envelope_check(spec)
        assert chk.passed and chk.max_ratio == 0.0

    def test_uniform_ratio_one(self):
        spec = pm.build_perturbed(2, 1.0, L=1.0, delta=1.0, g_choice="uniform")
        chk = pm.envelope_check(spec)
        assert chk.passed
        assert abs(chk.max_ratio - 1.0) < 1e-9

    def test_halved_L_doubles_ratio(self):
        spec = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice="envelope")
        full = pm.envelope_check(spec)
        half = pm.envelope_check(spec, L=0.5)
        assert not half.passed
        assert abs(half.max_ratio - 2.0 * full.max_ratio) < 1e-9

    def test_ratio_scales_linearly_in_inverse_L(self):
        spec = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice="envelope")
        r1 = pm.envelope_check(spec, L=1.0).max_ratio
        for scale in (2.0, 4.0, 10.0):
            r = pm.envelope_check(spec, L=1.0 / scale).max_ratio
            assert abs(r - scale * r1) < 1e-9

    def test_include_normalizer_exposes_compromise(self):
        spec = pm.build_perturbed(3, g_choice="zero", x0=0.6)
        raw = pm.envelope_check(spec)
        assert raw.passed and raw.max_ratio == 0.0
        folded = pm.envelope_check(spec, include_normalizer=True)
        assert not folded.passed  # a constant cannot decay toward r(H)

    def test_grid_size_validated(self):
        spec = pm.build_perturbed(2, 1.0, g_choice="zero")
        with pytest.raises(ValueError):
            pm.envelope_check(spec, grid_size=10)

    def test_sine_stays_inside(self):
        spec = pm.build_perturbed(2, 1.0, L=1.0, delta=0.5, g_choice="envelope-sine")
        chk = pm.envelope_check(spec)
        assert chk.passed and chk.max_ratio <= 1.0 + 1e-12


class TestExactLaws:
    def test_uniform_base_is_exactly_uniform(self):
        uh = pm.law_handle(pm.PMaxLawSpec(2, 1.0))
        x = np.linspace(0.01, 0.99, 99)
        for n in (2, 10, 100, 1000):
            law = pm.ExactMaxLaw(uh, n, pm.NormingConstants(1.0, 1.0 / n), 1)
            gap = np.abs(np.atleast_1d(pm.exact_max_cdf(law, x)) - x)
            assert np.max(gap) <= 5e-16 * n

    @pytest.mark.parametrize("fam,alpha", [(1, 2.0), (2, 0.5), (3, None), (4, 1.0), (5, 2.0), (6, None)])
    @pytest.mark.parametrize("n", [2, 10, 100])
    def test_base_H_reproduces_H(self, fam, alpha, n):
        spec = pm.PMaxLawSpec(fam, alpha)
        law = pm.ExactMaxLaw(pm.law_handle(spec), n, pm.derive_norming(spec, n), 1)
        x = np.atleast_1d(pm.quantile(spec, np.linspace(0.001, 0.999, 201)))
        gap = np.abs(np.atleast_1d(pm.exact_max_cdf(law, x)) - np.atleast_1d(pm.cdf(spec, x)))
        assert np.max(gap) <= 1e-12

    def test_pareto_n50_value(self):
        w3 = pm.glogpd_handle(pm.GLogParetoSpec(3))
        law = pm.ExactMaxLaw(w3, 50, pm.NormingConstants(50.0, 1.0), 1)
        got = pm.exact_max_cdf(law, 1.0)
        assert abs(got - (1.0 - 1.0 / 50.0) ** 50) < 1e-15
        assert abs(got - 0.3642) < 1e-4

    def test_k1_matches_max(self):
        base = pm.glogpd_handle(pm.GLogParetoSpec(3))
        c = pm.NormingConstants(20.0, 1.0)
        law1 = pm.ExactMaxLaw(base, 20, c, 1)
        x = np.linspace(0.06, 30.0, 200)
        gap = np.abs(np.atleast_1d(pm.exact_kth_cdf(law1, x)) - np.atleast_1d(pm.exact_max_cdf(law1, x)))
        assert np.max(gap) <= 1e-14

    def test_k_equals_n_is_the_minimum(self):
        uh = pm.law_handle(pm.PMaxLawSpec(2, 1.0))
        n = 12
        c = pm.NormingConstants(1.0, 1.0 / n)
        law = pm.ExactMaxLaw(uh, n, c, n)
        x = np.linspace(0.01, 0.99, 99)
        F = x ** (1.0 / n)
        want = 1.0 - (1.0 - F) ** n
        gap = np.abs(np.atleast_1d(pm.exact_kth_cdf(law, x)) - want)
        assert np.max(gap) <= 1e-13

    def test_kth_pdf_mass(self):
        base = pm.glogpd_handle(pm.GLogParetoSpec(3))
        n, k = 20, 3
        law = pm.ExactMaxLaw(base, n, pm.derive_norming(pm.PMaxLawSpec(3), n), k)
        mass, _ = density_mass(pm.exact_kth_handle(law), tol=1e-10)
        assert abs(mass - 1.0) <= 1e-8

    def test_validation(self):
        base = pm.law_handle(pm.PMaxLawSpec(3))
        with pytest.raises(ValueError):
            pm.ExactMaxLaw(base, 5, pm.NormingConstants(1.0, 1.0), 6)  # k > n
        with pytest.raises(ValueError):
            pm.ExactMaxLaw(base, 0, pm.NormingConstants(1.0, 1.0), 1)
        law2 = pm.ExactMaxLaw(base, 5, pm.NormingConstants(1.0, 1.0), 2)
        with pytest.raises(ValueError):
            pm.exact_max_cdf(law2, 1.0)

    def test_zero_point_with_small_exponent_is_flagged(self):
        base = pm.law_handle(pm.PMaxLawSpec(4, 2.0))
        law = pm.ExactMaxLaw(pm.glogpd_handle(pm.GLogParetoSpec(4, 2.0)), 4, pm.NormingConstants(1.0, 0.5), 1)
        with pytest.warns(RuntimeWarning):
            val = pm.exact_max_pdf(law, 0.0)
        assert val == 0.0

    def test_kolmogorov_gap_nonincreasing_in_n(self):
        # convergence of the zero-perturbation base toward its limit law
        base = pm.build_perturbed(3, g_choice="zero")
        spec = pm.PMaxLawSpec(3)
        gaps = []
        for n in (10, 100, 1000, 10000):
            law = pm.ExactMaxLaw(pm.perturbed_handle(base), n, pm.derive_norming(spec, n), 1)
            rep = pm.kolmogorov(pm.exact_max_handle(law), pm.law_handle(spec))
            gaps.append(rep.value)
        assert all(a >= b for a, b in zip(gaps, gaps[1:]))


class TestSamplers:
    def test_determinism(self):
        uh = pm.law_handle(pm.PMaxLawSpec(2, 1.0))
        law = pm.ExactMaxLaw(uh, 25, pm.NormingConstants(1.0, 1.0 / 25), 2)
        a = pm.sample_top_k(law, 300, seed=123)
        b = pm.sample_top_k(law, 300, seed=123)
        assert np.array_equal(a, b)
        c = pm.sample_top_k(law, 300, seed=124)
        assert not np.array_equal(a, c)

    def test_componentwise_ordering(self):
        uh = pm.law_handle(pm.PMaxLawSpec(2, 1.0))
        law = pm.ExactMaxLaw(uh, 25, pm.NormingConstants(1.0, 1.0 / 25), 3)
        d = pm.sample_top_k(law, 200, seed=5)
        assert d.shape == (200, 3)
        assert np.all(d[:, :-1] >= d[:, 1:])

    def test_uniform_marginal_ks(self):
        # base uniform with norming (1, 1/n): the normalized max is uniform,
        # so a one-sample KS check against F(x) = x applies exactly
        uh = pm.law_handle(pm.PMaxLawSpec(2, 1.0))
        m, n = 2000, 50
        law = pm.ExactMaxLaw(uh, n, pm.NormingConstants(1.0, 1.0 / n), 1)
        x = np.sort(pm.sample_top_k(law, m, seed=1)[:, 0])
        i = np.arange(1, m + 1)
        ks = max(np.max(i / m - x), np.max(x - (i - 1) / m))
        assert ks < 1.36 / math.sqrt(m)  # 95% band; fixed seed keeps this deterministic

    def test_limit_sampler_shape_and_order(self):
        s21 = pm.PMaxLawSpec(2, 1.0)
        d = pm.sample_limit_top_k(s21, 3, 500, seed=8)
        assert d.shape == (500, 3)
        assert np.all((d > 0) & (d < 1))
        assert np.all(d[:, :-1] >= d[:, 1:])

    def test_limit_sampler_marginals(self):
        s21 = pm.PMaxLawSpec(2, 1.0)
        m = 4000
        d = pm.sample_limit_top_k(s21, 2, m, seed=8)
        i = np.arange(1, m + 1)
        for j in (1, 2):
            xs = np.sort(d[:, j - 1])
            F = np.atleast_1d(pm.kth_limit_cdf(s21, j, xs))
            ks = max(np.max(i / m - F), np.max(F - (i - 1) / m))
            assert ks < 1.36 / math.sqrt(m)

    def test_overflow_guard(self):
        uh = pm.law_handle(pm.PMaxLawSpec(2, 1.0))
        law = pm.ExactMaxLaw(uh, 10_000_000, pm.NormingConstants(1.0, 1e-7), 1)
        with pytest.raises(ValueError, match="guard"):
            pm.sample_top_k(law, 100, seed=0)

    def test_quantile_required(self):
        kh = pm.kth_limit_handle(pm.PMaxLawSpec(3), 2)  # no quantile callable
        law = pm.ExactMaxLaw(kh, 5, pm.NormingConstants(1.0, 1.0), 1)
        with pytest.raises(ValueError, match="quantile"):
            pm.sample_top_k(law, 10, seed=0)
