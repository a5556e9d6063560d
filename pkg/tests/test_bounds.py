import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chemoblow.admissibility import ModelParams
from chemoblow.bounds import (BoundConstants, PsiTrace, build_constants,
                              check_psi_inequality, comparison_ode, default_epsilon,
                              estimate_gn_constant, gn_exponents, gn_ratio,
                              holder_constant, holder_lhs, holder_ratio,
                              lower_bound_closed_form, lower_bound_quadrature,
                              random_density, validate_holder_constant)
from chemoblow.errors import InvalidParameterError
from chemoblow.grid import RadialField, RadialGrid


def synth(B1=0.0, B2=0.0, B3=0.0, B4=0.0, g1=1.5, g2=3.0, g3=3.48):
    """Synthetic constants for analytic cases (bypasses the pipeline)."""
    return BoundConstants(
        N=3, R=1.0, alpha=0.1, k_f=1.0, mu=1.0, p=2.0, epsilon=0.1, c_gn=1.0,
        c_holder=1.0, theta0=0.0, theta_eps=0.0, theta1=0.0,
        c1=0.0, c2=0.0, c3=0.0, c4=0.0, c5=0.0, epsilon1=1.0, c_tilde1=0.0,
        B1=B1, B2=B2, B3=B3, B4=B4, gamma1=g1, gamma2=g2, gamma3=g3,
        gamma=max(g2, g3))


def random_valid_constants(rng, N=3):
    p = rng.uniform(1.6, 2.9)
    eps = rng.uniform(0.005, 1.0) * (2 * p / N - 1)
    params = ModelParams(N=N, R=rng.uniform(0.5, 3.0), alpha=rng.uniform(0.01, 0.24),
                         k_f=rng.uniform(0.1, 5.0), mu=rng.uniform(0.1, 100.0))
    return build_constants(params, p, eps, rng.uniform(0.05, 10.0))


class TestPipeline:
    def test_golden_gammas(self):
        params = ModelParams(N=3, R=1.0, alpha=0.2, k_f=1.0, mu=10.0)
        k = build_constants(params, p=2.0, epsilon=0.1, c_gn=1.0)
        assert k.gamma1 == 1.5
        assert k.gamma2 == 3.0
        assert abs(k.gamma3 - 3.48) <= 1e-10
        assert abs(k.gamma3 - (6 - 9.9 / 3.1) / (4 - 9.9 / 3.1)) <= 1e-14
        assert k.gamma == k.gamma3

    def test_golden_c1(self):
        params = ModelParams(N=3, R=1.0, alpha=0.2, k_f=1.0, mu=10.0)
        k = build_constants(params, p=2.0, epsilon=0.1, c_gn=1.0)
        assert k.c1 == 2.0
        assert k.B1 == k.c1

    def test_bit_stable(self):
        params = ModelParams(N=3, R=1.2, alpha=0.17, k_f=0.8, mu=7.3)
        a = build_constants(params, p=2.1, epsilon=0.09, c_gn=0.77)
        b = build_constants(params, p=2.1, epsilon=0.09, c_gn=0.77)
        assert a == b
        assert a.provenance == b.provenance

    def test_epsilon_limit_gamma3_to_gamma2(self):
        params = ModelParams(N=3, R=1.0, alpha=0.1, k_f=1.0, mu=1.0)
        gaps = []
        for eps in (1e-2, 1e-4, 1e-6):
            k = build_constants(params, p=2.0, epsilon=eps, c_gn=1.0)
            gaps.append(abs(k.gamma3 - k.gamma2))
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] <= 1e-5

    def test_gamma_ordering_over_valid_region(self):
        # gamma1 < gamma2 <= gamma always; gamma3 >= gamma2 holds numerically
        # throughout the admissible (p, eps) region
        params = ModelParams(N=3, R=1.0, alpha=0.1, k_f=1.0, mu=1.0)
        for p in np.linspace(1.55, 2.95, 15):
            for frac in np.linspace(0.01, 0.99, 15):
                eps = frac * (2 * p / 3 - 1)
                k = build_constants(params, p, eps, 1.0)
                assert 1.0 < k.gamma1 < k.gamma2 <= k.gamma
                assert k.gamma3 >= k.gamma2 - 1e-12

    def test_gradient_cancellation_identity(self):
        # epsilon1 solves (N/2p) eps1 C_GN c2 + c3 theta1 eps1 C_GN = 4(p-1)/p^2
        params = ModelParams(N=3, R=1.0, alpha=0.2, k_f=1.3, mu=5.0)
        k = build_constants(params, p=2.2, epsilon=0.05, c_gn=0.9)
        lhs = (k.N / (2 * k.p)) * k.epsilon1 * k.c_gn * k.c2 \
            + k.c3 * k.theta1 * k.epsilon1 * k.c_gn
        assert abs(lhs - 4 * (k.p - 1) / k.p ** 2) <= 1e-12

    def test_domain_violations_named(self):
        params = ModelParams(N=3, R=1.0, alpha=0.1, k_f=1.0, mu=1.0)
        with pytest.raises(InvalidParameterError, match="N/2 < p"):
            build_constants(params, p=1.4, epsilon=0.01, c_gn=1.0)
        with pytest.raises(InvalidParameterError, match="p < N"):
            build_constants(params, p=3.0, epsilon=0.01, c_gn=1.0)
        with pytest.raises(InvalidParameterError, match="epsilon > 0"):
            build_constants(params, p=2.0, epsilon=0.0, c_gn=1.0)
        with pytest.raises(InvalidParameterError, match=r"2p - N\(1\+eps\) > 0"):
            build_constants(params, p=2.0, epsilon=0.5, c_gn=1.0)
        with pytest.raises(InvalidParameterError, match="C_GN > 0"):
            build_constants(params, p=2.0, epsilon=0.05, c_gn=0.0)
        with pytest.raises(InvalidParameterError, match="mu > 0"):
            build_constants(ModelParams(N=3, R=1.0, alpha=0.1, k_f=1.0), 2.0, 0.05, 1.0)
        bad_alpha = ModelParams(N=3, R=1.0, alpha=0.3, k_f=1.0, mu=1.0)
        with pytest.raises(InvalidParameterError, match="alpha"):
            build_constants(bad_alpha, p=2.0, epsilon=0.05, c_gn=1.0)

    def test_default_epsilon_in_window(self):
        for N in (3, 4, 5):
            for p in np.linspace(N / 2 + 0.05, N - 0.05, 7):
                eps = default_epsilon(N, p)
                assert eps > 0 and 2 * p - N * (1 + eps) > 0

    def test_provenance_serialization(self):
        params = ModelParams(N=3, R=1.0, alpha=0.2, k_f=1.0, mu=10.0)
        k = build_constants(params, p=2.0, epsilon=0.1, c_gn=1.0)
        lines = k.provenance_lines()
        assert any(line.startswith("c1 = 2.0 #") for line in lines)
        labels = [t[0] for t in k.provenance]
        for name in ("c_holder", "epsilon1", "B1", "B2", "B3", "B4", "gamma3"):
            assert name in labels


class TestLowerBounds:
    def test_analytic_single_terms(self):
        assert abs(lower_bound_quadrature(synth(B2=1.0, g1=2.0), 1.0) - 1.0) <= 1e-10
        assert abs(lower_bound_quadrature(synth(B4=1.0, g3=2.0, g2=1.5), 2.0) - 0.5) <= 1e-10
        # gamma1 = 3: T = int_1^inf eta^-3 = 1/2
        assert abs(lower_bound_quadrature(synth(B2=1.0, g1=3.0), 1.0) - 0.5) <= 1e-10

    def test_linear_only_is_infinite(self):
        assert lower_bound_quadrature(synth(B1=1.0), 1.0) == math.inf
        assert lower_bound_quadrature(synth(), 1.0) == math.inf

    def test_closed_form_single_term_matches(self):
        k = synth(B4=1.0, g3=2.0, g2=1.5)
        assert abs(lower_bound_closed_form(k, 2.0) - 0.5) <= 1e-12

    def test_scaling_homogeneity(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            k = random_valid_constants(rng)
            k2 = synth(B1=2 * k.B1, B2=2 * k.B2, B3=2 * k.B3, B4=2 * k.B4,
                       g1=k.gamma1, g2=k.gamma2, g3=k.gamma3)
            psi0 = rng.uniform(0.1, 100)
            t1 = lower_bound_quadrature(k, psi0)
            t2 = lower_bound_quadrature(k2, psi0)
            assert abs(t2 - t1 / 2) <= 1e-9 * t1
            c1 = lower_bound_closed_form(k, psi0)
            c2 = lower_bound_closed_form(k2, psi0)
            assert abs(c2 - c1 / 2) <= 1e-12 * c1

    @given(seed=st.integers(0, 100_000))
    @settings(max_examples=40, deadline=None)
    def test_closed_form_below_quadrature(self, seed):
        rng = np.random.default_rng(seed)
        k = random_valid_constants(rng)
        psi0 = rng.uniform(1e-3, 1e6)
        assert lower_bound_closed_form(k, psi0) <= lower_bound_quadrature(k, psi0) * (1 + 1e-12)

    def test_monotone_in_data(self):
        # nonincreasing in Psi0 and in each coefficient (a bumped coefficient
        # can sit below quadrature resolution, hence <=; Psi0 shifts are
        # always visible)
        rng = np.random.default_rng(8)
        for _ in range(10):
            k = random_valid_constants(rng)
            psi0 = rng.uniform(0.1, 1e3)
            base = lower_bound_quadrature(k, psi0)
            assert lower_bound_quadrature(k, psi0 * 1.3) < base
            for name in ("B1", "B2", "B3", "B4"):
                bumped = {f: getattr(k, f) for f in
                          ("B1", "B2", "B3", "B4")}
                bumped[name] = bumped[name] * 1.5 + 0.1
                k2 = synth(g1=k.gamma1, g2=k.gamma2, g3=k.gamma3, **bumped)
                assert lower_bound_quadrature(k2, psi0) <= base * (1 + 1e-9)
            cbase = lower_bound_closed_form(k, psi0)
            assert lower_bound_closed_form(k, psi0 * 1.3) < cbase
            assert lower_bound_closed_form(
                synth(g1=k.gamma1, g2=k.gamma2, g3=k.gamma3, B1=k.B1 * 2,
                      B2=k.B2 * 2, B3=k.B3 * 2, B4=k.B4 * 2), psi0) < cbase

    def test_invalid_psi0(self):
        with pytest.raises(InvalidParameterError):
            lower_bound_quadrature(synth(B2=1.0), 0.0)
        with pytest.raises(InvalidParameterError):
            lower_bound_closed_form(synth(B2=1.0), -1.0)


class TestComparisonOde:
    def test_riccati(self):
        tr = comparison_ode(synth(B2=1.0, g1=2.0), 1.0, 10.0)
        assert abs(tr.blow_up_time - 1.0) <= 1e-6

    def test_all_zero_constant(self):
        tr = comparison_ode(synth(), 1.0, 5.0)
        assert tr.blow_up_time is None
        assert np.max(np.abs(tr.values - 1.0)) <= 1e-9

    def test_linear_growth_no_blowup(self):
        tr = comparison_ode(synth(B1=1.0), 1.0, 2.0)
        assert tr.blow_up_time is None
        assert abs(tr.values[-1] - math.exp(tr.times[-1])) <= 1e-6 * math.exp(tr.times[-1])

    def test_matches_quadrature_on_random_tuples(self):
        rng = np.random.default_rng(17)
        for _ in range(60):
            k = random_valid_constants(rng)
            psi0 = rng.uniform(1e-3, 1e6)
            tq = lower_bound_quadrature(k, psi0)
            tr = comparison_ode(k, psi0, tq * 3)
            assert tr.blow_up_time is not None
            assert abs(tr.blow_up_time - tq) <= 1e-6 * tq


class TestPsiCheck:
    def test_steady_trace_no_violations(self):
        k = synth(B1=1.0, B2=0.5)
        tr = PsiTrace.from_samples(np.linspace(0, 1, 50), np.full(50, 2.0))
        rep = check_psi_inequality(tr, k)
        assert rep.violations == 0
        assert rep.n_checked == 48
        assert rep.min_slack > 0

    def test_decaying_trace_no_violations(self):
        k = synth(B1=1.0, B2=0.5)
        t = np.linspace(0, 1, 100)
        tr = PsiTrace.from_samples(t, 2.0 * np.exp(-3 * t))
        assert check_psi_inequality(tr, k).violations == 0

    def test_fast_growth_violates_small_constants(self):
        k = synth(B2=1e-6, g1=1.5)
        t = np.linspace(0, 1, 100)
        tr = PsiTrace.from_samples(t, np.exp(10 * t))
        rep = check_psi_inequality(tr, k, tol=0.05)
        assert rep.violations > 0
        assert rep.min_slack < 0

    def test_short_trace_rejected(self):
        k = synth(B1=1.0)
        tr = PsiTrace.from_samples([0.0, 1.0], [1.0, 2.0])
        with pytest.raises(InvalidParameterError):
            check_psi_inequality(tr, k)

    def test_trace_validation(self):
        with pytest.raises(InvalidParameterError):
            PsiTrace.from_samples([0.0, 0.0, 1.0], [1.0, 1.0, 1.0])
        with pytest.raises(InvalidParameterError):
            PsiTrace.from_samples([0.0, 1.0], [1.0, -1.0])


class TestGnEstimator:
    def test_family_size_gate(self):
        g = RadialGrid.uniform(3, 1.0, 64)
        with pytest.raises(InvalidParameterError):
            estimate_gn_constant(g, 2.0, family_size=7)

    def test_monotone_in_family_size(self):
        g = RadialGrid.uniform(3, 1.0, 128)
        vals = [estimate_gn_constant(g, 2.0, fs) for fs in (8, 12, 16, 20, 24)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))

    def test_constant_profile_ratio(self):
        g = RadialGrid.uniform(3, 1.0, 128)
        pexp, _ = gn_exponents(g.N, 2.0)
        f = np.ones(g.n_cells)
        r = gn_ratio(g, f, np.zeros(g.n_cells), 2.0)
        expect = g.ball_volume ** (1.0 - pexp / 2.0)
        assert abs(r - expect) <= 1e-12 * expect
        assert 0 < r < math.inf

    def test_inequality_holds_on_family_by_construction(self):
        from chemoblow.bounds import _gn_family
        g = RadialGrid.uniform(3, 1.0, 256)
        c = estimate_gn_constant(g, 2.0, 24)
        for f, fr in _gn_family(g, 24):
            assert gn_ratio(g, f, fr, 2.0) <= c * (1 + 1e-12)


class TestHolderOracle:
    def test_lhs_matches_brute_force(self):
        # dense midpoint subsampling of the piecewise-constant density as an
        # independent evaluation of omega int u^p (M(r)/r) dr
        g = RadialGrid.uniform(3, 1.0, 32)
        rng = np.random.default_rng(5)
        u = RadialField.density(g, rng.uniform(0.1, 4.0, 32))
        p = 2.0
        sub = 400
        rr = (np.arange(32 * sub) + 0.5) * (g.R / (32 * sub))
        uu = np.repeat(u.values, sub)
        dr = g.R / (32 * sub)
        M = np.cumsum(rr ** 2 * uu * dr) - 0.5 * rr ** 2 * uu * dr
        brute = g.omega * np.sum(uu ** p * M / rr * dr)
        exact = holder_lhs(u, p)
        assert abs(exact - brute) <= 2e-3 * abs(exact)

    def test_constant_density_closed_form(self):
        # u = c: LHS = omega c^(p+1) R^N / N^2
        g = RadialGrid.uniform(3, 1.0, 256)
        c = 2.0
        u = RadialField.density(g, np.full(256, c))
        expect = g.omega * c ** 3 / 9
        assert abs(holder_lhs(u, 2.0) - expect) <= 1e-12 * expect

    def test_symbolic_dominates_random_densities(self):
        g = RadialGrid.uniform(3, 1.0, 256)
        c, worst = validate_holder_constant(g, 2.0, 0.1, n_samples=150, seed=0)
        assert c > worst

    def test_dominates_other_parameter_points(self):
        rng = np.random.default_rng(23)
        for (N, p, eps) in ((3, 1.7, 0.05), (4, 2.5, 0.2), (5, 3.2, 0.1)):
            g = RadialGrid.uniform(N, 1.5, 128)
            c = holder_constant(N, p, eps, g.R)
            for _ in range(40):
                u = random_density(g, rng)
                assert holder_ratio(u, p, eps) <= c
