import numpy as np
import pytest
import scipy.linalg

from chemoblow.admissibility import make_bump
from chemoblow.errors import BlowupSuspected, InvalidParameterError, NumericalFailureError
from chemoblow.grid import RadialField, RadialGrid, integrate
from chemoblow.pde import (ChemoState, FluxLimiter, StepController, initial_state,
                           rhs, run, step)


def diffusion_matrix(g):
    """Independent assembly of the pure-diffusion operator (k_f = 0)."""
    n = g.n_cells
    A = g.face_areas
    dcc = np.diff(g.centers)
    L = np.zeros((n, n))
    for j in range(1, n):  # interior faces
        c = A[j] / dcc[j - 1]
        L[j - 1, j - 1] -= c / g.volumes[j - 1]
        L[j - 1, j] += c / g.volumes[j - 1]
        L[j, j] -= c / g.volumes[j]
        L[j, j - 1] += c / g.volumes[j]
    return L


class TestLimiter:
    def test_shape(self):
        f = FluxLimiter(k_f=2.0, alpha=0.2)
        xi = np.linspace(0, 50, 200)
        vals = f.value(xi)
        assert vals[0] == 2.0
        assert np.all(np.diff(vals) < 0)
        assert np.all(vals > 0)
        assert np.all(f.derivative(xi) <= 0)

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            FluxLimiter(k_f=-1.0, alpha=0.1)
        with pytest.raises(InvalidParameterError):
            FluxLimiter(k_f=1.0, alpha=-0.1)


class TestRhs:
    def test_steady_state_zero(self):
        g = RadialGrid.uniform(3, 1.0, 128)
        st = initial_state(RadialField.density(g, np.full(128, 5.0)))
        du = rhs(st, FluxLimiter(k_f=1.0, alpha=0.15))
        assert np.max(np.abs(du.values)) <= 1e-12 * 5.0

    def test_conservation_by_construction(self):
        g = RadialGrid.uniform(3, 1.0, 256)
        rng = np.random.default_rng(2)
        for _ in range(5):
            u0 = RadialField.density(g, rng.lognormal(0, 1, 256))
            st = initial_state(u0)
            du = rhs(st, FluxLimiter(k_f=1.0, alpha=0.15))
            total = float(np.dot(np.abs(du.values), g.volumes))
            assert abs(np.dot(du.values, g.volumes)) <= 1e-13 * max(total, 1.0)

    def test_pure_diffusion_matches_matrix(self):
        g = RadialGrid.uniform(3, 1.0, 64)
        L = diffusion_matrix(g)
        rng = np.random.default_rng(4)
        u = rng.uniform(0.5, 3.0, 64)
        st = initial_state(RadialField.density(g, u))
        du = rhs(st, FluxLimiter(k_f=0.0, alpha=0.0))
        assert np.max(np.abs(du.values - L @ u)) <= 1e-9 * np.max(np.abs(L @ u))

    def test_nan_flux_reported_with_cell(self):
        g = RadialGrid.uniform(3, 1.0, 64)
        u = RadialField.density(g, np.ones(64))
        bad = ChemoState(t=0.0, u=u, dt=0.0, step_count=0, mu=float("nan"))
        with pytest.raises(NumericalFailureError) as e:
            rhs(bad, FluxLimiter(k_f=1.0, alpha=0.15))
        assert e.value.cell_index is not None


class TestStep:
    def test_fixed_point(self):
        g = RadialGrid.uniform(3, 1.0, 64)
        mu = 2.0
        st = initial_state(RadialField.density(g, np.full(64, mu)))
        ctrl = StepController(t_end=1.0)
        lim = FluxLimiter(k_f=1.0, alpha=0.15)
        for _ in range(1000):
            st = step(st, lim, ctrl)
        assert np.max(np.abs(st.u.values - mu)) <= 1e-12 * mu
        assert st.step_count == 1000

    def test_mass_conserved_per_step(self):
        g = RadialGrid.uniform(3, 1.0, 128)
        st = initial_state(make_bump(g, 5.0, 0.7, 0.3))
        m0 = integrate(st.u)
        ctrl = StepController(t_end=1.0)
        lim = FluxLimiter(k_f=1.0, alpha=0.15)
        for _ in range(200):
            st = step(st, lim, ctrl)
            assert abs(integrate(st.u) - m0) <= 1e-14 * m0
            assert st.u.values.min() >= 0.0

    def test_step_agrees_with_fused_run(self):
        g = RadialGrid.uniform(3, 1.0, 64)
        u0 = make_bump(g, 5.0, 0.6, 0.3)
        lim = FluxLimiter(k_f=1.0, alpha=0.15)
        t_end = 2e-4
        ctrl = StepController(t_end=t_end)
        st = initial_state(u0)
        while st.t < t_end:
            st = step(st, lim, ctrl)
        res = run(u0, lim, ctrl, n_time_samples=1)
        assert res.steps_total == st.step_count
        assert np.max(np.abs(res.final.u.values - st.u.values)) <= 1e-12 * st.u.values.max()

    def test_dt_underflow_raises_signal(self):
        g = RadialGrid.uniform(3, 1.0, 128)
        st = initial_state(RadialField.density(g, np.full(128, 1.0)))
        ctrl = StepController(t_end=1.0, dt_min=1.0)  # floor above any CFL step
        with pytest.raises(BlowupSuspected):
            step(st, FluxLimiter(k_f=1.0, alpha=0.15), ctrl)


class TestDiffusionLimit:
    def test_matrix_exponential_oracle(self, warm_kernels):
        g = RadialGrid.uniform(3, 1.0, 32)
        L = diffusion_matrix(g)
        rng = np.random.default_rng(9)
        u0_vals = 1.0 + rng.uniform(0, 1, 32)
        u0 = RadialField.density(g, u0_vals)
        t = 0.01
        expect = scipy.linalg.expm(t * L) @ u0_vals
        res = run(u0, FluxLimiter(k_f=0.0, alpha=0.0), StepController(t_end=t))
        assert res.verdict == "ReachedHorizon"
        assert np.max(np.abs(res.final.u.values - expect)) <= 1e-6 * np.max(expect)

    def test_neumann_mode_decay(self, warm_kernels):
        g = RadialGrid.uniform(3, 1.0, 32)
        L = diffusion_matrix(g)
        lam, vecs = np.linalg.eig(L)
        order = np.argsort(-lam.real)
        lam1 = lam.real[order[1]]  # first nonzero (decaying) mode
        w = vecs[:, order[1]].real
        w /= np.max(np.abs(w))
        mu, delta = 2.0, 1e-3
        u0 = RadialField.density(g, mu + delta * w)
        t = 0.05
        res = run(u0, FluxLimiter(k_f=0.0, alpha=0.0), StepController(t_end=t))
        expect = mu + delta * np.exp(lam1 * t) * w
        assert np.max(np.abs(res.final.u.values - expect)) <= 1e-3 * delta

    def test_sup_norm_nonincreasing(self, warm_kernels):
        g = RadialGrid.uniform(3, 1.0, 128)
        u0 = make_bump(g, 2.0, 0.8, 0.25)
        res = run(u0, FluxLimiter(k_f=0.0, alpha=0.0), StepController(t_end=0.05))
        assert res.verdict == "ReachedHorizon"
        assert np.all(np.diff(res.linf) <= 1e-12 * res.linf[0])


class TestRun:
    def test_steady_horizon(self, warm_kernels):
        g = RadialGrid.uniform(3, 1.0, 64)
        mu = 3.0
        u0 = RadialField.density(g, np.full(64, mu))
        res = run(u0, FluxLimiter(k_f=1.0, alpha=0.15), StepController(t_end=0.01),
                  probes=(2.0, 3.0))
        assert res.verdict == "ReachedHorizon"
        for p in (2.0, 3.0):
            series = res.lp[p]
            assert np.max(np.abs(series - series[0])) <= 1e-10 * series[0]
        assert res.mass_drift <= 1e-12

    def test_mini_blowup_detected(self, warm_kernels):
        g = RadialGrid.uniform(3, 1.0, 128)
        u0 = make_bump(g, 50.0, 0.9, 0.15)
        ctrl = StepController(t_end=1.0, u_blow=1e4 * 50.0)
        res = run(u0, FluxLimiter(k_f=1.0, alpha=0.15), ctrl)
        assert res.verdict == "BlowupDetected"
        assert res.t_detect is not None and 0 < res.t_detect < 1.0
        assert res.linf[-1] >= ctrl.u_blow
        assert res.t_max_extrapolated >= res.t_detect
        assert res.mass_drift <= 1e-10
        assert res.final.u.values.min() >= 0.0
        # L^p concordance: sup norm and L^2 norm both strictly increase over
        # the final decade of sup-norm growth
        mask = res.linf >= res.linf[-1] / 10.0
        assert np.all(np.diff(res.linf[mask]) > 0)
        assert np.all(np.diff(res.lp[2.0][mask]) > 0)

    def test_step_failure_on_dt_collapse(self, warm_kernels):
        g = RadialGrid.uniform(3, 1.0, 128)
        u0 = make_bump(g, 50.0, 0.9, 0.15)
        # threshold far beyond what the grid can represent, and a dt floor the
        # advective CFL must eventually undercut
        ctrl = StepController(t_end=1.0, u_blow=1e9 * 50.0, dt_min=1e-6)
        res = run(u0, FluxLimiter(k_f=1.0, alpha=0.15), ctrl)
        assert res.verdict == "StepFailure"
        assert res.linf[-1] < ctrl.u_blow

    def test_spatial_self_convergence(self, warm_kernels):
        # smooth transport-diffusion at small k_f against a fine reference
        lim = FluxLimiter(k_f=1e-3, alpha=0.15)
        t_end = 0.02
        mu, conc, core = 2.0, 0.5, 0.5

        def solve(n):
            g = RadialGrid.uniform(3, 1.0, n)
            res = run(make_bump(g, mu, conc, core), lim, StepController(t_end=t_end),
                      n_time_samples=1)
            return g, res.final.u.values

        g_ref, u_ref = solve(1024)
        errs = []
        for n in (64, 128, 256):
            g, u = solve(n)
            k = 1024 // n
            restricted = (u_ref * g_ref.volumes).reshape(n, k).sum(axis=1) / g.volumes
            errs.append(np.max(np.abs(u - restricted)))
        orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(orders >= 1.9), (errs, orders)
