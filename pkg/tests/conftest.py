"""Shared fixtures: the frozen blow-up reference scenario and session-cached
expensive runs (the JIT warmup keeps timed tests honest)."""
from __future__ import annotations

import numpy as np
import pytest

from chemoblow.config import RunConfig, apply_overrides
from chemoblow.grid import RadialGrid, RadialField
from chemoblow.harness import run_experiment
from chemoblow.pde import FluxLimiter, StepController, run

# Reference blow-up scenario (fixed; golden values in test_acceptance refer
# to it): concentrated admissible bump under the standard limiter.
REFERENCE = dict(
    N=3, R=1.0, alpha=0.15, k_f=1.0,
    mu=50.0, concentration=0.5, core_radius=0.4,
    u_blow_factor=1e6, t_end=1.0, bound_p=2.0, R0=0.9,
)


def reference_config(n_cells: int) -> RunConfig:
    cfg = RunConfig()
    apply_overrides(cfg, [
        f"model.N={REFERENCE['N']}",
        f"model.R={REFERENCE['R']}",
        f"model.alpha={REFERENCE['alpha']}",
        f"model.k_f={REFERENCE['k_f']}",
        f"grid.n_cells={n_cells}",
        "initial.generator=bump",
        f"initial.mu={REFERENCE['mu']}",
        f"initial.concentration={REFERENCE['concentration']}",
        f"initial.core_radius={REFERENCE['core_radius']}",
        f"controller.t_end={REFERENCE['t_end']}",
        f"controller.u_blow_factor={REFERENCE['u_blow_factor']}",
        f"bound.p={REFERENCE['bound_p']}",
        f"bound.R0={REFERENCE['R0']}",
    ])
    return cfg


@pytest.fixture(scope="session")
def warm_kernels():
    """Trigger JIT compilation before any timed assertion."""
    g = RadialGrid.uniform(3, 1.0, 16)
    u0 = RadialField.density(g, np.full(16, 1.0))
    run(u0, FluxLimiter(k_f=1.0, alpha=0.1), StepController(t_end=1e-4))
    return True


@pytest.fixture(scope="session")
def reference_runs(warm_kernels):
    """Reference blow-up experiment at three nested resolutions, with timing."""
    import time
    out = {}
    for n in (256, 512, 1024):
        t0 = time.perf_counter()
        rec = run_experiment(reference_config(n), write_files=False)
        out[n] = (rec, time.perf_counter() - t0)
    return out
