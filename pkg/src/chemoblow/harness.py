"""Experiment orchestration: admissibility gate, bound pipeline, simulation,
trajectory inequality check, and persistence of series/report/manifest files.

Outputs per run (all plain text, one datum per line except the CSV):
  series.csv      columns t, mass, linf, lp_<p>..., psi_<p>..., dt
  bound_report.txt  one "label = value # formula" line per pipeline constant
  manifest.txt    verdict, detection/extrapolation times, bound values, and
                  the headline comparison flag bound_leq_t_detect

Sweeps run each instantiation in its own process (runs own all their mutable
state) and assemble a deterministic summary sorted by axis value.
"""
from __future__ import annotations

import concurrent.futures
import csv
import math
import os
from dataclasses import dataclass

import numpy as np

from . import bounds as bnd
from .admissibility import AdmissibilityReport, ModelParams, check_alpha, check_concentration, make_bump
from .config import RunConfig, apply_overrides, load_config
from .errors import BlowupSuspected, ChemoBlowError, ConfigError, NumericalFailureError
from .grid import RadialField, RadialGrid, integrate, lp_norm
from .pde import FluxLimiter, SimResult, StepController, run

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INADMISSIBLE = 3
EXIT_NUMERICAL = 4


class InadmissibleDataError(ChemoBlowError):
    """Initial data or parameters fail the admissibility gate."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


@dataclass
class RunRecord:
    """Everything one experiment produced, in memory."""

    config: RunConfig
    admissibility: AdmissibilityReport
    constants: bnd.BoundConstants
    c_gn_used: float
    c_gn_estimate: float | None
    psi0: float
    t_quadrature: float
    t_closed_form: float
    sim: SimResult
    psi_check: bnd.PsiCheckReport
    bound_leq_t_detect: bool | None
    out_dir: str | None = None

    @property
    def verdict(self) -> str:
        return self.sim.verdict


def build_grid(cfg: RunConfig) -> RadialGrid:
    g = cfg.grid
    if g.grading == "uniform":
        return RadialGrid.uniform(cfg.model.N, cfg.model.R, g.n_cells)
    q = float(g.grading.split(":", 1)[1])
    return RadialGrid.power_graded(cfg.model.N, cfg.model.R, g.n_cells, q)


def build_initial(cfg: RunConfig, grid: RadialGrid) -> RadialField:
    ini = cfg.initial
    if ini.generator == "constant":
        return RadialField.density(grid, np.full(grid.n_cells, ini.mu))
    if ini.generator == "bump":
        return make_bump(grid, ini.mu, ini.concentration, ini.core_radius)
    values = np.loadtxt(ini.profile_file, ndmin=1)
    if values.shape != (grid.n_cells,):
        raise ConfigError(
            f"profile file has {values.shape[0]} values, grid expects {grid.n_cells}")
    return RadialField.density(grid, values)


def run_experiment(cfg: RunConfig, out_dir: str | None = None,
                   write_files: bool = True) -> RunRecord:
    """Execute admissibility -> bound pipeline -> simulation -> Psi check.

    Raises InadmissibleDataError when the gate fails (unless
    output.allow_inadmissible), NumericalFailureError on non-finite fluxes.
    """
    grid = build_grid(cfg)
    u0 = build_initial(cfg, grid)
    mu = integrate(u0) / grid.ball_volume
    params = ModelParams(N=cfg.model.N, R=cfg.model.R, alpha=cfg.model.alpha,
                         k_f=cfg.model.k_f, mu=mu)

    report = AdmissibilityReport((check_alpha(params),)).merged_with(
        check_concentration(u0, mu, cfg.bound.R0))
    if not report.passed and not cfg.output.allow_inadmissible:
        failed = [c.name for c in report.conditions if not c.passed]
        raise InadmissibleDataError(f"admissibility failed: {', '.join(failed)}", report)

    p = cfg.bound.p
    c_gn_est = None
    c_gn = cfg.bound_c_gn()
    if c_gn is None:
        c_gn_est = bnd.estimate_gn_constant(grid, p, cfg.bound.gn_family_size)
        c_gn = cfg.bound.gn_safety * c_gn_est
    constants = bnd.build_constants(params, p, cfg.bound_epsilon(), c_gn)
    psi0 = lp_norm(u0, p) ** p / p
    t_quad = bnd.lower_bound_quadrature(constants, psi0)
    t_closed = bnd.lower_bound_closed_form(constants, psi0)

    probes = cfg.probe_list()
    if p not in probes:
        probes = tuple(sorted(probes + (p,)))
    limiter = FluxLimiter(k_f=cfg.model.k_f, alpha=cfg.model.alpha)
    ctrl = StepController(t_end=cfg.controller.t_end,
                          cfl_diffusion=cfg.controller.cfl_diffusion,
                          cfl_advection=cfg.controller.cfl_advection,
                          dt_min=cfg.controller.dt_min,
                          u_blow=cfg.controller.u_blow_factor * mu)
    sim = run(u0, limiter, ctrl, probes=probes,
              n_time_samples=cfg.output.n_time_samples,
              sample_decades=cfg.output.sample_decades)

    trace = bnd.PsiTrace.from_samples(sim.times, sim.psi[p])
    psi_check = bnd.check_psi_inequality(trace, constants, tol=0.05)

    flag = None
    if sim.t_detect is not None:
        flag = bool(t_quad <= sim.t_detect)
    elif math.isfinite(t_quad) and sim.verdict == "ReachedHorizon":
        # no blow-up observed: the bound claim is not contradicted
        flag = True

    record = RunRecord(config=cfg, admissibility=report, constants=constants,
                       c_gn_used=c_gn, c_gn_estimate=c_gn_est, psi0=psi0,
                       t_quadrature=t_quad, t_closed_form=t_closed, sim=sim,
                       psi_check=psi_check, bound_leq_t_detect=flag)
    if write_files:
        record.out_dir = out_dir or cfg.output.directory
        write_outputs(record, record.out_dir)
    return record


def series_header(probes) -> list[str]:
    cols = ["t", "mass", "linf"]
    cols += [f"lp_{p:g}" for p in probes]
    cols += [f"psi_{p:g}" for p in probes]
    cols.append("dt")
    return cols


def write_series_csv(sim: SimResult, path: str):
    probes = sorted(sim.lp)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(series_header(probes))
        for i in range(sim.times.size):
            row = [repr(float(sim.times[i])), repr(float(sim.mass[i])),
                   repr(float(sim.linf[i]))]
            row += [repr(float(sim.lp[p][i])) for p in probes]
            row += [repr(float(sim.psi[p][i])) for p in probes]
            row.append(repr(float(sim.dts[i])))
            writer.writerow(row)


def write_outputs(record: RunRecord, out_dir: str):
    os.makedirs(out_dir, exist_ok=True)
    write_series_csv(record.sim, os.path.join(out_dir, "series.csv"))

    with open(os.path.join(out_dir, "bound_report.txt"), "w") as fh:
        for line in record.constants.provenance_lines():
            fh.write(line + "\n")
        fh.write(f"psi0 = {record.psi0!r} # Psi(0) = |u0|_p^p / p\n")
        fh.write(f"T_quadrature = {record.t_quadrature!r} # majorant integral\n")
        fh.write(f"T_closed_form = {record.t_closed_form!r} # single-power reduction\n")
        if record.c_gn_estimate is not None:
            fh.write(f"c_gn_estimate = {record.c_gn_estimate!r} # profile-family maximum\n")
        fh.write(f"c_gn_used = {record.c_gn_used!r} # estimate x safety (or override)\n")

    sim = record.sim
    with open(os.path.join(out_dir, "manifest.txt"), "w") as fh:
        fh.write(f"verdict = {sim.verdict}\n")
        fh.write(f"t_detect = {sim.t_detect!r}\n")
        fh.write(f"t_max_extrapolated = {sim.t_max_extrapolated!r} "
                 "# threshold/extrapolation convention, not a theorem\n")
        fh.write(f"power_fit_kappa = {sim.power_fit_kappa!r}\n")
        fh.write(f"u_blow = {sim.u_blow!r}\n")
        fh.write(f"steps_total = {sim.steps_total}\n")
        fh.write(f"mass_drift_max = {sim.mass_drift!r}\n")
        fh.write(f"T_quadrature = {record.t_quadrature!r}\n")
        fh.write(f"T_closed_form = {record.t_closed_form!r}\n")
        fh.write(f"bound_leq_t_detect = {_fmt_flag(record.bound_leq_t_detect)}\n")
        for line in record.psi_check.lines():
            fh.write(line + "\n")
        fh.write("admissibility_passed = "
                 f"{'true' if record.admissibility.passed else 'false'}\n")
        for line in record.admissibility.lines():
            fh.write("admissibility: " + line + "\n")

    with open(os.path.join(out_dir, "config.ini"), "w") as fh:
        fh.write(record.config.to_text())


def _fmt_flag(flag):
    return "n/a" if flag is None else ("true" if flag else "false")


# ---------------------------------------------------------------------------
# Parameter sweeps
# ---------------------------------------------------------------------------

def _sweep_one(args):
    cfg_text, axis, value, out_dir = args
    from .config import from_text
    cfg = from_text(cfg_text)
    apply_overrides(cfg, [f"{axis}={value}"])
    row = {"axis": axis, "value": value, "verdict": "", "t_detect": "",
           "T_quadrature": "", "T_closed": "", "ratio_t_detect_T": ""}
    try:
        rec = run_experiment(cfg, out_dir=out_dir, write_files=out_dir is not None)
        row["verdict"] = rec.verdict
        row["t_detect"] = "" if rec.sim.t_detect is None else repr(rec.sim.t_detect)
        row["T_quadrature"] = repr(rec.t_quadrature)
        row["T_closed"] = repr(rec.t_closed_form)
        if rec.sim.t_detect is not None and math.isfinite(rec.t_quadrature):
            row["ratio_t_detect_T"] = repr(rec.sim.t_detect / rec.t_quadrature)
    except ChemoBlowError as e:
        row["verdict"] = f"error:{type(e).__name__}"
    return row


def sweep(cfg: RunConfig, axis: str, values: list, out_dir: str,
          max_workers: int | None = None) -> str:
    """Run one experiment per axis value concurrently; write one summary row
    per run, ordered by axis value.  Individual failures land in their row and
    the sweep continues.  Returns the summary CSV path."""
    if "." not in axis:
        raise ConfigError(f"sweep axis must be section.key, got {axis!r}")
    # fail fast on an axis that names no config field
    probe = from_text_roundtrip(cfg)
    apply_overrides(probe, [f"{axis}={values[0]}"])

    os.makedirs(out_dir, exist_ok=True)
    cfg_text = cfg.to_text()
    jobs = []
    for v in values:
        sub = os.path.join(out_dir, f"{axis.replace('.', '_')}_{v}")
        jobs.append((cfg_text, axis, v, sub))
    if max_workers is None:
        max_workers = min(len(jobs), os.cpu_count() or 1)
    with concurrent.futures.ProcessPoolExecutor(max_workers=max_workers) as pool:
        rows = list(pool.map(_sweep_one, jobs))
    rows.sort(key=lambda r: _axis_sort_key(r["value"]))

    path = os.path.join(out_dir, "sweep_summary.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["axis", "value", "verdict", "t_detect",
                                                "T_quadrature", "T_closed",
                                                "ratio_t_detect_T"])
        writer.writeheader()
        writer.writerows(rows)
    return path


def _axis_sort_key(v):
    try:
        return (0, float(v))
    except (TypeError, ValueError):
        return (1, str(v))


def from_text_roundtrip(cfg: RunConfig) -> RunConfig:
    from .config import from_text
    return from_text(cfg.to_text())
