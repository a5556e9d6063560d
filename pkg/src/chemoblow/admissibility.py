"""Model-parameter and initial-data admissibility checks, plus a generator of
concentrated radial profiles in the admissible class.

The blow-up theory needs three things from the data: the limiter exponent
must satisfy 0 < alpha < (N-2)/(2(N-1)); the initial density must dominate
the uniform profile's mass share on every centered ball; and a core ball
B_R0 must hold an outsized mass fraction.  The second condition is printed in
the source without the (r/R)^N factor, which no continuous profile can meet;
the corrected relative form is checked by default and the literal reading is
kept behind a flag for audit purposes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError
from .grid import RadialField, RadialGrid, cumulative_mass, cumulative_mass_at, integrate


def alpha_upper_bound(N: int) -> float:
    return (N - 2) / (2.0 * (N - 1))


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the system: dimension, ball radius, limiter
    parameters, and the mean density mu derived from the initial data.

    Structural positivity is enforced here; the alpha window is the subject
    of check_alpha, so out-of-range exponents remain expressible (a run may
    deliberately probe inadmissible regimes).
    """

    N: int
    R: float
    alpha: float
    k_f: float
    mu: float | None = None

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise InvalidParameterError(f"N must be an integer >= 3, got {self.N}")
        if not self.R > 0:
            raise InvalidParameterError("R must be positive")
        if not self.k_f > 0:
            raise InvalidParameterError("k_f must be positive")
        if self.mu is not None and not self.mu > 0:
            raise InvalidParameterError("mu must be positive when set")

    @property
    def alpha_bound(self) -> float:
        return alpha_upper_bound(self.N)


@dataclass(frozen=True)
class ConditionVerdict:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass(frozen=True)
class AdmissibilityReport:
    """Per-condition verdicts, each carrying its measured margin."""

    conditions: tuple[ConditionVerdict, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def __getitem__(self, name: str) -> ConditionVerdict:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def merged_with(self, other: "AdmissibilityReport") -> "AdmissibilityReport":
        return AdmissibilityReport(self.conditions + other.conditions)

    def lines(self) -> list[str]:
        out = []
        for c in self.conditions:
            status = "pass" if c.passed else "FAIL"
            line = f"{c.name}: {status} (margin {c.margin:+.6e})"
            if c.detail:
                line += f"  # {c.detail}"
            out.append(line)
        return out


def check_alpha(params: ModelParams) -> ConditionVerdict:
    """Verdict on 0 < alpha < (N-2)/(2(N-1)), margin = bound - alpha."""
    bound = params.alpha_bound
    passed = 0.0 < params.alpha < bound
    return ConditionVerdict(
        name="alpha_range",
        passed=passed,
        margin=bound - params.alpha,
        detail=f"alpha={params.alpha:g}, bound=(N-2)/(2(N-1))={bound:g}",
    )


#: float slack on exact-equality admissibility margins
MARGIN_TOL = 1e-12


def check_concentration(u0: RadialField, mu: float, R0: float,
                        literal: bool = False) -> AdmissibilityReport:
    """Check the initial-data conditions: nonnegativity, mean mass, the
    mass-concentration profile condition on every centered ball, and the core
    threshold on B_R0.

    literal=True audits the profile condition exactly as printed (without the
    (r/R)^N factor); the default compares the mass in B_r against the uniform
    share (r/R)^N of the total.
    """
    g = u0.grid
    if not 0 < R0 < g.R:
        raise InvalidParameterError(f"R0 must lie in (0, R), got {R0}")

    umin = float(u0.values.min())
    nonneg = ConditionVerdict("nonnegative", umin >= 0.0, umin,
                              detail=f"min u0 = {umin:g}")

    total = integrate(u0)
    mean = total / g.ball_volume
    rel_dev = abs(mean - mu) / abs(mu)
    mean_ok = ConditionVerdict("mean_mass", rel_dev <= 1e-10, 1e-10 - rel_dev,
                               detail=f"mean(u0)={mean!r}, mu={mu!r}")

    # mass in B_r at every interior face vs. the required share of the total
    ball_mass = g.omega * cumulative_mass(u0)[1:]
    r = g.faces[1:]
    required = total if literal else (r / g.R) ** g.N * total
    margins = (ball_mass - required) / total
    i_worst = int(np.argmin(margins))
    worst = float(margins[i_worst])
    conc = ConditionVerdict(
        "mass_concentration" + ("_literal" if literal else ""),
        worst >= -MARGIN_TOL,
        worst,
        detail=f"worst at r={r[i_worst]:g} (margin as fraction of total mass)",
    )

    lhs = g.omega * float(cumulative_mass_at(u0, np.array([R0]))[0]) / g.ball_volume
    rhs_val = 0.5 * mu * (g.R / R0) ** g.N
    thr_margin = (lhs - rhs_val) / mu
    threshold = ConditionVerdict(
        "core_threshold",
        thr_margin >= -MARGIN_TOL,
        thr_margin,
        detail=f"mass(B_R0)/|Omega| = {lhs:g} vs (mu/2)(R/R0)^N = {rhs_val:g}, R0={R0:g}",
    )

    return AdmissibilityReport((nonneg, mean_ok, conc, threshold))


def make_bump(grid: RadialGrid, mu: float, concentration: float,
              core_radius: float) -> RadialField:
    """Nonincreasing continuous profile with mean mu placing at least the
    requested mass fraction inside B_core_radius.

    The profile is a compactly supported quartic bump a (1 - (r/c)^2)^2
    carrying exactly `concentration` of the total mass, on top of the uniform
    remainder (1 - concentration) mu.  Cell values are exact cell averages, so
    the discrete profile is nonincreasing and the mass-concentration condition
    holds by construction; concentration -> 0 degenerates to u = mu.
    """
    if not mu > 0:
        raise InvalidParameterError("mu must be positive")
    if not 0 < concentration <= 1:
        raise InvalidParameterError(
            f"concentration must lie in (0, 1], got {concentration}")
    if not 0 < core_radius < grid.R:
        raise InvalidParameterError(
            f"core_radius must lie in (0, R), got {core_radius}")

    N = grid.N
    c = float(core_radius)

    def bump_weight(r):
        # integral_0^r (1 - (rho/c)^2)^2 rho^(N-1) drho, clamped at the support edge
        r = np.minimum(np.asarray(r, dtype=float), c)
        return r ** N / N - 2.0 * r ** (N + 2) / ((N + 2) * c * c) \
            + r ** (N + 4) / ((N + 4) * c ** 4)

    shell = bump_weight(grid.faces[1:]) - bump_weight(grid.faces[:-1])
    cell_avg = shell / grid.shell_integrals
    bump_mass = grid.omega * bump_weight(c)
    amplitude = concentration * mu * grid.ball_volume / bump_mass
    values = amplitude * cell_avg + (1.0 - concentration) * mu
    return RadialField.density(grid, values)
