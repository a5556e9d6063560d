"""A priori lower bounds on the blow-up time via the L^p energy functional
Psi(t) = |u(t)|_p^p / p.

Along solutions, Psi satisfies a differential inequality

    Psi' <= B1 Psi + B2 Psi^gamma1 + B3 Psi^gamma2 + B4 Psi^gamma3

whose coefficients are assembled here from the model constants, a Hoelder
constant c(eps, N, p) for the nonlocal cumulative-mass term, an interpolation
(Gagliardo-Nirenberg) constant, and two Young splittings sharing one free
parameter epsilon1 chosen so the gradient terms cancel the diffusive
dissipation exactly.  Integrating the majorant gives the lower bound

    T = integral_{Psi0}^inf d eta / (B1 eta + B2 eta^g1 + B3 eta^g2 + B4 eta^g3)

evaluated by adaptive quadrature, together with the weaker closed form
T = 1 / (A (gamma - 1) Psi0^(gamma - 1)) obtained by majorizing every power by
the largest one.  The scalar comparison ODE (the inequality taken with
equality) is integrated as an independent cross-check: its blow-up time must
reproduce the quadrature value.

Both empirical constants are handled conservatively: the interpolation
constant is estimated as the maximal ratio over a deterministic profile
family (a certified lower estimate of the best constant, to be inflated by a
safety factor), and the symbolic Hoelder constant must dominate an empirical
ratio maximization over random densities before being trusted.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad, solve_ivp

from .admissibility import ModelParams, alpha_upper_bound
from .errors import InvalidParameterError
from .grid import RadialField, RadialGrid, cumulative_mass


# ---------------------------------------------------------------------------
# Hoelder constant for the nonlocal term and its empirical oracle
# ---------------------------------------------------------------------------

def holder_constant(N: int, p: float, epsilon: float, R: float) -> float:
    """Constant c(eps, N, p) with

        omega_N int_0^R u^p (1/r) (int_0^r rho^(N-1) u drho) dr
            <= c (int |u|^(p+1) dx)^(1/(p+1)) (int |u|^(p+1+eps) dx)^(p/(p+1+eps))

    for every nonnegative u on B_R.  Derived by two Hoelder applications: the
    inner cumulative integral against the pure power rho^(N-1) (exponents
    (p+1)/p, p+1), then the leftover radial weight r^(Np/(p+1)-1) against the
    density (exponents (p+1+eps)/p, (p+1+eps)/(1+eps)).  Exact bookkeeping of
    the resulting radial-weight integral gives

        c = N^(-p/(p+1)) * omega_N^(p/(p+1) - p/(p+1+eps))
            * ((p+1)(1+eps) / (eps N p))^((1+eps)/(p+1+eps))
            * R^(eps N p / ((p+1)(p+1+eps)))

    which must dominate the empirical ratio oracle before use (see
    validate_holder_constant).
    """
    from .grid import unit_sphere_area
    omega = unit_sphere_area(N)
    q = p + 1.0 + epsilon
    return (
        N ** (-p / (p + 1.0))
        * omega ** (p / (p + 1.0) - p / q)
        * ((p + 1.0) * (1.0 + epsilon) / (epsilon * N * p)) ** ((1.0 + epsilon) / q)
        * R ** (epsilon * N * p / ((p + 1.0) * q))
    )


def holder_lhs(u: RadialField, p: float) -> float:
    """Exact omega_N int_0^R u^p (M(r)/r) dr for the piecewise-constant density."""
    g = u.grid
    N = g.N
    M = cumulative_mass(u)
    vals = u.values
    rm, rp = g.faces[:-1], g.faces[1:]
    # within cell i: M(r) = M_- + u_i (r^N - r_-^N)/N, so
    # int_cell M(r)/r dr = (M_- - u_i r_-^N/N) ln(r_+/r_-) + u_i (r_+^N - r_-^N)/N^2
    power_part = vals * (rp ** N - rm ** N) / N ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        log_part = (M[:-1] - vals * rm ** N / N) * np.log(rp / rm)
    log_part[0] = 0.0  # first cell: M_- = 0 and r_- = 0, only the power part survives
    per_cell = np.abs(vals) ** p * (log_part + power_part)
    return float(g.omega * per_cell.sum())


def holder_ratio(u: RadialField, p: float, epsilon: float) -> float:
    """Ratio of the nonlocal term to the Hoelder majorant for one density."""
    g = u.grid
    lhs = holder_lhs(u, p)
    a = float(np.dot(np.abs(u.values) ** (p + 1.0), g.volumes)) ** (1.0 / (p + 1.0))
    b = float(np.dot(np.abs(u.values) ** (p + 1.0 + epsilon), g.volumes)) \
        ** (p / (p + 1.0 + epsilon))
    denom = a * b
    if denom == 0.0:
        return 0.0
    return lhs / denom


def random_density(grid: RadialGrid, rng: np.random.Generator) -> RadialField:
    """Rough random density used by the Hoelder oracle: lognormal noise, an
    optional sharp bump, and an occasional near-vacuum tail."""
    n = grid.n_cells
    vals = rng.lognormal(mean=0.0, sigma=rng.uniform(0.2, 2.0), size=n)
    if rng.uniform() < 0.6:
        c = rng.uniform(0.0, grid.R)
        w = rng.uniform(grid.R / n, grid.R / 2)
        vals += rng.uniform(0.5, 200.0) * np.exp(-((grid.centers - c) / w) ** 2)
    if rng.uniform() < 0.3:
        vals[grid.centers > rng.uniform(0.2, 0.9) * grid.R] *= 1e-6
    return RadialField.density(grid, vals)


def validate_holder_constant(grid: RadialGrid, p: float, epsilon: float,
                             n_samples: int = 500, seed: int = 0) -> tuple[float, float]:
    """Maximize the empirical Hoelder ratio over random densities and return
    (symbolic constant, max ratio).  The symbolic constant is trusted only if
    it dominates the maximum."""
    c = holder_constant(grid.N, p, epsilon, grid.R)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_samples):
        r = holder_ratio(random_density(grid, rng), p, epsilon)
        if r > worst:
            worst = r
    return c, worst


# ---------------------------------------------------------------------------
# Interpolation-constant estimator
# ---------------------------------------------------------------------------

def gn_exponents(N: int, p: float) -> tuple[float, float]:
    """(p_exp, a) of the interpolation inequality used by the pipeline:
    p_exp = 2(p+1)/p and a = theta0 = N / (2(p+1))."""
    return 2.0 * (p + 1.0) / p, N / (2.0 * (p + 1.0))


def gn_ratio(grid: RadialGrid, f_vals: np.ndarray, fr_vals: np.ndarray, p: float) -> float:
    """|f|_pexp^pexp / (|f'|_2^(pexp a) |f|_2^(pexp (1-a)) + |f|_2^pexp)."""
    pexp, a = gn_exponents(grid.N, p)
    num = float(np.dot(np.abs(f_vals) ** pexp, grid.volumes))
    l2sq = float(np.dot(f_vals * f_vals, grid.volumes))
    gradsq = float(np.dot(fr_vals * fr_vals, grid.volumes))
    denom = gradsq ** (pexp * a / 2.0) * l2sq ** (pexp * (1.0 - a) / 2.0) \
        + l2sq ** (pexp / 2.0)
    return num / denom


def _gn_family(grid: RadialGrid, family_size: int):
    """Deterministic radial test profiles (values, radial derivative) at cell
    centers: centered and off-center Gaussian bumps across widths, compact
    quartic bumps, and near-constant perturbations."""
    r = grid.centers
    R = grid.R
    out = []
    widths = R * np.geomspace(0.02, 0.6, max(6, family_size // 2))
    for w in widths:
        f = np.exp(-((r / w) ** 2))
        out.append((f, -2.0 * r / w ** 2 * f))
    for c_frac in (1.0 / 3.0, 2.0 / 3.0):
        for w in (R / 16.0, R / 6.0):
            f = np.exp(-(((r - c_frac * R) / w) ** 2))
            out.append((f, -2.0 * (r - c_frac * R) / w ** 2 * f))
    for b_frac in (0.1, 0.3, 0.7, 1.0):
        b = b_frac * R
        s = np.clip(1.0 - (r / b) ** 2, 0.0, None)
        out.append((s ** 2, -4.0 * r / b ** 2 * s))
    for k in (1, 2, 3):
        f = 1.0 + 0.3 * np.cos(k * math.pi * r / R)
        out.append((f, -0.3 * k * math.pi / R * np.sin(k * math.pi * r / R)))
    return out[:family_size] if len(out) >= family_size else out


def estimate_gn_constant(grid: RadialGrid, p: float, family_size: int = 24) -> float:
    """Max interpolation ratio over the deterministic profile family.

    This is a certified lower estimate of the best admissible constant:
    the inequality holds with the returned value for every family member by
    construction.  Callers inflate it by a safety factor (default 2) before
    feeding it to build_constants.
    """
    if family_size < 8:
        raise InvalidParameterError(
            f"family_size must be >= 8 for a usable estimate, got {family_size}")
    _, a = gn_exponents(grid.N, p)
    if not 0.0 < a < 1.0:
        raise InvalidParameterError("interpolation exponent a = N/(2(p+1)) must lie in (0,1)")
    family = _gn_family(grid, family_size)
    return max(gn_ratio(grid, f, fr, p) for f, fr in family)


DEFAULT_GN_SAFETY = 2.0


def default_gn_constant(grid: RadialGrid, p: float, family_size: int = 24,
                        safety: float = DEFAULT_GN_SAFETY) -> float:
    return safety * estimate_gn_constant(grid, p, family_size)


# ---------------------------------------------------------------------------
# Constant pipeline
# ---------------------------------------------------------------------------

def default_epsilon(N: int, p: float) -> float:
    """Safely inside the admissible window 2p - N(1 + eps) > 0."""
    return 0.05 * (2.0 * p / N - 1.0)


@dataclass(frozen=True)
class BoundConstants:
    """The full coefficient chain of the Psi inequality with provenance.

    provenance is an ordered tuple of (label, value, formula) triples, one per
    intermediate quantity, serializable as one "label = value # formula" line
    each; identical inputs produce bit-identical instances.
    """

    N: int
    R: float
    alpha: float
    k_f: float
    mu: float
    p: float
    epsilon: float
    c_gn: float
    c_holder: float
    theta0: float
    theta_eps: float
    theta1: float
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    epsilon1: float
    c_tilde1: float
    B1: float
    B2: float
    B3: float
    B4: float
    gamma1: float
    gamma2: float
    gamma3: float
    gamma: float
    provenance: tuple = ()

    def provenance_lines(self) -> list[str]:
        return [f"{label} = {value!r} # {formula}" for label, value, formula in self.provenance]

    def powers(self) -> tuple[float, float, float, float]:
        return (1.0, self.gamma1, self.gamma2, self.gamma3)

    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.B1, self.B2, self.B3, self.B4)

    def rhs(self, psi):
        """Majorant B1 psi + B2 psi^g1 + B3 psi^g2 + B4 psi^g3."""
        psi = np.asarray(psi, dtype=float)
        return (self.B1 * psi + self.B2 * psi ** self.gamma1
                + self.B3 * psi ** self.gamma2 + self.B4 * psi ** self.gamma3)


def build_constants(params: ModelParams, p: float, epsilon: float | None = None,
                    c_gn: float | None = None) -> BoundConstants:
    """Assemble every constant of the lower-bound pipeline, in derivation order.

    Parameters
    ----------
    params:
        Model constants; mu must be set (it enters the linear coefficient).
    p:
        Energy exponent, N/2 < p < N.
    epsilon:
        Hoelder slack, 0 < eps with 2p - N(1+eps) > 0; default
        0.05 (2p/N - 1).
    c_gn:
        Interpolation constant (estimate it with default_gn_constant).

    The Young parameter epsilon1 is solved in closed form so that the
    gradient terms produced by both interpolation steps cancel the diffusive
    dissipation 4(p-1)/p^2 exactly; every intermediate value lands in the
    provenance trace.
    """
    N, R, alpha, k_f, mu = params.N, params.R, params.alpha, params.k_f, params.mu
    if mu is None or not mu > 0:
        raise InvalidParameterError("params.mu must be set and positive: mu > 0")
    if not (0.0 < alpha < alpha_upper_bound(N)):
        raise InvalidParameterError(
            f"0 < alpha < (N-2)/(2(N-1)) violated: alpha={alpha}, bound={alpha_upper_bound(N)}")
    if not (N / 2.0 < p):
        raise InvalidParameterError(f"N/2 < p violated: p={p}, N/2={N/2}")
    if not (p < N):
        raise InvalidParameterError(f"p < N violated: p={p}, N={N}")
    if epsilon is None:
        epsilon = default_epsilon(N, p)
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon > 0 violated: epsilon={epsilon}")
    if not (2.0 * p - N * (1.0 + epsilon) > 0):
        raise InvalidParameterError(
            f"2p - N(1+eps) > 0 violated: 2p={2*p}, N(1+eps)={N*(1+epsilon)}")
    if c_gn is None or not c_gn > 0:
        raise InvalidParameterError("c_gn must be supplied and positive: C_GN > 0")

    trace = []

    def put(label, value, formula):
        trace.append((label, float(value), formula))
        return float(value)

    put("N", N, "spatial dimension")
    put("R", R, "ball radius")
    put("alpha", alpha, "limiter exponent")
    put("k_f", k_f, "limiter scale")
    put("mu", mu, "mean density of the data")
    put("p", p, "energy exponent, N/2 < p < N")
    put("epsilon", epsilon, "Hoelder slack, 2p - N(1+eps) > 0")
    put("C_GN", c_gn, "interpolation constant (empirical estimate x safety)")

    gamma1 = put("gamma1", (p + 1.0) / p, "gamma1 = (p+1)/p")
    gamma2 = put("gamma2", (2.0 * (p + 1.0) - N) / (2.0 * p - N),
                 "gamma2 = (2(p+1)-N)/(2p-N)")
    q = p + 1.0 + epsilon
    theta0 = put("theta0", N / (2.0 * (p + 1.0)), "theta0 = N/(2(p+1))")
    theta_eps = put("theta_eps", N * (1.0 + epsilon) / (2.0 * q),
                    "theta_eps = N(1+eps)/(2(p+1+eps))")
    theta1 = put("theta1", (p + 1.0) / p * theta_eps,
                 "theta1 = ((p+1)/p) theta_eps, gradient exponent of the eps-interpolation")
    gamma3 = put("gamma3",
                 (2.0 * (p + 1.0) - N * (p + 1.0) * (1.0 + epsilon) / q)
                 / (2.0 * p - N * (1.0 + epsilon) * (p + 1.0) / q),
                 "gamma3 = sigma = (2(p+1) - N(p+1)(1+eps)/(p+1+eps))"
                 "/(2p - N(1+eps)(p+1)/(p+1+eps))")
    gamma = put("gamma", max(gamma2, gamma3), "gamma = max(gamma2, gamma3)")

    c_holder = put("c_holder", holder_constant(N, p, epsilon, R),
                   "Hoelder constant c(eps,N,p) of the nonlocal term (oracle-validated)")
    c1 = put("c1", 2.0 * alpha * mu * k_f * (p - 1.0) / p, "c1 = 2 alpha mu k_f (p-1)/p")
    c2 = put("c2", k_f * (p - 1.0) / p
             + 2.0 * alpha * N * (N - 1.0) * c_holder * k_f * (p - 1.0) / (p * (p + 1.0)),
             "c2 = k_f(p-1)/p + 2 alpha N(N-1) c k_f (p-1)/(p(p+1))")
    c3 = put("c3", 2.0 * alpha * N * (N - 1.0) * c_holder * k_f * (p - 1.0) / (p + 1.0),
             "c3 = 2 alpha N(N-1) c k_f (p-1)/(p+1)")
    c4 = put("c4", theta1 * c_gn,
             "c4 = N(1+eps)(p+1)/(2p(p+1+eps)) C_GN (per unit Young parameter)")
    c5 = put("c5", (1.0 - theta1) * c_gn,
             "c5 = C_GN (2p(p+1+eps) - N(p+1)(1+eps))/(2p(p+1+eps))")

    grad_unit = put("grad_unit", (N / (2.0 * p)) * c_gn * c2 + c3 * c4,
                    "coefficient of int |grad u^(p/2)|^2 per unit epsilon1 "
                    "(both Young splittings share epsilon1)")
    epsilon1 = put("epsilon1", (4.0 * (p - 1.0) / p ** 2) / grad_unit,
                   "epsilon1: gradient terms cancel 4(p-1)/p^2 exactly")
    c_tilde1 = put("c_tilde1",
                   c_gn * (2.0 * p - N) / (2.0 * p * epsilon1 ** (N / (2.0 * p - N))) * c2,
                   "c_tilde1 = C_GN (2p-N)/(2p eps1^(N/(2p-N))) c2")

    B1 = put("B1", c1, "B1 = c1")
    B2 = put("B2", c_gn * (c2 + c3), "B2 = C_GN (c2 + c3), both interpolation branches")
    B3 = put("B3", c_tilde1, "B3 = c_tilde1")
    B4 = put("B4", c3 * c5 * epsilon1 ** (-theta1 / (1.0 - theta1)),
             "B4 = c3 c5 eps1^(-theta1/(1-theta1)), Young remainder of the eps-branch")

    return BoundConstants(
        N=N, R=R, alpha=alpha, k_f=k_f, mu=mu, p=p, epsilon=epsilon, c_gn=c_gn,
        c_holder=c_holder, theta0=theta0, theta_eps=theta_eps, theta1=theta1,
        c1=c1, c2=c2, c3=c3, c4=c4, c5=c5, epsilon1=epsilon1, c_tilde1=c_tilde1,
        B1=B1, B2=B2, B3=B3, B4=B4,
        gamma1=gamma1, gamma2=gamma2, gamma3=gamma3, gamma=gamma,
        provenance=tuple(trace),
    )


# ---------------------------------------------------------------------------
# Lower bounds and the comparison ODE
# ---------------------------------------------------------------------------

def _majorant_time(k: BoundConstants, lo: float) -> float:
    """integral_lo^inf d eta / (sum_i B_i eta^gamma_i) via eta = lo/s."""
    coeffs = k.coefficients()
    powers = k.powers()
    terms = [(b * lo ** (g - 1.0), 2.0 - g) for b, g in zip(coeffs, powers) if b > 0.0]

    def integrand(s):
        with np.errstate(over="ignore"):
            den = 0.0
            for a, e in terms:
                den += a * np.float64(s) ** e
        return float(1.0 / den)

    val, err = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-10, limit=500)
    if not math.isfinite(val) or (val > 0 and err > 1e-8 * val):
        val, err = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=1e-10, limit=5000)
    return val


def lower_bound_quadrature(k: BoundConstants, psi0: float) -> float:
    """Lower bound T on the blow-up time by adaptive quadrature of the
    majorant integral; +inf when every superlinear coefficient vanishes."""
    if not psi0 > 0:
        raise InvalidParameterError(f"Psi0 must be positive, got {psi0}")
    if k.B2 == 0.0 and k.B3 == 0.0 and k.B4 == 0.0:
        return math.inf
    return _majorant_time(k, psi0)


def remark_coefficient(k: BoundConstants, psi0: float) -> float:
    """A = sum_i B_i Psi0^(gamma_i - gamma) of the single-power reduction."""
    return float(sum(b * psi0 ** (g - k.gamma)
                     for b, g in zip(k.coefficients(), k.powers())))


def lower_bound_closed_form(k: BoundConstants, psi0: float) -> float:
    """Closed-form bound T = 1/(A (gamma-1) Psi0^(gamma-1)); never exceeds the
    quadrature value (each power is majorized by the largest one)."""
    if not psi0 > 0:
        raise InvalidParameterError(f"Psi0 must be positive, got {psi0}")
    if not k.gamma > 1:
        raise InvalidParameterError(f"gamma > 1 violated: gamma={k.gamma}")
    A = remark_coefficient(k, psi0)
    if A == 0.0:
        return math.inf
    return 1.0 / (A * (k.gamma - 1.0) * psi0 ** (k.gamma - 1.0))


@dataclass(frozen=True, eq=False)
class PsiTrace:
    """Sampled Psi(t) along a trajectory with forward-difference derivatives."""

    times: np.ndarray
    values: np.ndarray
    dvalues: np.ndarray
    blow_up_time: float | None = None

    @classmethod
    def from_samples(cls, times, values, blow_up_time=None) -> "PsiTrace":
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=float)
        if times.ndim != 1 or times.shape != values.shape:
            raise InvalidParameterError("times and values must be matching 1-d arrays")
        if times.size >= 2 and np.any(np.diff(times) <= 0):
            raise InvalidParameterError("sample times must be strictly increasing")
        if np.any(values < 0):
            raise InvalidParameterError("Psi values must be nonnegative")
        dv = np.diff(values) / np.diff(times) if times.size >= 2 else np.empty(0)
        return cls(times=times, values=values, dvalues=dv, blow_up_time=blow_up_time)


def comparison_ode(k: BoundConstants, psi0: float, t_end: float,
                   cap: float | None = None) -> PsiTrace:
    """Integrate phi' = B1 phi + B2 phi^g1 + B3 phi^g2 + B4 phi^g3 from psi0
    by adaptive Runge-Kutta until t_end or phi > cap (default 1e12).

    When the cap is hit, the reported blow-up time is the crossing time plus
    the (tiny) majorant integral of the remaining tail, and it must agree
    with lower_bound_quadrature to high accuracy.
    """
    if not psi0 > 0:
        raise InvalidParameterError(f"Psi0 must be positive, got {psi0}")
    superlinear = k.B2 > 0 or k.B3 > 0 or k.B4 > 0
    if cap is None:
        # dominant-power tail beyond the cap contributes (psi0/cap)^(gamma-1)
        # relative; pick the cap so that stays below 1e-12 while keeping the
        # crossing time representable and y^gamma free of overflow for steep
        # tuples
        decades = min(8.0, 12.0 / (k.gamma - 1.0)) if superlinear else 8.0
        cap = psi0 * 10.0 ** decades
    y_cap = cap / psi0

    # blow-up times range over dozens of orders of magnitude across constant
    # tuples; integrating tau = t/scale, y = psi/psi0 keeps both step sizes
    # and powers representable.  The scale is pure normalization from the
    # majorant integral and does not bias the RK trajectory.
    scale = _majorant_time(k, psi0) if superlinear else 1.0
    coef = [scale * b * psi0 ** (g - 1.0)
            for b, g in zip(k.coefficients(), k.powers())]
    powers = k.powers()

    def f(tau, y):
        # trial stages may overshoot below zero; the majorant is only
        # defined (and needed) for nonnegative psi
        yy = y[0]
        if yy <= 0.0:
            return [0.0]
        return [sum(a * yy ** g for a, g in zip(coef, powers))]

    def hit_cap(tau, y):
        return y[0] - y_cap

    hit_cap.terminal = True
    hit_cap.direction = 1.0

    sol = solve_ivp(f, (0.0, t_end / scale), [1.0], method="DOP853",
                    rtol=1e-10, atol=1e-13, events=hit_cap, dense_output=False)
    times = sol.t * scale
    values = sol.y[0] * psi0
    blow_up_time = None
    if superlinear:
        if sol.status == 1 and sol.t_events[0].size:
            t_hit = float(sol.t_events[0][0]) * scale
            blow_up_time = t_hit + _majorant_time(k, cap)
            if times[-1] < t_hit:
                times = np.append(times, t_hit)
                values = np.append(values, float(sol.y_events[0][0][0]) * psi0)
        elif sol.status == -1 and values[-1] > psi0:
            # step-size underflow inside the singular tail: the RK leg stands,
            # close the remainder with the majorant integral
            blow_up_time = float(times[-1]) + _majorant_time(k, float(values[-1]))
    # steps shrink to nothing approaching the cap; drop repeated times
    keep = np.concatenate(([True], np.diff(times) > 0))
    return PsiTrace.from_samples(times[keep], values[keep], blow_up_time=blow_up_time)


# ---------------------------------------------------------------------------
# Trajectory inequality check
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PsiCheckReport:
    """Outcome of checking Psi' <= majorant along a trajectory.

    Informational: the interpolation constant is empirical, so isolated small
    violations flag a too-optimistic constant rather than a hard failure.
    """

    n_checked: int
    violations: int
    min_slack: float
    min_rel_slack: float | None
    worst_time: float | None
    tol: float

    def lines(self) -> list[str]:
        rel = "n/a" if self.min_rel_slack is None else f"{self.min_rel_slack:+.6e}"
        return [
            f"psi_checked_points = {self.n_checked}",
            f"psi_violations = {self.violations}",
            f"psi_min_slack = {self.min_slack:+.6e}",
            f"psi_min_relative_slack = {rel}",
            f"psi_tolerance = {self.tol}",
        ]


def check_psi_inequality(trace: PsiTrace, k: BoundConstants, tol: float = 0.05) -> PsiCheckReport:
    """Evaluate slack = majorant(Psi(t)) - Psi'(t) (central differences) at
    every interior sample; a point violates when slack < -tol * majorant."""
    t, v = trace.times, trace.values
    if t.size < 3:
        raise InvalidParameterError("trace must have at least 3 samples")
    dpsi = (v[2:] - v[:-2]) / (t[2:] - t[:-2])
    mid = v[1:-1]
    rhs = k.rhs(mid)
    slack = rhs - dpsi
    bad = slack < -tol * rhs
    min_slack = float(slack.min())
    pos = rhs > 0
    min_rel = float((slack[pos] / rhs[pos]).min()) if pos.any() else None
    worst_time = float(t[1:-1][np.argmin(slack)])
    return PsiCheckReport(
        n_checked=int(mid.size),
        violations=int(bad.sum()),
        min_slack=min_slack,
        min_rel_slack=min_rel,
        worst_time=worst_time,
        tol=tol,
    )
