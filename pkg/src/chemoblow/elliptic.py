"""Quasi-static attractant equation 0 = lap(v) - mu + u on the ball, solved in
radial form by explicit quadrature.

Integrating (r^(N-1) v_r)_r = (mu - u) r^(N-1) once gives

    v_r(r) = mu r / N - r^(1-N) M(r),      M(r) = integral_0^r rho^(N-1) u drho,

and differentiating again,

    v_rr(r) = mu / N - u(r) + (N-1) r^(-N) M(r).

Both are evaluated exactly (per cell) from the cumulative mass of the
piecewise-constant density, so no linear solve is needed.  The Neumann
condition v_r(R) = 0 holds identically because M(R) = mu R^N / N whenever mu
is the volume mean of u; v itself is reconstructed only for diagnostics and
normalized to zero mean.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CompatibilityError
from .grid import RadialField, RadialGrid, cumulative_mass, cumulative_mass_at, integrate

#: relative tolerance on |mu - mean(u)| for the Neumann problem to be solvable
MU_COMPAT_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class ChemoGradient:
    """Radial derivatives of the attractant: v_r at faces, v_rr and zero-mean v
    at cell centers."""

    grid: RadialGrid
    vr_faces: np.ndarray
    vrr_cells: np.ndarray
    v_cells: np.ndarray


def check_compatibility(u: RadialField, mu: float):
    mean = integrate(u) / u.grid.ball_volume
    scale = max(abs(mu), abs(mean), 1e-300)
    if abs(mu - mean) > MU_COMPAT_RTOL * scale:
        raise CompatibilityError(
            f"mu={mu!r} is not the volume mean of u ({mean!r}); "
            "the Neumann problem has no solution"
        )


def solve_gradient(u: RadialField, mu: float) -> ChemoGradient:
    """Solve 0 = lap(v) - mu + u for the radial gradient field.

    Requires mu to equal the volume mean of u to relative 1e-10 (solvability
    of the Neumann problem).  Returns v_r at faces (0 at both boundaries up to
    roundoff), v_rr at cell centers, and the zero-mean reconstruction of v.
    """
    check_compatibility(u, mu)
    g = u.grid
    N = g.N

    M_faces = cumulative_mass(u)
    r = g.faces[1:]
    vr = np.empty(g.n_cells + 1)
    vr[0] = 0.0
    vr[1:] = mu * r / N - M_faces[1:] / r ** (N - 1)

    rc = g.centers
    M_centers = cumulative_mass_at(u, rc)
    vrr = mu / N - u.values + (N - 1) * M_centers / rc ** N

    # diagnostic reconstruction: trapezoidal cumulative integral of v_r, then
    # shift to zero volume mean as required of the attractant
    v_faces = np.empty(g.n_cells + 1)
    v_faces[0] = 0.0
    np.cumsum(0.5 * (vr[:-1] + vr[1:]) * np.diff(g.faces), out=v_faces[1:])
    v_cells = np.interp(rc, g.faces, v_faces)
    v_cells = v_cells - np.dot(v_cells, g.volumes) / g.ball_volume

    return ChemoGradient(grid=g, vr_faces=vr, vrr_cells=vrr, v_cells=v_cells)


def residual(u: RadialField, grad: ChemoGradient, mu: float) -> float:
    """Max over cells of |discrete lap(v) - (mu - u)|.

    The discrete Laplacian is the conservative face difference
    (A v_r)_{i+1/2} - (A v_r)_{i-1/2} divided by the cell volume, which for
    the quadrature solution cancels to roundoff; the value is an a posteriori
    sanity check on the solve.
    """
    g = u.grid
    flux = g.face_areas * grad.vr_faces
    lap = np.diff(flux) / g.volumes
    return float(np.max(np.abs(lap - (mu - u.values))))
