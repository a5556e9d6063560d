"""Radial finite-volume grids on the ball B_R(0) in R^N and quadrature on them.

Cells are spherical shells between consecutive face radii; field values carry
cell-average semantics, which makes the discrete volume integral exact for
piecewise-constant data and mass conservation exact by construction in the
solvers built on top.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi

import numpy as np

from .errors import DensityViolationError, GridMismatchError, InvalidParameterError


def unit_sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N: 2 pi^(N/2) / Gamma(N/2)."""
    return 2.0 * pi ** (N / 2.0) / gamma(N / 2.0)


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Shell decomposition of B_R(0) in R^N.

    Attributes
    ----------
    N:
        Spatial dimension, integer >= 3.
    R:
        Ball radius.
    faces:
        n_cells + 1 strictly increasing radii, faces[0] = 0, faces[-1] = R.
    centers:
        Face midpoints (one per cell).
    volumes:
        Shell volumes omega_N (r_+^N - r_-^N) / N with omega_N the unit-sphere
        surface measure.
    """

    N: int
    R: float
    faces: np.ndarray
    centers: np.ndarray = field(init=False)
    volumes: np.ndarray = field(init=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise InvalidParameterError(f"N must be an integer >= 3, got {self.N}")
        if not self.R > 0:
            raise InvalidParameterError(f"R must be positive, got {self.R}")
        faces = np.asarray(self.faces, dtype=float)
        if faces.ndim != 1 or faces.size < 9:
            raise InvalidParameterError("need at least 8 cells")
        if faces[0] != 0.0 or not np.isclose(faces[-1], self.R, rtol=1e-14, atol=0):
            raise InvalidParameterError("faces must span [0, R] exactly")
        if np.any(np.diff(faces) <= 0):
            raise InvalidParameterError("face radii must be strictly increasing")
        faces = faces.copy()
        faces[-1] = self.R
        faces.flags.writeable = False
        object.__setattr__(self, "faces", faces)

        centers = 0.5 * (faces[:-1] + faces[1:])
        volumes = self.omega * np.diff(faces ** self.N) / self.N
        if np.any(volumes <= 0):
            raise InvalidParameterError("all cell volumes must be positive")
        total = volumes.sum()
        if abs(total - self.ball_volume) > 1e-12 * self.ball_volume:
            raise InvalidParameterError("cell volumes do not sum to |B_R|")
        centers.flags.writeable = False
        volumes.flags.writeable = False
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "volumes", volumes)

    @property
    def n_cells(self) -> int:
        return self.faces.size - 1

    @property
    def omega(self) -> float:
        """Surface measure of the unit sphere in R^N."""
        return unit_sphere_area(self.N)

    @property
    def ball_volume(self) -> float:
        return self.omega * self.R ** self.N / self.N

    @property
    def shell_integrals(self) -> np.ndarray:
        """Per-cell values of the radial weight integral (r_+^N - r_-^N)/N."""
        return self.volumes / self.omega

    @property
    def face_areas(self) -> np.ndarray:
        """Sphere areas omega_N r^(N-1) at the faces."""
        return self.omega * self.faces ** (self.N - 1)

    @classmethod
    def uniform(cls, N: int, R: float, n_cells: int) -> "RadialGrid":
        """Equispaced faces; the default layout."""
        if n_cells < 8:
            raise InvalidParameterError(f"n_cells must be >= 8, got {n_cells}")
        return cls(N, float(R), np.linspace(0.0, float(R), n_cells + 1))

    @classmethod
    def power_graded(cls, N: int, R: float, n_cells: int, exponent: float) -> "RadialGrid":
        """Faces R*(i/n)**exponent; exponent > 1 refines toward the origin,
        where radial blow-up concentrates."""
        if n_cells < 8:
            raise InvalidParameterError(f"n_cells must be >= 8, got {n_cells}")
        if not exponent >= 1.0:
            raise InvalidParameterError("grading exponent must be >= 1")
        xi = np.linspace(0.0, 1.0, n_cells + 1)
        return cls(N, float(R), float(R) * xi ** float(exponent))


@dataclass(frozen=True, eq=False)
class RadialField:
    """One real value per cell (cell-average semantics) on a RadialGrid.

    kind="density" additionally enforces nonnegativity.
    """

    grid: RadialGrid
    values: np.ndarray
    kind: str = "generic"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_cells,):
            raise GridMismatchError(
                f"field has {values.shape} values for a {self.grid.n_cells}-cell grid"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError("field values must be finite")
        if self.kind == "density" and np.any(values < 0):
            raise DensityViolationError("density field has negative values")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @classmethod
    def density(cls, grid: RadialGrid, values) -> "RadialField":
        return cls(grid, values, kind="density")

    @classmethod
    def constant(cls, grid: RadialGrid, value: float, kind: str = "generic") -> "RadialField":
        return cls(grid, np.full(grid.n_cells, float(value)), kind=kind)


def same_grid(a: RadialGrid, b: RadialGrid) -> bool:
    return a is b or (a.N == b.N and a.R == b.R and np.array_equal(a.faces, b.faces))


def require_same_grid(f: RadialField, g: RadialGrid):
    if not same_grid(f.grid, g):
        raise GridMismatchError("field does not live on the expected grid")


def integrate(f: RadialField) -> float:
    """Volume integral sum(values * cell_volumes); exact for cell averages."""
    return float(np.dot(f.values, f.grid.volumes))


def lp_norm(f: RadialField, p: float) -> float:
    """L^p norm (sum |v|^p * volume)^(1/p), p >= 1."""
    if not p >= 1.0:
        raise InvalidParameterError(f"p must be >= 1, got {p}")
    return float(np.dot(np.abs(f.values) ** p, f.grid.volumes) ** (1.0 / p))


def cumulative_mass(u: RadialField) -> np.ndarray:
    """M(r_j) = integral_0^{r_j} rho^(N-1) u(rho) drho at every face radius.

    Exact for the piecewise-constant density; M(0) = 0, M nondecreasing, and
    omega_N * M(R) equals integrate(u) up to roundoff.
    """
    if np.any(u.values < 0):
        raise DensityViolationError("cumulative_mass requires a nonnegative density")
    out = np.empty(u.grid.n_cells + 1)
    out[0] = 0.0
    np.cumsum(u.values * u.grid.shell_integrals, out=out[1:])
    return out


def cumulative_mass_at(u: RadialField, radii: np.ndarray) -> np.ndarray:
    """Exact M(r) at arbitrary radii in [0, R] for the piecewise-constant density."""
    g = u.grid
    radii = np.asarray(radii, dtype=float)
    if np.any(radii < 0) or np.any(radii > g.R * (1 + 1e-14)):
        raise InvalidParameterError("radii must lie in [0, R]")
    M = cumulative_mass(u)
    idx = np.clip(np.searchsorted(g.faces, radii, side="right") - 1, 0, g.n_cells - 1)
    return M[idx] + u.values[idx] * (radii ** g.N - g.faces[idx] ** g.N) / g.N
