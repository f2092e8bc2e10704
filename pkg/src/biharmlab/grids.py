"""Uniform radial grid, second-order stencils, annulus quadrature, log-log fits.

The grid covers the truncated exterior domain [1, R_max] with nodes
r_i = 1 + i h, i = 0..M.  The discrete Laplacian is the standard central
approximation of u'' + (N-1)/r u'; the discrete bilaplacian is the
composition of two discrete Laplacians, with ghost values at both ends
supplied by a boundary closure.

Quadrature of annulus integrals uses composite Simpson with interval
doubling until two successive estimates agree to a relative tolerance,
including the sphere-area constant omega_{N-1} = 2 pi^(N/2) / Gamma(N/2)
so that integrals over the exterior domain are absolute, not per-ray.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .closed_forms import DomainError

__all__ = [
    "IntegrationError",
    "RadialGrid",
    "RadialField",
    "radial_laplacian",
    "radial_bilaplacian",
    "laplacian_matrix_extended",
    "BandedOperator",
    "sphere_area",
    "line_quadrature",
    "annulus_quadrature",
    "FitResult",
    "fit_power_law",
]


class IntegrationError(RuntimeError):
    """Quadrature failed (non-finite sample or no convergence)."""


# --------------------------------------------------------------------------
# grid and fields
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialGrid:
    """Uniform nodes r_i = 1 + i h on [1, R_max], i = 0..M.

    M is the number of spacing intervals; the bilaplacian stencil needs
    M >= 8 so a five-point interior band plus closure rows fits.
    """

    N: int
    R_max: float
    M: int

    def __post_init__(self):
        if self.N < 2:
            raise DomainError(f"ambient dimension must be >= 2, got {self.N}")
        if not self.R_max > 1.0:
            raise DomainError(f"R_max must exceed 1, got {self.R_max}")
        if self.M < 8:
            raise DomainError(f"need at least 8 intervals, got M = {self.M}")

    @property
    def h(self) -> float:
        return (self.R_max - 1.0) / self.M

    @property
    def nodes(self) -> np.ndarray:
        return 1.0 + self.h * np.arange(self.M + 1)

    @property
    def n_nodes(self) -> int:
        return self.M + 1

    def refined(self, factor: int = 2) -> "RadialGrid":
        return RadialGrid(self.N, self.R_max, self.M * factor)

    def extended_nodes(self) -> np.ndarray:
        """Nodes including the two ghost positions r_{-1} and r_{M+1}."""
        return 1.0 + self.h * np.arange(-1, self.M + 2)


@dataclass
class RadialField:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n_nodes,):
            raise DomainError(
                f"field length {self.values.shape} does not match grid "
                f"({self.grid.n_nodes} nodes)")

    @classmethod
    def from_function(cls, grid: RadialGrid, fn: Callable) -> "RadialField":
        return cls(grid, np.asarray(fn(grid.nodes), dtype=float))

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))


def _field_values(grid: RadialGrid, field) -> np.ndarray:
    if isinstance(field, RadialField):
        if field.grid != grid:
            raise DomainError("field grid does not match the supplied grid")
        return field.values
    values = np.asarray(field, dtype=float)
    if values.shape != (grid.n_nodes,):
        raise DomainError("field length does not match grid")
    return values


# --------------------------------------------------------------------------
# stencils
# --------------------------------------------------------------------------

def _laplacian_coeffs(grid: RadialGrid, r: np.ndarray):
    """Three-point coefficients (c_minus, c_0, c_plus) of the radial Laplacian."""
    h = grid.h
    adv = (grid.N - 1.0) / (2.0 * h * r)
    return 1.0 / h**2 - adv, -2.0 / h**2 * np.ones_like(r), 1.0 / h**2 + adv


def radial_laplacian(grid: RadialGrid, field) -> np.ndarray:
    """Second-order discrete u'' + (N-1)/r u' at interior nodes.

    Endpoint entries are NaN: evaluating there needs ghost values from a
    boundary closure.
    """
    u = _field_values(grid, field)
    r = grid.nodes
    out = np.full_like(u, np.nan)
    cm, c0, cp = _laplacian_coeffs(grid, r[1:-1])
    out[1:-1] = cm * u[:-2] + c0 * u[1:-1] + cp * u[2:]
    return out


def laplacian_matrix_extended(grid: RadialGrid) -> sp.csr_matrix:
    """Sparse map from the extended vector [u_{-1}, u_0 .. u_M, u_{M+1}]
    (length M+3) to the discrete Laplacian at all nodes 0..M (length M+1)."""
    M = grid.M
    r = grid.nodes
    cm, c0, cp = _laplacian_coeffs(grid, r)
    rows, cols, vals = [], [], []
    for i in range(M + 1):
        # extended index of u_j is j+1
        rows += [i, i, i]
        cols += [i, i + 1, i + 2]
        vals += [cm[i], c0[i], cp[i]]
    return sp.csr_matrix((vals, (rows, cols)), shape=(M + 1, M + 3))


def radial_bilaplacian(grid: RadialGrid, field, closure) -> np.ndarray:
    """Discrete bilaplacian as composed Laplacians, using closure ghosts.

    Returns values at interior nodes 1..M-1 (NaN at the two endpoints).
    """
    if closure is None:
        raise DomainError("radial_bilaplacian requires a boundary closure")
    u = _field_values(grid, field)
    ext = closure.extend(u)                      # length M+3
    lap_all = laplacian_matrix_extended(grid) @ ext   # Laplacian at nodes 0..M
    out = np.full_like(u, np.nan)
    r = grid.nodes
    cm, c0, cp = _laplacian_coeffs(grid, r[1:-1])
    out[1:-1] = cm * lap_all[:-2] + c0 * lap_all[1:-1] + cp * lap_all[2:]
    return out


class BandedOperator:
    """Discrete bilaplacian on the evolved unknowns u_1..u_{M-1}.

    Boundary closures are folded in: the closure expresses the four
    non-evolved values (u_{-1}, u_0, u_M, u_{M+1}) as linear combinations of
    the evolved ones plus an affine part carrying inhomogeneous boundary
    data.  The folded matrix is pentadiagonal; row sums on a constant field
    reproduce the analytic action exactly (bilap of a constant is 0, up to
    the closure's constraint rows).
    """

    def __init__(self, grid: RadialGrid, closure):
        self.grid = grid
        self.closure = closure
        M = grid.M
        lap_ext = laplacian_matrix_extended(grid)          # (M+1) x (M+3)
        r = grid.nodes
        cm, c0, cp = _laplacian_coeffs(grid, r[1:-1])
        # second Laplacian: interior nodes 1..M-1 from Laplacian at 0..M
        rows, cols, vals = [], [], []
        for k, i in enumerate(range(1, M)):
            rows += [k, k, k]
            cols += [i - 1, i, i + 1]
            vals += [cm[k], c0[k], cp[k]]
        lap2 = sp.csr_matrix((vals, (rows, cols)), shape=(M - 1, M + 1))
        self._bilap_ext = lap2 @ lap_ext                   # (M-1) x (M+3)
        E, self._affine_base = closure.elimination()       # (M+3) x (M-1)
        self.matrix = (self._bilap_ext @ E).tocsr()        # (M-1) x (M-1)
        self._solver_cache: dict = {}

    def apply(self, interior: np.ndarray, boundary_data=None) -> np.ndarray:
        """Bilaplacian of the interior unknowns (affine closure part included)."""
        out = self.matrix @ interior
        s = self.closure.affine_extension(boundary_data)
        if s is not None:
            out = out + self._bilap_ext @ s
        return out

    def affine_term(self, boundary_data=None) -> np.ndarray:
        s = self.closure.affine_extension(boundary_data)
        if s is None:
            return np.zeros(self.grid.M - 1)
        return self._bilap_ext @ s

    def shifted_solve(self, dt: float, rhs: np.ndarray) -> np.ndarray:
        """Solve (I + dt * A) x = rhs with a cached sparse LU factorization."""
        key = float(dt)
        solver = self._solver_cache.get(key)
        if solver is None:
            from scipy.sparse.linalg import splu
            n = self.matrix.shape[0]
            system = (sp.identity(n, format="csc") + dt * self.matrix.tocsc())
            try:
                solver = splu(system)
            except RuntimeError as exc:
                raise IntegrationError(
                    f"singular implicit system at dt={dt} "
                    f"(closure determinant {self.closure.inner_determinant():.3e})"
                ) from exc
            if len(self._solver_cache) > 64:
                self._solver_cache.clear()
            self._solver_cache[key] = solver
        return solver.solve(rhs)


# --------------------------------------------------------------------------
# quadrature
# --------------------------------------------------------------------------

def sphere_area(N: int) -> float:
    """Surface area of the unit sphere in R^N, 2 pi^(N/2) / Gamma(N/2)."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def line_quadrature(fn: Callable, a: float, b: float,
                    rel_tol: float = 1e-8, abs_floor: float = 1e-14,
                    max_doublings: int = 24) -> float:
    """Adaptive composite Simpson of fn on [a, b] by interval doubling."""
    if not b > a:
        raise DomainError(f"need a < b, got [{a}, {b}]")

    def sample(n_intervals: int) -> np.ndarray:
        x = np.linspace(a, b, n_intervals + 1)
        vals = np.asarray(fn(x), dtype=float)
        if not np.all(np.isfinite(vals)):
            bad = x[~np.isfinite(vals)][0]
            raise IntegrationError(f"non-finite integrand sample at x = {bad}")
        return vals

    n = 16
    prev = _simpson(sample(n), (b - a) / n)
    for _ in range(max_doublings):
        n *= 2
        cur = _simpson(sample(n), (b - a) / n)
        if abs(cur - prev) <= rel_tol * max(abs(cur), abs(prev)) or (
                abs(cur) < abs_floor and abs(prev) < abs_floor):
            return cur
        prev = cur
    raise IntegrationError(
        f"line quadrature failed to converge on [{a}, {b}]")


def _simpson(fn_vals: np.ndarray, h: float) -> float:
    return h / 3.0 * (fn_vals[0] + fn_vals[-1]
                      + 4.0 * fn_vals[1:-1:2].sum() + 2.0 * fn_vals[2:-1:2].sum())


def annulus_quadrature(nd, integrand: Callable, r_lo: float, r_hi: float,
                       rel_tol: float = 1e-8, abs_floor: float = 1e-14,
                       max_doublings: int = 24) -> float:
    """omega_{N-1} * integral of g(r) r^(N-1) dr over [r_lo, r_hi].

    nd is the ambient dimension or a RadialGrid.  Composite Simpson with
    interval doubling; converged when two successive estimates agree to
    rel_tol (or both fall below the absolute floor).
    """
    N = nd.N if isinstance(nd, RadialGrid) else int(nd)
    if not (1.0 <= r_lo < r_hi):
        raise DomainError(f"need 1 <= r_lo < r_hi, got [{r_lo}, {r_hi}]")
    area = sphere_area(N)

    def sample(n_intervals: int) -> np.ndarray:
        r = np.linspace(r_lo, r_hi, n_intervals + 1)
        vals = np.asarray(integrand(r), dtype=float) * r ** (N - 1.0)
        if not np.all(np.isfinite(vals)):
            bad = r[~np.isfinite(vals)][0]
            raise IntegrationError(f"non-finite integrand sample at r = {bad}")
        return vals

    n = 16
    prev = _simpson(sample(n), (r_hi - r_lo) / n)
    for _ in range(max_doublings):
        n *= 2
        cur = _simpson(sample(n), (r_hi - r_lo) / n)
        if abs(cur - prev) <= rel_tol * max(abs(cur), abs(prev)) or (
                abs(cur) < abs_floor and abs(prev) < abs_floor):
            return area * cur
        prev = cur
    raise IntegrationError(
        f"quadrature failed to converge on [{r_lo}, {r_hi}] "
        f"after {max_doublings} doublings")


# --------------------------------------------------------------------------
# power-law fitting
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    r_squared: float
    residual_max: float
    n_points: int

    def as_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept,
                "r_squared": self.r_squared, "residual_max": self.residual_max,
                "n_points": self.n_points}


def fit_power_law(points) -> FitResult:
    """Least-squares slope/intercept of log y against log x.

    points: sequence of (x, y) pairs or a pair of arrays, all coordinates
    strictly positive.  Resolving an exponent reliably needs the x values to
    span a decade or more; the lemma ladders enforce that on their side.
    """
    pts = np.asarray(list(points) if not isinstance(points, tuple) else
                     np.column_stack(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DomainError("points must be (x, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    if x.size < 2:
        raise DomainError(f"need at least 2 points for a fit, got {x.size}")
    if np.any(x <= 0.0) or np.any(y <= 0.0):
        raise DomainError("power-law fit needs strictly positive x and y")
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    pred = slope * lx + intercept
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=min(1.0, r2),
        residual_max=float(np.max(np.abs(ly - pred))),
        n_points=int(x.size),
    )
