"""Exact radial comparison functions and the critical-exponent bookkeeping.

Everything in this module is a closed form: values, radial derivatives,
Laplacians and bilaplacians are analytic expressions, never finite
differences.  For a radial function g(r) in ambient dimension N the
Laplacian is g'' + (N-1)/r g'; all functions live on the exterior region
r >= 1 of the unit ball.

The harmonic weight vanishes at r = 1 and is annihilated by the Laplacian;
the biharmonic weight vanishes together with its slope at r = 1 and is
annihilated by the bilaplacian.  Their Laplacians follow the closed forms

    harmonic:    0                      (all N)
    biharmonic:  4 ln r                 (N = 2)
                 2 (N-2) r^(2-N)        (N = 3, N >= 5)
                 4 r^(-2)               (N = 4)

Note the biharmonic weight's Laplacian vanishes at r = 1 only for N = 2;
for N >= 3 it equals 2(N-2) (resp. 4 at N = 4) there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "DomainError",
    "ExponentSet",
    "compute_exponents",
    "HarmonicWeight",
    "BiharmonicWeight",
    "Supersolution",
    "make_supersolution",
    "BoundarySignReport",
    "check_supersolution_boundary_signs",
    "forcing_in_class",
    "boundary_weight",
]


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


# --------------------------------------------------------------------------
# critical exponents
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentSet:
    """All scalar exponents attached to a pair (p, N).

    p_crit is +inf for N <= 4 (no finite critical exponent below dimension
    five); comparisons of the form p <= p_crit are then always true.
    """

    p: float
    N: int
    p_conj: float       # p' = p/(p-1), the Holder conjugate
    p_crit: float       # N/(N-4) for N >= 5, +inf otherwise
    p_fuj: float        # 1 + 4/N
    omega_crit: float   # 4p/(p-1), forcing-decay threshold
    theta: float        # 1/(p-1) - N/4, lifespan scaling exponent

    @property
    def is_supercritical(self) -> bool:
        return self.p > self.p_crit

    @property
    def lifespan_slope(self) -> float:
        """Predicted slope of log T vs log eps, -1/theta (theta > 0 only)."""
        if self.theta <= 0:
            raise DomainError("lifespan power law needs theta > 0 (p < p_fuj)")
        return -1.0 / self.theta

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "N": self.N,
            "p_conj": self.p_conj,
            "p_crit": self.p_crit if math.isfinite(self.p_crit) else "inf",
            "p_fuj": self.p_fuj,
            "omega_crit": self.omega_crit,
            "theta": self.theta,
        }


def compute_exponents(p: float, N: int) -> ExponentSet:
    """Derive every exponent used by the verification suites from (p, N)."""
    if not p > 1.0:
        raise DomainError(f"p must exceed 1, got {p}")
    if not (isinstance(N, (int, np.integer)) and N >= 2):
        raise DomainError(f"N must be an integer >= 2, got {N}")
    N = int(N)
    p_conj = p / (p - 1.0)
    p_crit = N / (N - 4.0) if N >= 5 else math.inf
    return ExponentSet(
        p=float(p),
        N=N,
        p_conj=p_conj,
        p_crit=p_crit,
        p_fuj=1.0 + 4.0 / N,
        omega_crit=4.0 * p / (p - 1.0),
        theta=1.0 / (p - 1.0) - N / 4.0,
    )


# --------------------------------------------------------------------------
# harmonic and biharmonic weights
# --------------------------------------------------------------------------

class HarmonicValues(NamedTuple):
    value: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    laplacian: np.ndarray  # identically zero


class BiharmonicValues(NamedTuple):
    value: np.ndarray
    d1: np.ndarray
    laplacian: np.ndarray
    d_laplacian: np.ndarray
    bilaplacian: np.ndarray  # identically zero


def _check_radius(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(r < 1.0):
        raise DomainError(f"radius below the inner boundary r=1: min r = {r.min()}")
    return r


@dataclass(frozen=True)
class HarmonicWeight:
    """Radial harmonic function vanishing on the unit sphere.

    ln r for N = 2, 1 - r^(2-N) for N >= 3.  Nonnegative and increasing on
    r >= 1; Laplacian and bilaplacian are identically zero.
    """

    N: int

    def __post_init__(self):
        if self.N < 2:
            raise DomainError(f"N must be >= 2, got {self.N}")

    def eval(self, r) -> HarmonicValues:
        r = _check_radius(r)
        zero = np.zeros_like(r)
        if self.N == 2:
            return HarmonicValues(np.log(r), 1.0 / r, -1.0 / r**2, zero)
        n = self.N
        return HarmonicValues(
            1.0 - r ** (2.0 - n),
            (n - 2.0) * r ** (1.0 - n),
            (n - 2.0) * (1.0 - n) * r ** (-float(n)),
            zero,
        )

    def __call__(self, r) -> np.ndarray:
        return self.eval(r).value

    # 3rd/4th radial derivatives, needed by the test-function machinery
    def d3(self, r) -> np.ndarray:
        r = _check_radius(r)
        if self.N == 2:
            return 2.0 / r**3
        n = self.N
        return (n - 2.0) * (1.0 - n) * (-float(n)) * r ** (-n - 1.0)

    def d4(self, r) -> np.ndarray:
        r = _check_radius(r)
        if self.N == 2:
            return -6.0 / r**4
        n = self.N
        return (n - 2.0) * (1.0 - n) * (-float(n)) * (-n - 1.0) * r ** (-n - 2.0)


@dataclass(frozen=True)
class BiharmonicWeight:
    """Radial biharmonic function with double vanishing at the unit sphere.

    Four branches (N = 2, 3, 4, >= 5); all satisfy B(1) = B'(1) = 0,
    B >= 0 on r >= 1 and bilaplacian identically zero.  The Laplacian at
    r = 1 is 0 for N = 2 but 2(N-2) (resp. 4) for N = 3, N >= 5 (resp.
    N = 4).
    """

    N: int

    def __post_init__(self):
        if self.N < 2:
            raise DomainError(f"N must be >= 2, got {self.N}")

    def eval(self, r) -> BiharmonicValues:
        r = _check_radius(r)
        zero = np.zeros_like(r)
        n = self.N
        if n == 2:
            value = r**2 * np.log(r) - r**2 + np.log(r) + 1.0
            d1 = 2.0 * r * np.log(r) - r + 1.0 / r
            lap = 4.0 * np.log(r)
            dlap = 4.0 / r
        elif n == 3:
            value = 1.0 / r + r - 2.0
            d1 = -(r**-2.0) + 1.0
            lap = 2.0 / r
            dlap = -2.0 / r**2
        elif n == 4:
            value = 2.0 * np.log(r) + r**-2.0 - 1.0
            d1 = 2.0 / r - 2.0 * r**-3.0
            lap = 4.0 * r**-2.0
            dlap = -8.0 * r**-3.0
        else:
            c = (n - 2.0) / (n - 4.0)
            value = r ** (2.0 - n) - 1.0 + c * (1.0 - r ** (4.0 - n))
            d1 = (2.0 - n) * r ** (1.0 - n) + (n - 2.0) * r ** (3.0 - n)
            lap = 2.0 * (n - 2.0) * r ** (2.0 - n)
            dlap = 2.0 * (n - 2.0) * (2.0 - n) * r ** (1.0 - n)
        return BiharmonicValues(value, d1, lap, dlap, zero)

    def __call__(self, r) -> np.ndarray:
        return self.eval(r).value

    def d2(self, r) -> np.ndarray:
        """Second radial derivative (from d1 closed forms)."""
        r = _check_radius(r)
        n = self.N
        if n == 2:
            return 2.0 * np.log(r) + 1.0 - r**-2.0
        if n == 3:
            return 2.0 * r**-3.0
        if n == 4:
            return -2.0 * r**-2.0 + 6.0 * r**-4.0
        return (2.0 - n) * (1.0 - n) * r ** (-float(n)) + (n - 2.0) * (3.0 - n) * r ** (2.0 - n)

    def d3(self, r) -> np.ndarray:
        r = _check_radius(r)
        n = self.N
        if n == 2:
            return 2.0 / r + 2.0 * r**-3.0
        if n == 3:
            return -6.0 * r**-4.0
        if n == 4:
            return 4.0 * r**-3.0 - 24.0 * r**-5.0
        return ((2.0 - n) * (1.0 - n) * (-float(n)) * r ** (-n - 1.0)
                + (n - 2.0) * (3.0 - n) * (2.0 - n) * r ** (1.0 - n))

    def d4(self, r) -> np.ndarray:
        r = _check_radius(r)
        n = self.N
        if n == 2:
            return -2.0 * r**-2.0 - 6.0 * r**-4.0
        if n == 3:
            return 24.0 * r**-5.0
        if n == 4:
            return -12.0 * r**-4.0 + 120.0 * r**-6.0
        return ((2.0 - n) * (1.0 - n) * (-float(n)) * (-n - 1.0) * r ** (-n - 2.0)
                + (n - 2.0) * (3.0 - n) * (2.0 - n) * (1.0 - n) * r ** (-float(n)))


def boundary_weight(bc_name: str, N: int):
    """Weight function paired with a boundary-condition family.

    Harmonic for navier/neumann, biharmonic for dirichlet, constant one for
    the three remaining pairs.  Returns an object with __call__(r).
    """
    name = bc_name.lower().replace("_", "-")
    if name in ("navier", "neumann"):
        return HarmonicWeight(N)
    if name == "dirichlet":
        return BiharmonicWeight(N)
    if name in ("dirichlet-navier", "kuttler-sigillito", "neumann-navier"):
        return _UnitWeight(N)
    raise DomainError(f"unknown boundary condition name: {bc_name!r}")


@dataclass(frozen=True)
class _UnitWeight:
    """Constant weight 1 (problems with purely derivative/Laplacian pairs)."""

    N: int

    def eval(self, r):
        r = _check_radius(r)
        z = np.zeros_like(r)
        return HarmonicValues(np.ones_like(r), z, z, z)

    def __call__(self, r) -> np.ndarray:
        return np.ones_like(_check_radius(r))

    def d3(self, r):
        return np.zeros_like(_check_radius(r))

    def d4(self, r):
        return np.zeros_like(_check_radius(r))


# --------------------------------------------------------------------------
# the explicit supersolution of the supercritical regime
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Supersolution:
    """v(r) = eps * r^(-m), admissible for 4/(p-1) < m < N-4, N >= 5.

    Carries the exact bilaplacian constant
        M = m (m+2) (m-N+2) (m-N+4) > 0 inside the window
    and the derived forcing f(r) = bilap(v) - v^p
        = eps M r^(-m-4) - eps^p r^(-mp),
    strictly positive on r >= 1 whenever eps^(p-1) < M.
    """

    p: float
    N: int
    m: float
    epsilon: float
    M: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "M",
            self.m * (self.m + 2.0) * (self.m - self.N + 2.0) * (self.m - self.N + 4.0),
        )

    # -- profile and exact derivatives ------------------------------------
    def profile(self, r) -> np.ndarray:
        r = _check_radius(r)
        return self.epsilon * r ** (-self.m)

    def profile_d1(self, r) -> np.ndarray:
        r = _check_radius(r)
        return -self.epsilon * self.m * r ** (-self.m - 1.0)

    def profile_laplacian(self, r) -> np.ndarray:
        r = _check_radius(r)
        m, n = self.m, self.N
        return self.epsilon * m * (m - n + 2.0) * r ** (-m - 2.0)

    def profile_d_laplacian(self, r) -> np.ndarray:
        r = _check_radius(r)
        m, n = self.m, self.N
        return -self.epsilon * m * (m + 2.0) * (m - n + 2.0) * r ** (-m - 3.0)

    def profile_bilaplacian(self, r) -> np.ndarray:
        r = _check_radius(r)
        return self.epsilon * self.M * r ** (-self.m - 4.0)

    def forcing(self, r) -> np.ndarray:
        """f = bilap(v) - v^p, the forcing that makes v a stationary solution."""
        r = _check_radius(r)
        return (self.epsilon * self.M * r ** (-self.m - 4.0)
                - self.epsilon**self.p * r ** (-self.m * self.p))

    @property
    def epsilon_positivity_bound(self) -> float:
        """Largest eps with strictly positive forcing, M^(1/(p-1))."""
        return self.M ** (1.0 / (self.p - 1.0))

    @property
    def forcing_is_positive(self) -> bool:
        # -mp + m + 4 < 0 inside the window, so positivity at r = 1 suffices
        return self.epsilon ** (self.p - 1.0) < self.M

    def as_dict(self) -> dict:
        return {"p": self.p, "N": self.N, "m": self.m,
                "epsilon": self.epsilon, "M": self.M}


def make_supersolution(p: float, N: int, m: float, epsilon: float) -> Supersolution:
    """Validate the admissibility window and build the supersolution."""
    if not (isinstance(N, (int, np.integer)) and N >= 5):
        raise DomainError(f"supersolution needs integer N >= 5, got {N}")
    N = int(N)
    p_crit = N / (N - 4.0)
    if not p > p_crit:
        raise DomainError(
            f"supersolution needs supercritical p > N/(N-4) = {p_crit}, got p = {p}")
    lo = 4.0 / (p - 1.0)
    hi = N - 4.0
    if not m > lo:
        raise DomainError(f"m <= 4/(p-1): m = {m} violates m > {lo}")
    if not m < hi:
        raise DomainError(f"m >= N-4: m = {m} violates m < {hi}")
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    return Supersolution(p=float(p), N=N, m=float(m), epsilon=float(epsilon))


# --------------------------------------------------------------------------
# boundary sign report under both normal conventions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundarySignReport:
    """The four boundary quantities of v at r = 1 under both conventions.

    The published existence argument asserts positivity of all four, but the
    slope quantities cannot be simultaneously positive under one convention:
    d/dr v(1) = -eps*m < 0 while d/dr (lap v)(1) > 0.  We therefore report
    values under nu = +e_r (radial, pointing away from the ball) and
    nu = -e_r, and record which convention makes each asserted inequality
    hold.
    """

    value: float                  # v(1) = eps, convention free
    neg_laplacian: float          # -lap v(1), convention free
    slope_plus_er: float          # dv/dnu under nu = +e_r
    slope_minus_er: float
    lap_slope_plus_er: float      # d(lap v)/dnu under nu = +e_r
    lap_slope_minus_er: float

    def positivity_conventions(self) -> dict:
        """Which convention(s) make each asserted boundary inequality > 0."""
        def conv(plus, minus):
            if plus > 0 and minus > 0:
                return "both"
            if plus > 0:
                return "+e_r"
            if minus > 0:
                return "-e_r"
            return "neither"

        return {
            "value": "both" if self.value > 0 else "neither",
            "neg_laplacian": "both" if self.neg_laplacian > 0 else "neither",
            "slope": conv(self.slope_plus_er, self.slope_minus_er),
            "laplacian_slope": conv(self.lap_slope_plus_er, self.lap_slope_minus_er),
        }


def check_supersolution_boundary_signs(s: Supersolution) -> BoundarySignReport:
    """Evaluate v, dv/dnu, -lap v, d(lap v)/dnu at r = 1, both conventions."""
    v1 = float(s.profile(1.0))
    dv = float(s.profile_d1(1.0))               # d/dr at r = 1, = -eps*m
    lap1 = float(s.profile_laplacian(1.0))      # eps*m*(m-N+2) < 0 in window
    dlap = float(s.profile_d_laplacian(1.0))    # -eps*m*(m+2)*(m-N+2) > 0
    return BoundarySignReport(
        value=v1,
        neg_laplacian=-lap1,
        slope_plus_er=dv,
        slope_minus_er=-dv,
        lap_slope_plus_er=dlap,
        lap_slope_minus_er=-dlap,
    )


# --------------------------------------------------------------------------
# forcing decay-class membership
# --------------------------------------------------------------------------

def forcing_in_class(f: Callable[[np.ndarray], np.ndarray], omega: float,
                     mode: str, r_probe: Sequence[float]) -> bool:
    """Sampled membership test for the decay classes of the forcing.

    mode "plus":  f >= 0 everywhere and f(r) >= C r^(-omega) on the tail for
                  some C > 0 (the compensated ratio f * r^omega must not
                  decay along the tail).
    mode "minus": f > 0 everywhere and f(r) <= C r^(-omega) on the tail (the
                  compensated ratio must not grow along the tail).

    Probes must span at least two decades; the trend is fitted on the last
    decade in log-log coordinates.
    """
    if mode not in ("plus", "minus"):
        raise DomainError(f"mode must be 'plus' or 'minus', got {mode!r}")
    r = np.sort(np.asarray(list(r_probe), dtype=float))
    if r.size == 0:
        raise DomainError("empty probe set")
    if r.size < 3 or r[-1] / r[0] < 99.0:
        raise DomainError("probes must span at least two decades of r")
    fv = np.asarray(f(r), dtype=float)
    if mode == "plus" and np.any(fv < 0.0):
        return False
    if mode == "minus" and np.any(fv <= 0.0):
        return False

    tail = r >= r[-1] / 10.0
    if tail.sum() < 2:
        tail = np.zeros_like(r, dtype=bool)
        tail[-2:] = True
    rt, ft = r[tail], fv[tail]
    if np.any(ft <= 0.0):
        # zero on the tail: no positive lower bound C r^(-omega) can hold
        return False
    q = ft * rt**omega
    slope = np.polyfit(np.log(rt), np.log(q), 1)[0]
    tol = 0.05
    if mode == "plus":
        return bool(slope >= -tol)
    return bool(slope <= tol)
