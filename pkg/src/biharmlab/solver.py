"""IMEX time integration of u_t + bilap(u) = |u|^p + f on the truncated
radial domain, with adaptive stepping, blow-up detection, stationarity
detection and weak-identity residuals.

One step solves (I + dt * bilap_h) u^{n+1} = u^n + dt (|u^n|^p + f): the
stiff linear part is implicit (a pentadiagonal solve), the nonlinearity
explicit.  A fully explicit scheme would need dt of order h^4; the implicit
linear part restores h-scale stepping.

Blow-up is reported as a numerical lifespan proxy: the time the sup norm
crosses a large threshold, bracketed by the previous decade crossing, and
corroborated by time-step collapse.  |u|^p is evaluated exactly as written
(a sign-free power of the absolute value).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Optional, Sequence

import numpy as np

from .closed_forms import (DomainError, ExponentSet, Supersolution,
                           boundary_weight, compute_exponents,
                           make_supersolution)
from .grids import (BandedOperator, RadialGrid, fit_power_law, sphere_area)
from .boundaries import (BoundaryCondition, Closure, assemble_closure,
                         far_field_decay_check)

__all__ = [
    "SolverError",
    "RadialRule",
    "ProblemSpec",
    "SimOutcome",
    "SimHistory",
    "Stepper",
    "simulate",
    "weak_residual",
    "sign_functional",
    "SignReport",
    "measure_lifespan",
]


class SolverError(RuntimeError):
    """The implicit system could not be solved or the state went non-finite."""


# --------------------------------------------------------------------------
# radial rules (serializable forcing / initial-data descriptors)
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialRule:
    """Named radial profile, serializable into run records.

    kinds:
      zero
      constant              params: value
      gaussian-bump         params: amplitude, center, width
      power                 params: coefficient, exponent
      supersolution-profile params: p, N, m, epsilon   (v = eps r^-m)
      supersolution-forcing params: p, N, m, epsilon   (f = bilap v - v^p)
    """

    kind: str
    params: dict = dc_field(default_factory=dict)

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        k, q = self.kind, self.params
        if k == "zero":
            return np.zeros_like(r)
        if k == "constant":
            return np.full_like(r, float(q["value"]))
        if k == "gaussian-bump":
            a, c, w = q.get("amplitude", 1.0), q.get("center", 2.0), q.get("width", 1.0)
            return a * np.exp(-(((r - c) / w) ** 2))
        if k == "power":
            return q.get("coefficient", 1.0) * r ** float(q["exponent"])
        if k in ("supersolution-profile", "supersolution-forcing"):
            s = make_supersolution(q["p"], q["N"], q["m"], q["epsilon"])
            return s.profile(r) if k == "supersolution-profile" else s.forcing(r)
        raise DomainError(f"unknown radial rule kind {self.kind!r}")

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (
            self.kind == "constant" and float(self.params.get("value", 0.0)) == 0.0)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "RadialRule":
        return cls(kind=d["kind"], params=dict(d.get("params", {})))


# --------------------------------------------------------------------------
# problem specification and outcome record
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    """Full description of one initial-value problem on the truncated domain."""

    exponents: ExponentSet
    bc: BoundaryCondition
    grid: RadialGrid
    forcing: RadialRule
    initial_data: RadialRule
    initial_amplitude: float = 1.0
    T_max: float = 50.0
    blowup_threshold: float = 1e8
    dt_min: float = 1e-12
    dt_init: float = 1e-3
    dt_max: float = 1.0
    nonlinearity: bool = True
    normal_sign: float = 1.0
    stationary_tol: float = 1e-8
    snapshot_dt: float = 0.5

    def __post_init__(self):
        if self.initial_amplitude < 0.0:
            raise DomainError("initial amplitude must be >= 0")
        if not (self.T_max > 0 and self.dt_min > 0):
            raise DomainError("T_max and dt_min must be positive")

    def as_dict(self) -> dict:
        return {
            "p": self.exponents.p,
            "N": self.exponents.N,
            "bc": self.bc.value,
            "R_max": self.grid.R_max,
            "M": self.grid.M,
            "forcing": self.forcing.as_dict(),
            "initial_data": self.initial_data.as_dict(),
            "initial_amplitude": self.initial_amplitude,
            "T_max": self.T_max,
            "blowup_threshold": self.blowup_threshold,
            "dt_min": self.dt_min,
            "dt_init": self.dt_init,
            "dt_max": self.dt_max,
            "nonlinearity": self.nonlinearity,
            "normal_sign": self.normal_sign,
            "stationary_tol": self.stationary_tol,
            "snapshot_dt": self.snapshot_dt,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ProblemSpec":
        return cls(
            exponents=compute_exponents(d["p"], d["N"]),
            bc=BoundaryCondition.from_name(d["bc"]),
            grid=RadialGrid(d["N"], d["R_max"], d["M"]),
            forcing=RadialRule.from_dict(d["forcing"]),
            initial_data=RadialRule.from_dict(d["initial_data"]),
            initial_amplitude=d.get("initial_amplitude", 1.0),
            T_max=d.get("T_max", 50.0),
            blowup_threshold=d.get("blowup_threshold", 1e8),
            dt_min=d.get("dt_min", 1e-12),
            dt_init=d.get("dt_init", 1e-3),
            dt_max=d.get("dt_max", 1.0),
            nonlinearity=d.get("nonlinearity", True),
            normal_sign=d.get("normal_sign", 1.0),
            stationary_tol=d.get("stationary_tol", 1e-8),
            snapshot_dt=d.get("snapshot_dt", 0.5),
        )


@dataclass
class SimHistory:
    grid: RadialGrid
    times: list
    fields: list          # full nodal snapshots, one per time

    def interpolate(self, t: float) -> np.ndarray:
        times = np.asarray(self.times)
        if t <= times[0]:
            return self.fields[0]
        if t >= times[-1]:
            return self.fields[-1]
        k = int(np.searchsorted(times, t)) - 1
        w = (t - times[k]) / (times[k + 1] - times[k])
        return (1 - w) * self.fields[k] + w * self.fields[k + 1]


@dataclass
class SimOutcome:
    """Classification of one run plus its diagnostics.

    kind: "blowup" | "survived" | "stationary" | "invalid"
    """

    kind: str
    t_end: float
    T_est: Optional[float] = None
    bracket: Optional[tuple] = None
    final_sup: float = float("nan")
    steady_residual: Optional[float] = None
    steps: int = 0
    dt_smallest: float = float("nan")
    dt_largest: float = float("nan")
    energy_times: list = dc_field(default_factory=list)
    energy_trace: list = dc_field(default_factory=list)
    far_field_ratio: float = float("nan")
    far_field_flagged: bool = False
    envelope_ok: Optional[bool] = None
    envelope_max_ratio: Optional[float] = None
    sign_pattern: str = ""
    message: str = ""
    history: Optional[SimHistory] = None

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "t_end": self.t_end,
            "T_est": self.T_est,
            "bracket": list(self.bracket) if self.bracket else None,
            "final_sup": self.final_sup,
            "steady_residual": self.steady_residual,
            "steps": self.steps,
            "dt_smallest": self.dt_smallest,
            "dt_largest": self.dt_largest,
            "far_field_ratio": self.far_field_ratio,
            "far_field_flagged": self.far_field_flagged,
            "envelope_ok": self.envelope_ok,
            "envelope_max_ratio": self.envelope_max_ratio,
            "sign_pattern": self.sign_pattern,
            "message": self.message,
        }


# --------------------------------------------------------------------------
# stepper
# --------------------------------------------------------------------------

class Stepper:
    """One IMEX step on the full nodal field.

    Holds the folded banded operator; full fields are reconstructed from the
    evolved interior unknowns through the closure after each solve.
    """

    def __init__(self, grid: RadialGrid, closure: Closure,
                 p: Optional[float] = None,
                 forcing_values: Optional[np.ndarray] = None,
                 nonlinearity: bool = True,
                 source: Optional[Callable] = None,
                 boundary_values: Optional[Callable] = None):
        self.grid = grid
        self.closure = closure
        self.operator = BandedOperator(grid, closure)
        self.p = p
        self.nonlinearity = nonlinearity and p is not None
        self.forcing_values = (np.zeros(grid.n_nodes) if forcing_values is None
                               else np.asarray(forcing_values, dtype=float))
        self.source = source                  # optional g(r, t)
        self.boundary_values = boundary_values  # optional t -> 4 data values
        E, _ = closure.elimination()
        self._E = E

    def reconstruct(self, interior: np.ndarray, t: float) -> np.ndarray:
        ext = self._E @ interior
        bdata = self.boundary_values(t) if self.boundary_values else None
        s = self.closure.affine_extension(bdata)
        if s is not None:
            ext = ext + s
        return ext[1:-1]

    def rhs_explicit(self, full: np.ndarray, t_new: float) -> np.ndarray:
        """Explicit part |u|^p + f (+ optional manufactured source)."""
        out = self.forcing_values.copy()
        if self.nonlinearity:
            out += np.abs(full) ** self.p
        if self.source is not None:
            out += self.source(self.grid.nodes, t_new)
        return out

    def step(self, full: np.ndarray, t: float, dt: float) -> np.ndarray:
        """Advance the full nodal field from t to t + dt."""
        if dt <= 0.0:
            raise DomainError("dt must be positive")
        if not np.all(np.isfinite(full)):
            raise SolverError("non-finite state entering step")
        interior = full[1:-1]
        expl = self.rhs_explicit(full, t + dt)
        rhs = interior + dt * expl[1:-1]
        bdata = self.boundary_values(t + dt) if self.boundary_values else None
        affine = self.operator.affine_term(bdata)
        rhs = rhs - dt * affine
        new_interior = self.operator.shifted_solve(dt, rhs)
        return self.reconstruct(new_interior, t + dt)


def _energy(grid: RadialGrid, u: np.ndarray) -> float:
    """Discrete weighted L2 energy, trapezoid of u^2 r^(N-1)."""
    r = grid.nodes
    w = u * u * r ** (grid.N - 1.0)
    return float(np.trapz(w, dx=grid.h) * sphere_area(grid.N))


# --------------------------------------------------------------------------
# the adaptive simulation loop
# --------------------------------------------------------------------------

def simulate(spec: ProblemSpec,
             record_history: bool = False,
             envelope: Optional[Callable] = None,
             envelope_slack: Optional[float] = None,
             source: Optional[Callable] = None,
             boundary_values: Optional[Callable] = None,
             energy_every_step: bool = False,
             max_steps: int = 2_000_000) -> SimOutcome:
    """Run one initial-value problem to blow-up, stationarity or T_max.

    envelope: optional callable v(r); the outcome records whether
    u <= v * (1 + slack) held at every snapshot (slack defaults to 10 h^2).
    """
    grid = spec.grid
    closure = assemble_closure(spec.bc, grid, spec.normal_sign)
    f_vals = spec.forcing(grid.nodes)
    u = spec.initial_amplitude * np.asarray(spec.initial_data(grid.nodes), float)
    if not np.all(np.isfinite(u)):
        raise DomainError("initial data is not finite on the grid")

    stepper = Stepper(grid, closure, p=spec.exponents.p, forcing_values=f_vals,
                      nonlinearity=spec.nonlinearity, source=source,
                      boundary_values=boundary_values)
    # project the initial state onto the closure-consistent manifold so the
    # evolved representation is reproducible from the interior unknowns
    u = stepper.reconstruct(u[1:-1], 0.0)

    slack = envelope_slack if envelope_slack is not None else 10.0 * grid.h**2
    env_vals = None if envelope is None else np.asarray(envelope(grid.nodes), float)
    env_ok, env_max_ratio = (None, None)
    if env_vals is not None:
        env_ok, env_max_ratio = True, 0.0

    thresholds = _threshold_ladder(np.max(np.abs(u)), spec.blowup_threshold)
    crossings: dict = {}

    t = 0.0
    dt = min(spec.dt_init, spec.dt_max)
    steps = 0
    dt_smallest, dt_largest = math.inf, 0.0
    activation = 1e-8 * max(1.0, float(np.max(np.abs(f_vals))),
                            float(np.max(np.abs(u))))

    history = SimHistory(grid, [0.0], [u.copy()]) if record_history else None
    energy_times, energy_trace = [0.0], [_energy(grid, u)]
    next_snap = spec.snapshot_dt
    last_unit_time, last_unit_field = 0.0, u.copy()
    steady_residual = None

    def check_envelope(cur):
        nonlocal env_ok, env_max_ratio
        if env_vals is None:
            return
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(env_vals > 0, cur / env_vals, np.inf * np.sign(cur))
        ratio = np.nanmax(np.where(np.isfinite(ratio), ratio, -np.inf))
        env_max_ratio = max(env_max_ratio, float(ratio))
        if float(ratio) > 1.0 + slack:
            env_ok = False

    def finish(kind, **kw) -> SimOutcome:
        far = far_field_decay_check(u)
        out = SimOutcome(
            kind=kind, t_end=t, final_sup=float(np.max(np.abs(u))),
            steps=steps,
            dt_smallest=dt_smallest if steps else float("nan"),
            dt_largest=dt_largest if steps else float("nan"),
            energy_times=energy_times, energy_trace=energy_trace,
            far_field_ratio=far.tail_ratio, far_field_flagged=far.flagged,
            envelope_ok=env_ok, envelope_max_ratio=env_max_ratio,
            sign_pattern=_sign_pattern(u), history=history, **kw)
        return out

    check_envelope(u)
    while t < spec.T_max and steps < max_steps:
        dt = min(dt, spec.T_max - t, spec.dt_max)
        if dt <= 0:
            break
        sup_old = float(np.max(np.abs(u)))
        # attempt a step; halve on excessive sup-norm growth
        while True:
            try:
                u_new = stepper.step(u, t, dt)
            except SolverError:
                return finish("invalid", message="solver failure mid-run")
            if not np.all(np.isfinite(u_new)):
                if dt / 2.0 >= spec.dt_min:
                    dt /= 2.0
                    continue
                return finish("invalid", message="non-finite state at dt_min")
            sup_new = float(np.max(np.abs(u_new)))
            if sup_old > activation:
                growth = (sup_new - sup_old) / sup_old
            else:
                growth = 0.0
            if growth > 0.20 and dt / 2.0 >= spec.dt_min:
                dt /= 2.0
                continue
            break

        growing = sup_new > sup_old
        if growth > 0.20 and dt / 2.0 < spec.dt_min and growing:
            # time step collapsed while the solution still grows: blow-up
            t_hi = t + dt
            t_lo = _bracket_low(crossings, thresholds, sup_new, t, dt)
            u = u_new
            t = t_hi
            steps += 1
            return finish("blowup", T_est=t_hi, bracket=(t_lo, t_hi),
                          message="dt collapse while growing")

        u = u_new
        t += dt
        steps += 1
        dt_smallest = min(dt_smallest, dt)
        dt_largest = max(dt_largest, dt)

        for thr in thresholds:
            if thr not in crossings and sup_new > thr:
                crossings[thr] = t

        if energy_every_step:
            energy_times.append(t)
            energy_trace.append(_energy(grid, u))

        if sup_new > spec.blowup_threshold:
            t_lo = _bracket_low(crossings, thresholds, sup_new, t, dt)
            return finish("blowup", T_est=t, bracket=(t_lo, t))

        if t >= next_snap - 1e-12:
            if record_history:
                history.times.append(t)
                history.fields.append(u.copy())
            if not energy_every_step:
                energy_times.append(t)
                energy_trace.append(_energy(grid, u))
            check_envelope(u)
            next_snap += spec.snapshot_dt

        if t - last_unit_time >= 1.0:
            delta = t - last_unit_time
            steady_residual = float(np.max(np.abs(u - last_unit_field)) / delta)
            last_unit_time, last_unit_field = t, u.copy()
            if steady_residual < spec.stationary_tol:
                check_envelope(u)
                return finish("stationary", T_est=None,
                              steady_residual=steady_residual)

        if growth < 0.01:
            dt = min(dt * 2.0, spec.dt_max)

    check_envelope(u)
    if record_history and (not history.times or history.times[-1] < t):
        history.times.append(t)
        history.fields.append(u.copy())
    return finish("survived", steady_residual=steady_residual)


def _threshold_ladder(sup0: float, u_blow: float) -> list:
    """Decade thresholds between the initial sup norm and the blow-up cap."""
    lo = max(sup0 * 10.0, 1e-2)
    out = []
    thr = u_blow
    while thr > lo:
        out.append(thr)
        thr /= 10.0
    return sorted(out)


def _bracket_low(crossings: dict, thresholds: list, sup: float,
                 t: float, dt: float) -> float:
    """Left end of the blow-up bracket: the previous decade crossing."""
    below = [crossings[thr] for thr in thresholds
             if thr in crossings and thr < sup and crossings[thr] < t]
    if below:
        return max(below)
    return max(0.0, t - dt)


def _sign_pattern(u: np.ndarray) -> str:
    if np.all(u >= 0):
        return "nonnegative"
    if np.all(u <= 0):
        return "nonpositive"
    return "sign-changing"


# --------------------------------------------------------------------------
# weak-identity residual
# --------------------------------------------------------------------------

def weak_residual(history: SimHistory, testfn, exponents: ExponentSet,
                  forcing: Optional[Callable] = None,
                  nonlinearity: bool = True,
                  source: Optional[Callable] = None) -> float:
    """Absolute residual of the weak-solution identity on a recorded run.

    The identity couples the nonlinear term, the forcing, the initial datum
    and the two transferred derivatives:

        int |u|^p phi + int f phi + int u0 phi(.,0)
            + int u dphi/dt - int u bilap(phi)  =  0.

    With nonlinearity=False the |u|^p term is dropped; a time-dependent
    manufactured source g(r, t) can replace the static forcing.  All
    integrals use the trapezoid rule in time over the recorded snapshots and
    in radius over the grid, weighted by the sphere area.
    """
    grid = history.grid
    r = grid.nodes
    area = sphere_area(grid.N)
    w_r = r ** (grid.N - 1.0)

    support_r = testfn.spatial_support()
    if support_r[1] > grid.R_max * (1.0 + 1e-12):
        raise DomainError(
            f"test function spatial support [1, {support_r[1]:.3g}] exceeds "
            f"the simulated domain [1, {grid.R_max:.3g}]")
    T = testfn.T
    times = [t for t in history.times if t <= T + 1e-12]
    if len(times) < 2:
        raise DomainError("history does not cover the test function support")
    if times[-1] < T * (1.0 - 1e-9) and history.times[-1] < T * (1.0 - 1e-9):
        raise DomainError(
            f"test function temporal support [0, {T:.3g}] exceeds the "
            f"recorded history [0, {history.times[-1]:.3g}]")

    f_vals = forcing(r) if forcing is not None else np.zeros_like(r)

    def space_int(values: np.ndarray) -> float:
        return float(np.trapz(values * w_r, dx=grid.h) * area)

    nl_t, f_t, dt_t, bilap_t = [], [], [], []
    for t in times:
        u = history.interpolate(t)
        phi, dphi_dt, bilap_phi = testfn.eval(t, r)
        if nonlinearity:
            nl_t.append(space_int(np.abs(u) ** exponents.p * phi))
        else:
            nl_t.append(0.0)
        g = f_vals if source is None else source(r, t)
        f_t.append(space_int(g * phi))
        dt_t.append(space_int(u * dphi_dt))
        bilap_t.append(space_int(u * bilap_phi))

    times_arr = np.asarray(times)
    term_nl = float(np.trapz(nl_t, times_arr))
    term_f = float(np.trapz(f_t, times_arr))
    term_dt = float(np.trapz(dt_t, times_arr))
    term_bilap = float(np.trapz(bilap_t, times_arr))
    u0 = history.fields[0]
    phi0, _, _ = testfn.eval(0.0, r)
    term_u0 = space_int(u0 * phi0)

    return abs(term_nl + term_f + term_u0 + term_dt - term_bilap)


# --------------------------------------------------------------------------
# sign functional and lifespan sweeps
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SignReport:
    value: float
    tail_bound: float
    sign: str          # "positive" | "negative" | "undetermined"

    def is_positive(self) -> bool:
        return self.sign == "positive"


def sign_functional(rule: Callable, weight, grid: RadialGrid,
                    rel_tol: float = 1e-8) -> SignReport:
    """Quadrature of int g * A over the truncated exterior plus a tail bound.

    The sign is declared only when the integral magnitude dominates the
    crude tail estimate extrapolated from the last decade, or when the
    integrand has a single sign everywhere sampled (the tail can then only
    reinforce it).
    """
    from .grids import annulus_quadrature

    def integrand(r):
        return np.asarray(rule(r), dtype=float) * np.asarray(weight(r), dtype=float)

    value = annulus_quadrature(grid.N, integrand, 1.0, grid.R_max,
                               rel_tol=rel_tol)

    probe = np.geomspace(max(grid.R_max / 10.0, 1.5), grid.R_max, 24)
    q = np.abs(integrand(probe)) * probe ** (grid.N - 1.0)
    if np.all(q < 1e-280):
        tail = 0.0
    else:
        mask = q > 0
        if mask.sum() < 4:
            tail = math.inf
        else:
            slope, logc = np.polyfit(np.log(probe[mask]), np.log(q[mask]), 1)
            if slope < -1.05:
                tail = math.exp(logc) * grid.R_max ** (slope + 1.0) / (-slope - 1.0)
                tail *= sphere_area(grid.N)
            else:
                tail = math.inf

    samples = integrand(np.geomspace(1.0 + 1e-9, grid.R_max, 512))
    if np.all(samples >= 0) and value > 0:
        return SignReport(value, tail, "positive")
    if np.all(samples <= 0) and value < 0:
        return SignReport(value, tail, "negative")
    if abs(value) > tail:
        return SignReport(value, tail, "positive" if value > 0 else "negative")
    return SignReport(value, tail, "undetermined")


def measure_lifespan(spec_template: ProblemSpec, epsilons: Sequence[float],
                     **simulate_kwargs) -> list:
    """One simulation per initial amplitude; returns (eps, T_est, outcome).

    Requires the template to have zero forcing, p at or below the Fujita
    exponent, and initial data with nonnegative weighted integral (checked
    through the sign functional).  Amplitudes whose run survives to T_max
    are flagged with T_est None: their lifespan is not bracketed and callers
    must exclude them from fits.
    """
    if not spec_template.forcing.is_zero:
        raise DomainError("lifespan sweeps require zero forcing")
    exps = spec_template.exponents
    if exps.p > exps.p_fuj + 1e-12:
        raise DomainError(
            f"lifespan sweeps cover p <= p_fuj = {exps.p_fuj}, got p = {exps.p}")
    weight = boundary_weight(spec_template.bc.value, exps.N)
    report = sign_functional(spec_template.initial_data, weight,
                             spec_template.grid)
    u0_vals = spec_template.initial_data(spec_template.grid.nodes)
    if not np.any(u0_vals != 0.0):
        raise DomainError("initial data vanishes identically")
    if report.sign == "negative":
        raise DomainError("initial data has negative weighted integral")

    results = []
    for eps in epsilons:
        spec = ProblemSpec(
            exponents=spec_template.exponents, bc=spec_template.bc,
            grid=spec_template.grid, forcing=spec_template.forcing,
            initial_data=spec_template.initial_data,
            initial_amplitude=float(eps), T_max=spec_template.T_max,
            blowup_threshold=spec_template.blowup_threshold,
            dt_min=spec_template.dt_min, dt_init=spec_template.dt_init,
            dt_max=spec_template.dt_max, nonlinearity=spec_template.nonlinearity,
            normal_sign=spec_template.normal_sign,
            stationary_tol=spec_template.stationary_tol,
            snapshot_dt=spec_template.snapshot_dt)
        outcome = simulate(spec, **simulate_kwargs)
        t_est = outcome.T_est if outcome.kind == "blowup" else None
        results.append((float(eps), t_est, outcome))
    return results
