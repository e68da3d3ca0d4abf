"""Time marching of the free-boundary system on a front-fixed grid.

The moving domain (0, h(t)) is mapped to the reference interval (0, 1) by
y = x/h(t), which turns the system into

    u_t = (d1/h^2) u_yy + y (h'/h) u_y - a u + H(v)

(symmetrically for v) plus the boundary law h' = -mu1 u_x(t, h) -
mu2 v_x(t, h).  One step of the integrator:

1. boundary gradients by a second-order one-sided stencil, predictor
   h' and h_pred;
2. predictor fields by an implicit (backward Euler) solve of diffusion
   and decay -- two independent tridiagonal systems -- with the coupling
   H(v), G(u) and the advection term explicit at (h_pred, h');
3. corrector h' from the predicted fields and a Heun average for
   h^{n+1};
4. corrector fields by a trapezoidal (Crank-Nicolson) solve of
   diffusion/decay with the explicit terms averaged between the old and
   predicted states.

The corrector stage makes the scheme second order in time as well as in
space; a single-stage splitting would be first order and need impractically
small steps to match a reference solution tightly.  Diffusion being
implicit, only the advection CFL dt <= 0.5 dy h / |h'| restricts the step;
the driver halves dt adaptively when it binds.
Negative undershoots are clipped at zero, and a blow-up guard raises when
fields exceed a large multiple of the theoretical ceilings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solve_banded

from .elliptic import ceiling_constants
from .errors import (
    BlowUp,
    CflViolation,
    InitialDataError,
    ParseError,
    SearchExhausted,
    ValidationError,
)
from .model import FixedEnd, InitialData, ModelParams, NonlinearitySpec, reproduction_number

__all__ = [
    "SolverControls",
    "SimState",
    "Timeline",
    "step",
    "simulate",
    "write_timeline_csv",
    "read_timeline_csv",
    "write_state_csv",
]

TIMELINE_HEADER = "t,h,h_prime,sup_u,sup_v,mass_u,mass_v"
STATE_HEADER = "y,x,u,v"


@dataclass(frozen=True)
class SolverControls:
    """Discretization and duration controls for a simulation."""

    n: int = 512
    dt: float = 1e-3
    t_max: float = 500.0
    output_dt: float = 0.5

    def __post_init__(self):
        if self.n < 64:
            raise ValidationError("n must be at least 64")
        if self.dt <= 0 or self.t_max <= 0 or self.output_dt <= 0:
            raise ValidationError("dt, t_max and output_dt must be positive")


@dataclass(frozen=True)
class SimState:
    """Fields on the fixed reference grid plus the boundary position."""

    t: float
    h: float
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray
    h_prime: float

    @property
    def x(self) -> np.ndarray:
        return self.y * self.h

    @property
    def sup_u(self) -> float:
        return float(np.max(self.u))

    @property
    def sup_v(self) -> float:
        return float(np.max(self.v))


@dataclass
class Timeline:
    """Sampled run diagnostics at the output cadence."""

    t: np.ndarray
    h: np.ndarray
    h_prime: np.ndarray
    sup_u: np.ndarray
    sup_v: np.ndarray
    mass_u: np.ndarray
    mass_v: np.ndarray
    stop_reason: str | None = None
    ceiling_exceeded: bool = False

    def __len__(self) -> int:
        return len(self.t)

    @property
    def norm(self) -> np.ndarray:
        return self.sup_u + self.sup_v


def _boundary_gradient(w: np.ndarray, dy: float, h: float) -> float:
    # second-order one-sided stencil using w[n] = 0
    return (w[-3] - 4.0 * w[-2]) / (2.0 * dy * h)


def _advection(w: np.ndarray, y: np.ndarray, fac: float, i0: int, n: int) -> np.ndarray:
    """y (h'/h) w_y by central differences at the unknown nodes."""
    out = np.empty(n - i0)
    k = 1 - i0  # offset of node 1 within the unknown block
    out[k:] = (w[2:n + 1] - w[0:n - 1]) * (y[1:n] * (fac / (2.0 * (y[1] - y[0]))))
    if i0 == 0:
        out[0] = 0.0  # y = 0 kills the term at a Neumann end
    return out


def _laplacian(w: np.ndarray, dy: float, i0: int, n: int) -> np.ndarray:
    """w_yy at the unknown nodes (ghost mirror at a Neumann end)."""
    out = np.empty(n - i0)
    k = 1 - i0
    out[k:] = (w[0:n - 1] - 2.0 * w[1:n] + w[2:n + 1]) / dy ** 2
    if i0 == 0:
        out[0] = 2.0 * (w[1] - w[0]) / dy ** 2
    return out


def _implicit_solve(w_rhs: np.ndarray, d: float, decay: float, h: float,
                    theta_dt: float, dy: float, i0: int, n: int) -> np.ndarray:
    """Solve (I + theta_dt (decay - (d/h^2) d^2/dy^2)) w = w_rhs on the unknowns."""
    c = theta_dt * d / (h * h * dy * dy)
    m = n - i0
    ab = np.empty((3, m))
    ab[0, :] = -c
    ab[2, :] = -c
    ab[1, :] = 1.0 + theta_dt * decay + 2.0 * c
    ab[0, 0] = 0.0
    ab[2, -1] = 0.0
    if i0 == 0:
        ab[0, 1] = -2.0 * c
    sol = solve_banded((1, 1), ab, w_rhs, check_finite=False)
    full = np.zeros(n + 1)
    full[i0:n] = sol
    return full


def step(state: SimState, params: ModelParams, nl: NonlinearitySpec, dt: float,
         caps: tuple[float, float] | None = None) -> SimState:
    """Advance one time step of size dt; raises CflViolation when dt is too big."""
    n = len(state.y) - 1
    dy = 1.0 / n
    i0 = 0 if params.fixed_end is FixedEnd.NEUMANN else 1
    s = slice(i0, n)
    u, v, h, y = state.u, state.v, state.h, state.y

    gu = _boundary_gradient(u, dy, h)
    gv = _boundary_gradient(v, dy, h)
    hp0 = -params.mu1 * gu - params.mu2 * gv
    dt_max = 0.5 * dy * h / max(abs(hp0), 1e-300)
    if dt > dt_max:
        raise CflViolation(f"dt = {dt:.3e} exceeds advection CFL bound {dt_max:.3e}",
                           dt_max=dt_max)
    h_pred = h + dt * hp0

    # predictor: backward Euler diffusion/decay, explicit coupling and advection
    rhs_u = u[s] + dt * (_advection(u, y, hp0 / h_pred, i0, n) + nl.H(v[s]))
    rhs_v = v[s] + dt * (_advection(v, y, hp0 / h_pred, i0, n) + nl.G(u[s]))
    u_star = _implicit_solve(rhs_u, params.d1, params.a, h_pred, dt, dy, i0, n)
    v_star = _implicit_solve(rhs_v, params.d2, params.b, h_pred, dt, dy, i0, n)

    hp1 = (-params.mu1 * _boundary_gradient(u_star, dy, h_pred)
           - params.mu2 * _boundary_gradient(v_star, dy, h_pred))
    h_new = max(h, h + 0.5 * dt * (hp0 + hp1))

    # corrector: trapezoidal diffusion/decay, Heun average of the explicit terms
    expl_u_n = (params.d1 / h ** 2) * _laplacian(u, dy, i0, n) - params.a * u[s] \
        + _advection(u, y, hp0 / h, i0, n) + nl.H(v[s])
    expl_v_n = (params.d2 / h ** 2) * _laplacian(v, dy, i0, n) - params.b * v[s] \
        + _advection(v, y, hp0 / h, i0, n) + nl.G(u[s])
    expl_u_s = _advection(u_star, y, hp1 / h_new, i0, n) + nl.H(v_star[s])
    expl_v_s = _advection(v_star, y, hp1 / h_new, i0, n) + nl.G(u_star[s])
    half = 0.5 * dt
    u_new = _implicit_solve(u[s] + half * (expl_u_n + expl_u_s),
                            params.d1, params.a, h_new, half, dy, i0, n)
    v_new = _implicit_solve(v[s] + half * (expl_v_n + expl_v_s),
                            params.d2, params.b, h_new, half, dy, i0, n)

    np.maximum(u_new, 0.0, out=u_new)
    np.maximum(v_new, 0.0, out=v_new)

    if caps is not None:
        if float(np.max(u_new)) > caps[0] or float(np.max(v_new)) > caps[1]:
            raise BlowUp(f"fields exceeded the instability guard at t = {state.t + dt:.6g}")

    hp_final = (-params.mu1 * _boundary_gradient(u_new, dy, h_new)
                - params.mu2 * _boundary_gradient(v_new, dy, h_new))
    return SimState(state.t + dt, h_new, y, u_new, v_new, hp_final)


def _advance(state: SimState, params, nl, dt: float, caps, depth: int = 0) -> SimState:
    """Take one step, splitting in halves when the CFL bound binds."""
    try:
        return step(state, params, nl, dt, caps)
    except CflViolation:
        if depth >= 40:
            raise
        mid = _advance(state, params, nl, 0.5 * dt, caps, depth + 1)
        return _advance(mid, params, nl, 0.5 * dt, caps, depth + 1)


def simulate(params: ModelParams, nl: NonlinearitySpec, init: InitialData,
             controls: SolverControls = SolverControls(),
             stop_rule: Callable[[dict], str | None] | None = None
             ) -> tuple[Timeline, SimState]:
    """March the free-boundary system until t_max or an early-exit signal.

    The timeline is sampled every output_dt; stop_rule (typically built by
    the dichotomy module) sees each new record as a dict and may return a
    reason string to end the run early.
    """
    if abs(init.h0 - params.h0) > 1e-12 * params.h0:
        raise InitialDataError("initial data h0 does not match the model h0")
    if init.fixed_end is not params.fixed_end:
        raise InitialDataError("initial data fixed end does not match the model")
    init.validate()

    n = controls.n
    y = np.linspace(0.0, 1.0, n + 1)
    u = np.asarray(init.sample_u(y * params.h0), dtype=float)
    v = np.asarray(init.sample_v(y * params.h0), dtype=float)
    u[n] = v[n] = 0.0
    if params.fixed_end is FixedEnd.DIRICHLET:
        u[0] = v[0] = 0.0

    ceilings = None
    if reproduction_number(nl, params) > 1.0:
        try:
            ceilings = ceiling_constants(nl, params, init)
        except SearchExhausted:
            # bounded H cannot dominate large initial data; guard from the
            # invariant region max(sup w0, sup coupling / decay) instead
            ceilings = None
    if ceilings is not None:
        caps = (10.0 * ceilings.K1, 10.0 * ceilings.K2)
    else:
        z_big = 10.0 * max(1.0, nl.z_scale)
        caps = (100.0 * max(1.0, float(np.max(u)), float(nl.H(z_big)) / params.a),
                100.0 * max(1.0, float(np.max(v)), float(nl.G(z_big)) / params.b))

    dy = 1.0 / n
    hp = (-params.mu1 * _boundary_gradient(u, dy, params.h0)
          - params.mu2 * _boundary_gradient(v, dy, params.h0))
    state = SimState(0.0, params.h0, y, u, v, hp)

    rows: list[tuple] = []
    exceeded = False
    stop_reason = None

    def record(st: SimState) -> dict:
        nonlocal exceeded
        mass_u = float(simpson(st.u, dx=dy)) * st.h
        mass_v = float(simpson(st.v, dx=dy)) * st.h
        row = dict(t=st.t, h=st.h, h_prime=st.h_prime,
                   sup_u=st.sup_u, sup_v=st.sup_v, mass_u=mass_u, mass_v=mass_v)
        rows.append((st.t, st.h, st.h_prime, st.sup_u, st.sup_v, mass_u, mass_v))
        if ceilings is not None and (st.sup_u > ceilings.K1 * (1 + 1e-12)
                                     or st.sup_v > ceilings.K2 * (1 + 1e-12)):
            exceeded = True
        return row

    row = record(state)
    if stop_rule is not None:
        stop_reason = stop_rule(row)

    out_dt = min(controls.output_dt, controls.t_max)
    base_dt = min(controls.dt, out_dt)
    n_sub = max(1, math.ceil(out_dt / base_dt - 1e-12))
    dt0 = out_dt / n_sub

    while stop_reason is None and state.t < controls.t_max - 1e-9 * out_dt:
        t_target = min(state.t + out_dt, controls.t_max)
        k_sub = max(1, math.ceil((t_target - state.t) / dt0 - 1e-12))
        dt_block = (t_target - state.t) / k_sub
        for _ in range(k_sub):
            state = _advance(state, params, nl, dt_block, caps)
        row = record(state)
        if stop_rule is not None:
            stop_reason = stop_rule(row)

    timeline = Timeline(*[np.array([r[i] for r in rows]) for i in range(7)],
                        stop_reason=stop_reason, ceiling_exceeded=exceeded)
    return timeline, state


# -- persistence -------------------------------------------------------------

def write_timeline_csv(timeline: Timeline, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(TIMELINE_HEADER + "\n")
        for k in range(len(timeline)):
            fh.write(",".join("%.12e" % val for val in (
                timeline.t[k], timeline.h[k], timeline.h_prime[k],
                timeline.sup_u[k], timeline.sup_v[k],
                timeline.mass_u[k], timeline.mass_v[k])) + "\n")


def read_timeline_csv(path) -> Timeline:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ParseError(f"{path}: empty timeline", line=1)
    if lines[0] != TIMELINE_HEADER:
        raise ParseError(f"{path}: expected header '{TIMELINE_HEADER}'", line=1)
    if len(lines) < 2:
        raise ParseError(f"{path}: timeline has no records", line=2)
    data = []
    for idx, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 7:
            raise ParseError(f"{path}: expected 7 columns", line=idx)
        try:
            data.append([float(p) for p in parts])
        except ValueError as exc:
            raise ParseError(f"{path}: {exc}", line=idx) from None
    arr = np.asarray(data)
    return Timeline(*(arr[:, i] for i in range(7)))


def write_state_csv(state: SimState, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(STATE_HEADER + "\n")
        for k in range(len(state.y)):
            fh.write(",".join("%.12e" % val for val in (
                state.y[k], state.y[k] * state.h, state.u[k], state.v[k])) + "\n")
