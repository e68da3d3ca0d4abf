"""Steady states of the coupled system by monotone upper/lower iteration.

Two boundary-value problems on (0, l) share the interior equations

    -d1 u'' = -a u + H(v),   -d2 v'' = -b v + G(u):

* homogeneous: the declared operator at x = 0 and u(l) = v(l) = 0.  A
  positive solution exists iff the principal eigenvalue lambda(l) is
  negative, and it sits strictly below the equilibrium (u*, v*).
* elevated: u(0) = v(0) = 0 with raised right-end values u(l) = K1,
  v(l) = K2 from the ceiling construction.  Its solution is strictly
  increasing and dominates the homogeneous one.

Both are solved by Picard sweeps that freeze the partner field and invert
the shifted linear operator (-d d^2/dx^2 + c I): starting from the ordered
pair -- a small multiple of the principal eigenfunction below, the
equilibrium or the ceilings above -- the lower sweep increases, the upper
sweep decreases, and both converge to the unique positive solution.  A few
Newton steps polish the common limit.

Restricting the homogeneous solution on a long interval to the left half
approximates the semi-infinite profile (U, V), the increasing connection
from (0, 0) to (u*, v*).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import solve_banded

from .errors import (
    NonConvergence,
    NotSupercritical,
    OrderingViolation,
    SearchExhausted,
    Subcritical,
    ValidationError,
)
from .model import (
    FixedEnd,
    InitialData,
    ModelParams,
    NonlinearitySpec,
    equilibrium,
    reproduction_number,
)
from .spectral import critical_length, lambda_closed_form

__all__ = [
    "CeilingConstants",
    "SteadyProfile",
    "ceiling_constants",
    "solve_steady",
    "semi_infinite_profile",
]

Kind = Literal["homogeneous", "elevated", "semi_infinite"]


@dataclass(frozen=True)
class CeilingConstants:
    """Upper barriers: K2 above v* and the initial data, K1 = H(K2)/a."""

    K1: float
    K2: float


@dataclass(frozen=True)
class SteadyProfile:
    """Steady solution samples on [0, l].

    residual is the sup-norm defect of the discrete elliptic system;
    trivial marks the zero solution returned for a subcritical interval.
    """

    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    l: float
    kind: Kind
    residual: float
    iterations: int
    trivial: bool = False
    convergence_estimate: float | None = None


def ceiling_constants(nl: NonlinearitySpec, params: ModelParams,
                      init: InitialData | None = None) -> CeilingConstants:
    """Smallest ceiling pair on a doubling ladder.

    Requires K2 > max(v*, sup v0), K1 = H(K2)/a > max(u*, sup u0) and
    G(K1) < b K2; saturation of G makes the last clause automatic for any
    K2 above v*, so the search only fails when H saturates below the
    initial data.
    """
    if reproduction_number(nl, params) <= 1.0:
        raise NotSupercritical("ceiling constants require R0 > 1")
    eq = equilibrium(nl, params)
    sup_u0 = float(np.max(init.u0)) if init is not None else 0.0
    sup_v0 = float(np.max(init.v0)) if init is not None else 0.0

    base = max(eq.v_star, sup_v0)
    k2 = 2.0 * base
    cap = 1e9 * eq.v_star
    while k2 <= cap:
        k1 = float(nl.H(k2)) / params.a
        if (k2 > max(eq.v_star, sup_v0)
                and k1 > max(eq.u_star, sup_u0)
                and float(nl.G(k1)) < params.b * k2):
            return CeilingConstants(k1, k2)
        k2 *= 2.0
    raise SearchExhausted(f"no ceiling K2 <= {cap:g} satisfies the barrier clauses")


# -- discrete operators ------------------------------------------------------

class _Grid:
    """Uniform grid on [0, l] with the left-end operator folded in.

    Unknowns are nodes 1..n-1 for a Dirichlet left end and 0..n-1 for a
    Neumann left end (ghost-point mirror); the right endpoint is always a
    Dirichlet node whose value feeds the right-hand side.
    """

    def __init__(self, l: float, n: int, neumann_left: bool):
        self.l = float(l)
        self.n = int(n)
        self.neumann_left = neumann_left
        self.dx = l / n
        self.x = np.linspace(0.0, l, n + 1)
        self.i0 = 0 if neumann_left else 1
        self.m = n - self.i0

    def bands(self, d: float, shift: float) -> np.ndarray:
        """Banded form of (-d d^2/dx^2 + shift I) on the unknowns."""
        c = d / self.dx ** 2
        ab = np.empty((3, self.m))
        ab[0, :] = -c
        ab[2, :] = -c
        ab[1, :] = 2.0 * c + shift
        ab[0, 0] = 0.0
        ab[2, -1] = 0.0
        if self.neumann_left:
            ab[0, 1] = -2.0 * c
        return ab

    def solve(self, d: float, shift: float, rhs_interior: np.ndarray,
              right_value: float) -> np.ndarray:
        """Solve (-d u'' + shift u) = rhs with the grid's boundary data."""
        c = d / self.dx ** 2
        rhs = rhs_interior.copy()
        rhs[-1] += c * right_value
        sol = solve_banded((1, 1), self.bands(d, shift), rhs, check_finite=False)
        full = np.empty(self.n + 1)
        full[self.i0:self.n] = sol
        full[self.n] = right_value
        if not self.neumann_left:
            full[0] = 0.0
        return full

    def apply(self, d: float, shift: float, w: np.ndarray) -> np.ndarray:
        """Apply (-d d^2/dx^2 + shift I) to a full-grid vector at the unknowns."""
        c = d / self.dx ** 2
        i0, n = self.i0, self.n
        out = (2.0 * c + shift) * w[i0:n] - c * w[i0 + 1:n + 1]
        if self.neumann_left:
            out[0] = (2.0 * c + shift) * w[0] - 2.0 * c * w[1]
            out[1:] -= c * w[i0:n - 1]
        else:
            out -= c * w[i0 - 1:n - 1]
        return out


def _defect(grid: _Grid, params: ModelParams, nl: NonlinearitySpec,
            u: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ru = grid.apply(params.d1, params.a, u) - nl.H(v[grid.i0:grid.n])
    rv = grid.apply(params.d2, params.b, v) - nl.G(u[grid.i0:grid.n])
    return ru, rv


def _newton_polish(grid: _Grid, params: ModelParams, nl: NonlinearitySpec,
                   u: np.ndarray, v: np.ndarray, max_steps: int = 8
                   ) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Coupled Newton iterations on the discrete system (interleaved LU)."""
    m, i0, n = grid.m, grid.i0, grid.n
    c1 = params.d1 / grid.dx ** 2
    c2 = params.d2 / grid.dx ** 2
    steps = 0
    for _ in range(max_steps):
        ru, rv = _defect(grid, params, nl, u, v)
        res = max(np.max(np.abs(ru)), np.max(np.abs(rv)))
        if res < 1e-13 * max(1.0, float(np.max(u)), float(np.max(v))):
            break
        main = np.empty(2 * m)
        main[0::2] = 2.0 * c1 + params.a
        main[1::2] = 2.0 * c2 + params.b
        cross_up = np.empty(2 * m - 1)
        cross_up[0::2] = -nl.dH(v[i0:n])
        cross_up[1::2] = 0.0
        cross_lo = np.empty(2 * m - 1)
        cross_lo[0::2] = -nl.dG(u[i0:n])
        cross_lo[1::2] = 0.0
        diff_up = np.empty(2 * m - 2)
        diff_up[0::2] = -c1
        diff_up[1::2] = -c2
        diff_lo = diff_up.copy()
        if grid.neumann_left:
            diff_up[0] = -2.0 * c1
            diff_up[1] = -2.0 * c2
        jac = sp.diags([main, cross_up, cross_lo, diff_up, diff_lo],
                       [0, 1, -1, 2, -2], format="csc")
        rhs = np.empty(2 * m)
        rhs[0::2] = -ru
        rhs[1::2] = -rv
        delta = spla.splu(jac).solve(rhs)
        u = u.copy()
        v = v.copy()
        u[i0:n] += delta[0::2]
        v[i0:n] += delta[1::2]
        steps += 1
    ru, rv = _defect(grid, params, nl, u, v)
    return u, v, float(max(np.max(np.abs(ru)), np.max(np.abs(rv)))), steps


def solve_steady(params: ModelParams, nl: NonlinearitySpec, l: float,
                 kind: Kind = "homogeneous", n: int = 512,
                 tol: float = 1e-10,
                 ceilings: CeilingConstants | None = None,
                 max_sweeps: int = 10_000) -> SteadyProfile:
    """Solve the steady problem on (0, l) by ordered monotone sweeps.

    The lower start is eps*(phi, psi) with eps shrunk until it is a strict
    discrete lower solution; the upper start is the equilibrium (u*, v*)
    for the homogeneous problem or the ceilings (K1, K2) for the elevated
    one.  Each sweep solves the two decoupled shifted linear problems with
    the partner field frozen; sweeps stop once successive iterates move
    less than tol in sup norm, and Newton polishing reduces the defect to
    round-off.

    For a subcritical interval (lambda(l) >= 0) the homogeneous problem
    only has the trivial solution, which is returned flagged; the elevated
    problem raises Subcritical.
    """
    if kind not in ("homogeneous", "elevated"):
        raise ValidationError(f"unknown steady kind '{kind}'")
    if n < 16:
        raise ValidationError("steady grid must have n >= 16")

    # the elevated problem pins u(0) = v(0) = 0, so its eigenvalue gate is
    # the Dirichlet one no matter the model's fixed end
    eig_params = params if kind == "homogeneous" else (
        params if params.fixed_end is FixedEnd.DIRICHLET else
        ModelParams(params.d1, params.d2, params.a, params.b, params.mu1,
                    params.mu2, params.h0, FixedEnd.DIRICHLET))
    eig = lambda_closed_form(eig_params, nl, l, n_samples=n)
    neumann_left = kind == "homogeneous" and params.fixed_end is FixedEnd.NEUMANN
    grid = _Grid(l, n, neumann_left)

    if eig.lam >= 0.0:
        if kind == "elevated":
            raise Subcritical(f"lambda(l) = {eig.lam:.6g} >= 0: no positive elevated solution")
        zero = np.zeros(n + 1)
        return SteadyProfile(grid.x, zero, zero.copy(), l, kind, 0.0, 0, trivial=True)

    eq = equilibrium(nl, params)
    if kind == "elevated":
        if ceilings is None:
            ceilings = ceiling_constants(nl, params)
        upper_u = np.full(n + 1, ceilings.K1)
        upper_v = np.full(n + 1, ceilings.K2)
        right_u, right_v = ceilings.K1, ceilings.K2
        if not neumann_left:
            upper_u[0] = 0.0
            upper_v[0] = 0.0
    else:
        upper_u = np.full(n + 1, eq.u_star)
        upper_v = np.full(n + 1, eq.v_star)
        right_u = right_v = 0.0
        upper_u[n] = upper_v[n] = 0.0
        if not neumann_left:
            upper_u[0] = upper_v[0] = 0.0

    # eigenfunction on the solve grid, normalized to sup(phi + psi) = 1;
    # boundary entries zeroed exactly (sin(pi) evaluates to ~1e-16)
    if neumann_left:
        w = np.cos(0.5 * math.pi * grid.x / l)
    else:
        w = np.sin(math.pi * grid.x / l)
        w[0] = 0.0
    w[-1] = 0.0
    phi = eig.p * w / (1.0 + eig.p)
    psi = w / (1.0 + eig.p)

    eps = 1e-3 * min(eq.u_star, eq.v_star) / max(float(np.max(phi)), float(np.max(psi)))
    i0 = grid.i0
    for halving in range(41):
        if halving == 40:
            raise OrderingViolation("no strict lower solution after 40 halvings of eps")
        lo_u, lo_v = eps * phi, eps * psi
        du = grid.apply(params.d1, params.a, lo_u) - nl.H(lo_v[i0:n])
        dv = grid.apply(params.d2, params.b, lo_v) - nl.G(lo_u[i0:n])
        ordered = bool(np.all(lo_u <= upper_u) and np.all(lo_v <= upper_v))
        if ordered and float(np.max(du)) < 0.0 and float(np.max(dv)) < 0.0:
            break
        eps *= 0.5

    slack = 1e-12 * max(1.0, float(np.max(upper_u)), float(np.max(upper_v)))
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        new_lo_u = grid.solve(params.d1, params.a, nl.H(lo_v[i0:n]), right_u)
        new_lo_v = grid.solve(params.d2, params.b, nl.G(lo_u[i0:n]), right_v)
        new_up_u = grid.solve(params.d1, params.a, nl.H(upper_v[i0:n]), right_u)
        new_up_v = grid.solve(params.d2, params.b, nl.G(upper_u[i0:n]), right_v)

        if (np.min(new_lo_u - lo_u) < -slack or np.min(new_lo_v - lo_v) < -slack
                or np.max(new_up_u - upper_u) > slack or np.max(new_up_v - upper_v) > slack
                or np.min(new_up_u - new_lo_u) < -slack
                or np.min(new_up_v - new_lo_v) < -slack):
            raise OrderingViolation(f"monotone ordering lost at sweep {sweeps}")

        change = max(float(np.max(np.abs(new_lo_u - lo_u))),
                     float(np.max(np.abs(new_lo_v - lo_v))),
                     float(np.max(np.abs(new_up_u - upper_u))),
                     float(np.max(np.abs(new_up_v - upper_v))))
        lo_u, lo_v, upper_u, upper_v = new_lo_u, new_lo_v, new_up_u, new_up_v
        if change < tol:
            converged = True
            break
    if not converged:
        raise NonConvergence(f"monotone sweeps stalled after {max_sweeps} iterations")

    u = 0.5 * (lo_u + upper_u)
    v = 0.5 * (lo_v + upper_v)
    u, v, residual, newton_steps = _newton_polish(grid, params, nl, u, v)
    return SteadyProfile(grid.x, u, v, l, kind, residual, sweeps + newton_steps)


def semi_infinite_profile(params: ModelParams, nl: NonlinearitySpec,
                          l_big: float, n: int = 2048) -> SteadyProfile:
    """Approximate the increasing semi-infinite profile (U, V) by truncation.

    Solves the homogeneous problem on (0, l_big) with a Dirichlet fixed end
    and returns the restriction to [0, l_big/2]; the reported convergence
    estimate is the sup distance to the same construction at l_big/2 on
    their common window [0, l_big/4].
    """
    if params.fixed_end is not FixedEnd.DIRICHLET:
        raise ValidationError("semi-infinite profile requires a Dirichlet fixed end")
    if reproduction_number(nl, params) <= 1.0:
        raise NotSupercritical("semi-infinite profile requires R0 > 1")
    l0 = critical_length(params, nl)
    if l_big < 10.0 * l0:
        raise ValidationError(f"l_big must be at least 10*l0 = {10.0 * l0:.6g}")
    if n % 4 != 0:
        raise ValidationError("n must be a multiple of 4")

    full = solve_steady(params, nl, l_big, "homogeneous", n)
    half = solve_steady(params, nl, l_big / 2.0, "homogeneous", n // 2)
    q = n // 4  # shared nodes on [0, l_big/4]: identical spacing on both grids
    est = max(float(np.max(np.abs(full.u[:q + 1] - half.u[:q + 1]))),
              float(np.max(np.abs(full.v[:q + 1] - half.v[:q + 1]))))
    k = n // 2
    return SteadyProfile(full.x[:k + 1], full.u[:k + 1], full.v[:k + 1],
                         l_big / 2.0, "semi_infinite", full.residual,
                         full.iterations, convergence_estimate=est)
