"""Model parameters, coupling nonlinearities, and the homogeneous equilibrium.

The reaction system couples a bacteria concentration u and an infective
population v through a pair of increasing, concave maps: u is produced at
rate H(v) and decays at rate a*u, while v is produced at rate G(u) and
decays at rate b*v.  The basic reproduction number

    R0 = H'(0) * G'(0) / (a * b)

separates guaranteed extinction (R0 <= 1) from possible spread (R0 > 1),
in which case the positive equilibrium (u*, v*) solves a*u* = H(v*),
b*v* = G(u*).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import (
    BracketingFailure,
    InitialDataError,
    NonPositiveDerivative,
    NoWitness,
    ValidationError,
)

__all__ = [
    "FixedEnd",
    "ModelParams",
    "NonlinearitySpec",
    "InitialData",
    "Equilibrium",
    "ValidationReport",
    "ClauseResult",
    "validate_hypotheses",
    "reproduction_number",
    "equilibrium",
]


class FixedEnd(str, Enum):
    """Boundary operator at the fixed end x = 0."""

    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the moving-boundary model.

    d1, d2   diffusivities of u and v (length^2/time, > 0)
    a, b     decay rates of u and v (1/time, > 0)
    mu1, mu2 boundary expansion coefficients (>= 0)
    h0       initial interval length (> 0)
    fixed_end boundary operator at x = 0
    """

    d1: float
    d2: float
    a: float
    b: float
    mu1: float = 1.0
    mu2: float = 1.0
    h0: float = 1.0
    fixed_end: FixedEnd = FixedEnd.DIRICHLET

    def __post_init__(self):
        for name in ("d1", "d2", "a", "b"):
            if getattr(self, name) <= 0:
                raise ValidationError(f"{name} must be strictly positive")
        if self.mu1 < 0 or self.mu2 < 0:
            raise ValidationError("mu1 and mu2 must be nonnegative")
        if self.h0 <= 0:
            raise ValidationError("h0 must be strictly positive")
        object.__setattr__(self, "fixed_end", FixedEnd(self.fixed_end))


class NonlinearitySpec:
    """A coupling pair (H, G) with first and second derivatives.

    Built-in families:

    * ``monod`` -- saturating pair H(v) = alpha1*v/(1 + beta1*v),
      G(u) = alpha2*u/(1 + beta2*u) with all coefficients positive.  This
      family satisfies the admissibility conditions strictly and has
      closed-form derivatives.
    * ``tabulated`` -- cubic splines through user-supplied (z, value)
      tables with strictly increasing z; derivatives come from the spline.
    * ``custom`` -- arbitrary callables, mainly for testing degenerate
      cases such as a linear H.
    """

    def __init__(self, family: str, params: dict,
                 h_funcs: tuple[Callable, Callable, Callable],
                 g_funcs: tuple[Callable, Callable, Callable],
                 z_scale: float = 1.0):
        self.family = family
        self.params = dict(params)
        self._H, self._dH, self._d2H = h_funcs
        self._G, self._dG, self._d2G = g_funcs
        self.z_scale = float(z_scale)

    # vectorized evaluation ------------------------------------------------
    def H(self, v):
        return self._H(np.asarray(v, dtype=float))

    def dH(self, v):
        return self._dH(np.asarray(v, dtype=float))

    def d2H(self, v):
        return self._d2H(np.asarray(v, dtype=float))

    def G(self, u):
        return self._G(np.asarray(u, dtype=float))

    def dG(self, u):
        return self._dG(np.asarray(u, dtype=float))

    def d2G(self, u):
        return self._d2G(np.asarray(u, dtype=float))

    @property
    def hp0(self) -> float:
        """H'(0)."""
        return float(self.dH(0.0))

    @property
    def gp0(self) -> float:
        """G'(0)."""
        return float(self.dG(0.0))

    # constructors ----------------------------------------------------------
    @classmethod
    def monod(cls, alpha1: float, beta1: float, alpha2: float, beta2: float
              ) -> "NonlinearitySpec":
        if min(alpha1, beta1, alpha2, beta2) <= 0:
            raise ValidationError("monod coefficients must be strictly positive")

        def make(alpha, beta):
            return (
                lambda z: alpha * z / (1.0 + beta * z),
                lambda z: alpha / (1.0 + beta * z) ** 2,
                lambda z: -2.0 * alpha * beta / (1.0 + beta * z) ** 3,
            )

        scale = max(1.0, alpha1 / beta1, alpha2 / beta2)
        return cls("monod",
                   dict(alpha1=alpha1, beta1=beta1, alpha2=alpha2, beta2=beta2),
                   make(alpha1, beta1), make(alpha2, beta2), z_scale=scale)

    @classmethod
    def tabulated(cls, h_table: np.ndarray, g_table: np.ndarray,
                  params: dict | None = None) -> "NonlinearitySpec":
        """Build from two (m, 2) arrays of (z, value) rows, strictly increasing z."""
        from scipy.interpolate import CubicSpline

        def make(table, name):
            table = np.asarray(table, dtype=float)
            if table.ndim != 2 or table.shape[1] != 2 or table.shape[0] < 4:
                raise ValidationError(f"{name} table must have >= 4 rows of (z, value)")
            z, val = table[:, 0], table[:, 1]
            if np.any(np.diff(z) <= 0):
                raise ValidationError(f"{name} table abscissae must be strictly increasing")
            spline = CubicSpline(z, val)
            return (spline, spline.derivative(1), spline.derivative(2)), z[-1]

        h_funcs, h_max = make(h_table, "H")
        g_funcs, g_max = make(g_table, "G")
        scale = max(1.0, min(h_max, g_max))
        return cls("tabulated", params or {}, h_funcs, g_funcs, z_scale=scale)

    @classmethod
    def from_csv(cls, h_path, g_path) -> "NonlinearitySpec":
        """Load a tabulated family from two two-column CSV files (z, value)."""
        h_table = np.loadtxt(h_path, delimiter=",", ndmin=2)
        g_table = np.loadtxt(g_path, delimiter=",", ndmin=2)
        return cls.tabulated(h_table, g_table,
                             params=dict(h_file=str(h_path), g_file=str(g_path)))

    @classmethod
    def custom(cls, H, dH, d2H, G, dG, d2G, z_scale: float = 1.0
               ) -> "NonlinearitySpec":
        wrap = lambda f: (lambda z: np.asarray(f(z), dtype=float))
        return cls("custom", {}, (wrap(H), wrap(dH), wrap(d2H)),
                   (wrap(G), wrap(dG), wrap(d2G)), z_scale=z_scale)


@dataclass(frozen=True)
class Equilibrium:
    """Spatially homogeneous equilibrium; exists iff R0 > 1."""

    u_star: float
    v_star: float
    exists: bool


@dataclass(frozen=True)
class ClauseResult:
    name: str
    passed: bool
    witness: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Per-clause admissibility results for a coupling pair."""

    clauses: tuple[ClauseResult, ...]
    zhat: float | None
    warnings: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)


def reproduction_number(nl: NonlinearitySpec, params: ModelParams) -> float:
    """Basic reproduction number H'(0) G'(0) / (a b)."""
    return nl.hp0 * nl.gp0 / (params.a * params.b)


def validate_hypotheses(nl: NonlinearitySpec, params: ModelParams,
                        grid_density: int = 1000,
                        z_max: float | None = None) -> ValidationReport:
    """Check the admissibility clauses for (H, G) on a sampled grid.

    Clauses: H(0) = G(0) = 0; H', G' > 0 on [0, z_max]; H'', G'' < 0 on
    (0, z_max]; and existence of a witness z with G(H(z)/a) < b*z.
    Sampled verification only -- symbolic checks are out of scope.

    Raises NonPositiveDerivative when a first derivative fails strict
    positivity, NoWitness when no saturation witness is found up to z_max.
    Degenerate concavity (second derivative identically ~0, e.g. linear H)
    fails its clause with a warning but does not raise.
    """
    if grid_density < 100:
        raise ValidationError("grid_density must be >= 100")
    if z_max is None:
        z_max = 10.0 * max(1.0, nl.z_scale)
    if z_max <= 0:
        raise ValidationError("z_max must be positive")

    z = np.linspace(0.0, z_max, grid_density + 1)
    zpos = z[1:]
    clauses: list[ClauseResult] = []
    warns: list[str] = []

    scale = max(1.0, float(np.max(np.abs(nl.H(z_max)))), float(np.max(np.abs(nl.G(z_max)))))
    origin_ok = abs(float(nl.H(0.0))) <= 1e-12 * scale and abs(float(nl.G(0.0))) <= 1e-12 * scale
    clauses.append(ClauseResult("origin", origin_ok, 0.0,
                                "" if origin_ok else "H(0) or G(0) differs from 0"))

    for name, deriv in (("H' > 0", nl.dH), ("G' > 0", nl.dG)):
        vals = deriv(z)
        bad = np.where(vals <= 0)[0]
        if bad.size:
            raise NonPositiveDerivative(
                f"{name} fails at z = {z[bad[0]]:.6g} (value {vals[bad[0]]:.6g})")
        clauses.append(ClauseResult(name, True, float(z[int(np.argmin(vals))])))

    for name, second in (("H'' < 0", nl.d2H), ("G'' < 0", nl.d2G)):
        vals = second(zpos)
        tol = 1e-12 * max(1.0, float(np.max(np.abs(vals))))
        if np.all(vals < -tol):
            clauses.append(ClauseResult(name, True, float(zpos[int(np.argmax(vals))])))
        elif np.all(np.abs(vals) <= tol):
            msg = f"degenerate concavity: {name.split()[0]} vanishes identically"
            warns.append(msg)
            warnings.warn(msg, stacklevel=2)
            clauses.append(ClauseResult(name, False, None, "degenerate concavity"))
        else:
            idx = int(np.argmax(vals))
            clauses.append(ClauseResult(name, False, float(zpos[idx]),
                                        f"nonnegative at z = {zpos[idx]:.6g}"))

    gap = nl.G(nl.H(zpos) / params.a) - params.b * zpos
    hits = np.where(gap < 0)[0]
    if hits.size == 0:
        raise NoWitness(
            f"no witness with G(H(z)/a) < b*z found up to z_max = {z_max:.6g}; enlarge z_max")
    zhat = float(zpos[hits[0]])
    clauses.append(ClauseResult("saturation witness", True, zhat))

    return ValidationReport(tuple(clauses), zhat, tuple(warns))


def _equilibrium_residual(nl: NonlinearitySpec, params: ModelParams, v: float) -> float:
    return float(nl.G(nl.H(v) / params.a)) - params.b * v


def equilibrium(nl: NonlinearitySpec, params: ModelParams,
                z_max: float | None = None, tol: float = 1e-10) -> Equilibrium:
    """Locate the positive equilibrium (u*, v*), or report that none exists.

    Solves f(v) = G(H(v)/a) - b*v = 0 by bracketing plus bisection to width
    tol (default 1e-10) and two Newton polishing steps.  f is positive near
    0 exactly when R0 > 1 and eventually negative by saturation, so the
    bracket is guaranteed for admissible couplings.
    """
    a, b = params.a, params.b
    if reproduction_number(nl, params) <= 1.0:
        return Equilibrium(0.0, 0.0, False)

    f = lambda v: _equilibrium_residual(nl, params, v)
    lo = 1e-12
    if f(lo) <= 0.0:
        raise BracketingFailure("residual not positive near v = 0 despite R0 > 1")

    hi = max(1.0, nl.z_scale) if z_max is None else z_max
    cap = 1e15
    while f(hi) >= 0.0:
        hi *= 2.0
        if hi > cap:
            raise BracketingFailure(f"residual does not change sign below {cap:g}")

    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) > 0.0:
            lo = mid
        else:
            hi = mid

    v = 0.5 * (lo + hi)
    for _ in range(2):
        fp = float(nl.dG(nl.H(v) / a)) * float(nl.dH(v)) / a - b
        if fp == 0.0:
            break
        v -= f(v) / fp
    u = float(nl.H(v)) / a

    res1 = abs(a * u - float(nl.H(v))) / max(1.0, abs(a * u))
    res2 = abs(b * v - float(nl.G(u))) / max(1.0, abs(b * v))
    if max(res1, res2) > 1e-12:
        raise BracketingFailure(f"equilibrium residual {max(res1, res2):.3e} exceeds 1e-12")
    return Equilibrium(u, v, True)


# -- initial data ----------------------------------------------------------

class InitialData:
    """Initial profiles (u0, v0) on [0, h0] with an amplitude multiplier tau.

    Built-in bump family: a sine arch for a Dirichlet fixed end and a
    quarter-cosine for a Neumann fixed end, scaled by (amp_u, amp_v) and
    tau.  File-based data are loaded from a CSV with columns x,u,v and
    linearly interpolated onto solver grids.
    """

    def __init__(self, h0: float, fixed_end: FixedEnd, tau: float = 1.0,
                 generator: str = "bump", amp_u: float = 1.0, amp_v: float = 1.0,
                 table: np.ndarray | None = None):
        if h0 <= 0:
            raise InitialDataError("h0 must be positive")
        if tau <= 0:
            raise InitialDataError("tau must be positive")
        self.h0 = float(h0)
        self.fixed_end = FixedEnd(fixed_end)
        self.tau = float(tau)
        self.generator = generator
        self.amp_u = float(amp_u)
        self.amp_v = float(amp_v)
        self.table = None if table is None else np.asarray(table, dtype=float)
        if generator == "file":
            t = self.table
            if t is None or t.ndim != 2 or t.shape[1] != 3 or t.shape[0] < 2:
                raise InitialDataError("file data must be rows of (x, u, v)")
            if np.any(np.diff(t[:, 0]) <= 0):
                raise InitialDataError("file abscissae must be strictly increasing")
            if abs(t[0, 0]) > 1e-12 * h0 or abs(t[-1, 0] - h0) > 1e-12 * h0:
                raise InitialDataError("file abscissae must span [0, h0]")
        elif generator != "bump":
            raise InitialDataError(f"unknown generator '{generator}'")

    @classmethod
    def bump(cls, h0: float, fixed_end: FixedEnd, amp_u: float = 1.0,
             amp_v: float = 1.0, tau: float = 1.0) -> "InitialData":
        return cls(h0, fixed_end, tau, "bump", amp_u, amp_v)

    @classmethod
    def from_csv(cls, path, h0: float, fixed_end: FixedEnd, tau: float = 1.0
                 ) -> "InitialData":
        table = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(h0, fixed_end, tau, "file", table=table)

    def with_tau(self, tau: float) -> "InitialData":
        return InitialData(self.h0, self.fixed_end, tau, self.generator,
                           self.amp_u, self.amp_v, self.table)

    def _shape(self, x: np.ndarray) -> np.ndarray:
        if self.fixed_end is FixedEnd.DIRICHLET:
            return np.sin(np.pi * x / self.h0)
        return np.cos(0.5 * np.pi * x / self.h0)

    def sample_u(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.generator == "bump":
            return self.tau * self.amp_u * self._shape(x)
        return self.tau * np.interp(x, self.table[:, 0], self.table[:, 1])

    def sample_v(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.generator == "bump":
            return self.tau * self.amp_v * self._shape(x)
        return self.tau * np.interp(x, self.table[:, 0], self.table[:, 2])

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.h0, 1025)

    @property
    def u0(self) -> np.ndarray:
        return self.sample_u(self.x)

    @property
    def v0(self) -> np.ndarray:
        return self.sample_v(self.x)

    def validate(self, n: int = 1024) -> None:
        """Check the admissibility conditions on a sample grid.

        Dirichlet fixed end: w(0) = w(h0) = 0, w > 0 inside, w'(0) > 0.
        Neumann fixed end:  w'(0) = 0, w(h0) = 0, w > 0 on [0, h0).
        The derivative at 0 uses a second-order one-sided difference.
        """
        x = np.linspace(0.0, self.h0, n + 1)
        dx = x[1] - x[0]
        for name, w in (("u0", self.sample_u(x)), ("v0", self.sample_v(x))):
            sup = float(np.max(np.abs(w)))
            if sup == 0.0:
                raise InitialDataError(f"{name} is identically zero")
            tol = 1e-9 * sup
            wp0 = (-3.0 * w[0] + 4.0 * w[1] - w[2]) / (2.0 * dx)
            if abs(w[n]) > tol:
                raise InitialDataError(f"{name}(h0) must vanish")
            if self.fixed_end is FixedEnd.DIRICHLET:
                if abs(w[0]) > tol:
                    raise InitialDataError(f"{name}(0) must vanish at a Dirichlet end")
                if np.any(w[1:n] <= 0):
                    raise InitialDataError(f"{name} must be positive on (0, h0)")
                if wp0 <= 0:
                    raise InitialDataError(f"{name}'(0) must be positive")
            else:
                if abs(wp0) * self.h0 > 1e-3 * sup:
                    raise InitialDataError(f"{name}'(0) must vanish at a Neumann end")
                if np.any(w[:n] <= 0):
                    raise InitialDataError(f"{name} must be positive on [0, h0)")
