"""Principal eigenvalue of the linearized cooperative system on (0, l).

The linearization around (0, 0) of the coupled system,

    -d1 phi'' + a phi - H'(0) psi = lambda phi
    -d2 psi'' + b psi - G'(0) phi = lambda psi

with the declared operator at x = 0 and Dirichlet at x = l, separates on
the scalar eigenbasis: with nu1 the base eigenvalue of -w'' = nu w (pi^2/l^2
for a Dirichlet fixed end, pi^2/(4 l^2) for Neumann), the principal
eigenvalue is the minus branch of a 2x2 algebraic problem,

    lambda = ((d1 nu1 + a) + (d2 nu1 + b)
              - sqrt(((d1 nu1 + a) - (d2 nu1 + b))^2 + 4 G'(0) H'(0))) / 2,

with positive eigenfunction (phi, psi) = (p w, w), p = H'(0)/(d1 nu1 + a
- lambda).  The sign of lambda(l) decides sub/supercriticality of a habitat
of length l; the unique zero l0 is the critical length.

A finite-difference matrix oracle (second-order central differences,
inverse iteration with shift) provides an independent check of the closed
form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import NonConvergence, NotSupercritical, ValidationError
from .model import FixedEnd, ModelParams, NonlinearitySpec, reproduction_number

__all__ = [
    "EigenResult",
    "base_eigenvalue",
    "lambda_closed_form",
    "lambda_infinity",
    "lambda_discrete_oracle",
    "critical_length",
]


def base_eigenvalue(l: float, fixed_end: FixedEnd) -> float:
    """Principal eigenvalue nu1 of -w'' = nu w on (0, l) with w(l) = 0."""
    if l <= 0:
        raise ValidationError("interval length must be positive")
    if FixedEnd(fixed_end) is FixedEnd.DIRICHLET:
        return math.pi ** 2 / l ** 2
    return math.pi ** 2 / (4.0 * l ** 2)


@dataclass(frozen=True)
class EigenResult:
    """Principal eigenpair on (0, l).

    lam        principal eigenvalue (1/time)
    nu1        base scalar eigenvalue (1/length^2)
    p          amplitude ratio H'(0)/(d1 nu1 + a - lam), positive
    l          interval length
    fixed_end  operator at x = 0
    x          sample abscissae
    phi, psi   eigenfunction samples (p*w and w)
    """

    lam: float
    nu1: float
    p: float
    l: float
    fixed_end: FixedEnd
    x: np.ndarray
    phi: np.ndarray
    psi: np.ndarray

    def residual_sup(self, params: ModelParams, nl: NonlinearitySpec) -> float:
        """Sup-norm defect of the eigensystem at the samples.

        Uses w'' = -nu1 w, so this measures the algebraic identity rather
        than a finite-difference approximation.
        """
        r1 = (params.d1 * self.nu1 + params.a - self.lam) * self.phi - nl.hp0 * self.psi
        r2 = (params.d2 * self.nu1 + params.b - self.lam) * self.psi - nl.gp0 * self.phi
        return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))


def _lambda_from_nu(params: ModelParams, nl: NonlinearitySpec, nu: float) -> float:
    big_a = params.d1 * nu + params.a
    big_b = params.d2 * nu + params.b
    return 0.5 * (big_a + big_b - math.sqrt((big_a - big_b) ** 2 + 4.0 * nl.gp0 * nl.hp0))


def lambda_closed_form(params: ModelParams, nl: NonlinearitySpec, l: float,
                       n_samples: int = 1000) -> EigenResult:
    """Closed-form principal eigenpair on (0, l)."""
    nu = base_eigenvalue(l, params.fixed_end)
    lam = _lambda_from_nu(params, nl, nu)
    p = nl.hp0 / (params.d1 * nu + params.a - lam)
    x = np.linspace(0.0, l, n_samples + 1)
    if params.fixed_end is FixedEnd.DIRICHLET:
        w = np.sin(math.pi * x / l)
    else:
        w = np.cos(0.5 * math.pi * x / l)
    return EigenResult(lam, nu, p, l, params.fixed_end, x, p * w, w)


def lambda_infinity(params: ModelParams, nl: NonlinearitySpec) -> float:
    """Limit of lambda(l) as l -> infinity; negative exactly when R0 > 1."""
    return _lambda_from_nu(params, nl, 0.0)


def _oracle_matrix(params: ModelParams, nl: NonlinearitySpec, l: float, n: int):
    """Interleaved 2m x 2m finite-difference matrix of the eigensystem.

    Unknowns (u_i, v_i) at nodes i = 1..n-1 (Dirichlet fixed end) or
    i = 0..n-1 (Neumann, via a ghost-point mirror); the right endpoint is
    always eliminated.  Interleaving keeps the matrix pentadiagonal.
    """
    dx = l / n
    neumann = params.fixed_end is FixedEnd.NEUMANN
    m = n if neumann else n - 1
    c1 = params.d1 / dx ** 2
    c2 = params.d2 / dx ** 2

    main = np.empty(2 * m)
    main[0::2] = 2.0 * c1 + params.a
    main[1::2] = 2.0 * c2 + params.b
    cross = np.empty(2 * m - 1)
    cross[0::2] = -nl.hp0
    cross[1::2] = 0.0
    cross_lo = np.empty(2 * m - 1)
    cross_lo[0::2] = -nl.gp0
    cross_lo[1::2] = 0.0
    diff_up = np.empty(2 * m - 2)
    diff_up[0::2] = -c1
    diff_up[1::2] = -c2
    diff_lo = diff_up.copy()
    if neumann:
        # ghost mirror at node 0: u'' ~ (2 u1 - 2 u0)/dx^2
        diff_up[0] = -2.0 * c1
        diff_up[1] = -2.0 * c2

    return sp.diags([main, cross, cross_lo, diff_up, diff_lo],
                    [0, 1, -1, 2, -2], format="csc")


def lambda_discrete_oracle(params: ModelParams, nl: NonlinearitySpec, l: float,
                           n: int = 1024, tol: float = 1e-12,
                           max_iter: int = 500) -> float:
    """Eigenvalue of smallest real part of the discretized system.

    Inverse iteration with a shift seeded from the closed form; the
    positivity of the converged eigenvector is verified.  Independent of
    the closed form in everything except the shift.
    """
    if n < 16:
        raise ValidationError("oracle grid must have n >= 16")
    matrix = _oracle_matrix(params, nl, l, n)
    lam_seed = lambda_closed_form(params, nl, l, n_samples=2).lam
    shift = lam_seed - 0.1 * (1.0 + abs(lam_seed))

    for attempt in range(2):
        m2 = matrix - shift * sp.identity(matrix.shape[0], format="csc")
        lu = spla.splu(m2)
        x = np.ones(matrix.shape[0])
        x /= np.linalg.norm(x)
        lam_old = math.inf
        for _ in range(max_iter):
            y = lu.solve(x)
            norm = np.linalg.norm(y)
            y /= norm
            lam = shift + float(y @ x) / norm  # (M - shift I) y = x / ||y||
            if abs(lam - lam_old) < tol * (1.0 + abs(lam)):
                if np.max(y) < -np.min(y):
                    y = -y
                if np.min(y) < -1e-8 * np.max(y):
                    raise NonConvergence("converged eigenvector is not positive")
                return lam
            lam_old = lam
            x = y
        shift -= 0.5 * (1.0 + abs(shift))  # retry with a spectrum shift
    raise NonConvergence(f"inverse iteration did not converge in {max_iter} steps")


def critical_length(params: ModelParams, nl: NonlinearitySpec) -> float:
    """Critical habitat length l0 with lambda(l0) = 0; requires R0 > 1.

    Dirichlet fixed end:

        l0 = pi * sqrt((a d2 + b d1 + sqrt((a d2 - b d1)^2
                        + 4 d1 d2 H'(0) G'(0))) / (2 (H'(0) G'(0) - a b)))

    and half that for a Neumann fixed end.
    """
    if reproduction_number(nl, params) <= 1.0:
        raise NotSupercritical("critical length is undefined for R0 <= 1")
    a, b, d1, d2 = params.a, params.b, params.d1, params.d2
    hg = nl.hp0 * nl.gp0
    num = a * d2 + b * d1 + math.sqrt((a * d2 - b * d1) ** 2 + 4.0 * d1 * d2 * hg)
    l0 = math.pi * math.sqrt(num / (2.0 * (hg - a * b)))
    if params.fixed_end is FixedEnd.NEUMANN:
        l0 *= 0.5
    return l0
