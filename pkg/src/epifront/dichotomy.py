"""Classification of a run as spreading, vanishing, or undetermined.

Spreading is declared as soon as the boundary clears the critical length
with a small safety margin -- once h >= l0 the outcome is rigorous, and the
margin absorbs discretization error in h.  Vanishing requires both a tiny
sup norm and a nearly frozen boundary (plus h < l0 in the supercritical
case, where the claim would otherwise be contradictory); for R0 <= 1 the
norm and boundary conditions alone suffice.  Anything else at the end of
the record is undetermined, which is a valid result for short runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .errors import InsufficientData, NotSubcritical, ValidationError
from .model import FixedEnd, InitialData, ModelParams, NonlinearitySpec, reproduction_number
from .spectral import critical_length, lambda_closed_form
from .stefan import Timeline

__all__ = [
    "OutcomeClass",
    "Thresholds",
    "Evidence",
    "Outcome",
    "classify",
    "decay_rate",
    "vanishing_bound",
    "make_stop_rule",
]


class OutcomeClass(str, Enum):
    SPREADING = "spreading"
    VANISHING = "vanishing"
    UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Thresholds:
    """Detection thresholds for the classifier.

    delta_s  relative margin over l0 before declaring spreading
    eps_v    sup-norm level below which the solution counts as vanished
    eps_h    boundary-speed level below which the front counts as frozen
    """

    delta_s: float = 1e-3
    eps_v: float = 1e-8
    eps_h: float = 1e-10


@dataclass(frozen=True)
class Evidence:
    rule: str
    t_fired: float


@dataclass(frozen=True)
class Outcome:
    classification: OutcomeClass
    h_inf: float | None
    decay_rate_fit: float | None
    l0: float | None
    evidence: Evidence

    def to_json_dict(self) -> dict:
        return {
            "class": self.classification.value,
            "h_inf": self.h_inf,
            "decay_rate": self.decay_rate_fit,
            "l0": self.l0,
            "evidence": {"rule": self.evidence.rule, "t_fired": self.evidence.t_fired},
        }


RULE_SPREADING = "h >= l0*(1+delta_s)"
RULE_VANISHING = "norm < eps_v and h' < eps_h"
RULE_TMAX = "t_max reached"


def _spreading_at(r0: float, l0: float | None, h: float, thr: Thresholds) -> bool:
    return r0 > 1.0 and l0 is not None and h >= l0 * (1.0 + thr.delta_s)


def _vanishing_at(r0: float, l0: float | None, h: float, h_prime: float,
                  norm: float, thr: Thresholds) -> bool:
    small = norm < thr.eps_v and h_prime < thr.eps_h
    if r0 > 1.0:
        return small and l0 is not None and h < l0
    return small


def classify(timeline: Timeline, params: ModelParams, nl: NonlinearitySpec,
             thresholds: Thresholds = Thresholds()) -> Outcome:
    """Classify a timeline; undetermined is a valid outcome at t_max."""
    if len(timeline) == 0:
        raise ValidationError("timeline is empty")
    r0 = reproduction_number(nl, params)
    l0 = critical_length(params, nl) if r0 > 1.0 else None

    for k in range(len(timeline)):
        h = float(timeline.h[k])
        if _spreading_at(r0, l0, h, thresholds):
            return Outcome(OutcomeClass.SPREADING, None, None, l0,
                           Evidence(RULE_SPREADING, float(timeline.t[k])))
        norm = float(timeline.sup_u[k] + timeline.sup_v[k])
        if _vanishing_at(r0, l0, h, float(timeline.h_prime[k]), norm, thresholds):
            h_inf = float(timeline.h[-1])
            rate = None
            lam = lambda_closed_form(params, nl, h_inf, n_samples=2).lam
            if lam > 1e-12:
                try:
                    rate = decay_rate(timeline, thresholds.eps_v)
                except InsufficientData:
                    rate = None
            return Outcome(OutcomeClass.VANISHING, h_inf, rate, l0,
                           Evidence(RULE_VANISHING, float(timeline.t[k])))

    return Outcome(OutcomeClass.UNDETERMINED, None, None, l0,
                   Evidence(RULE_TMAX, float(timeline.t[-1])))


def decay_rate(timeline: Timeline, eps_v: float = 1e-8) -> float:
    """Least-squares decay rate of log(sup_u + sup_v).

    Fits the final 50% of the record before the norm first drops below
    eps_v and returns minus the slope.  Raises InsufficientData with fewer
    than 20 samples in the window.
    """
    norm = timeline.norm
    below = np.where(norm < eps_v)[0]
    end = int(below[0]) if below.size else len(norm)
    window = slice(end // 2, end)
    t = timeline.t[window]
    w = norm[window]
    if len(t) < 20:
        raise InsufficientData(f"only {len(t)} samples in the decay window (need 20)")
    if np.any(w <= 0):
        raise InsufficientData("norm vanishes inside the decay window")
    slope = np.polyfit(t, np.log(w), 1)[0]
    return float(-slope)


def vanishing_bound(params: ModelParams, nl: NonlinearitySpec,
                    init: InitialData) -> float:
    """Analytic bound on the final boundary position for R0 <= 1.

    h_inf <= h0 + max(mu1, mu2)/min(d1, H'(0) d2 / b)
                  * integral_0^h0 (u0 + (H'(0)/b) v0) dx,

    valid for a Dirichlet fixed end (the derivation uses positive outward
    flux at x = 0).  The integral is composite-Simpson quadrature on the
    initial-data sample grid.
    """
    if reproduction_number(nl, params) > 1.0:
        raise NotSubcritical("vanishing bound requires R0 <= 1")
    if params.fixed_end is not FixedEnd.DIRICHLET:
        raise ValidationError("vanishing bound is only stated for a Dirichlet fixed end")
    x = init.x
    integrand = init.u0 + (nl.hp0 / params.b) * init.v0
    integral = float(simpson(integrand, x=x))
    rate = max(params.mu1, params.mu2) / min(params.d1, nl.hp0 * params.d2 / params.b)
    return params.h0 + rate * integral


def make_stop_rule(params: ModelParams, nl: NonlinearitySpec,
                   thresholds: Thresholds = Thresholds()
                   ) -> Callable[[dict], str | None]:
    """Early-exit rule for the simulator, matching the classifier's tests."""
    r0 = reproduction_number(nl, params)
    l0 = critical_length(params, nl) if r0 > 1.0 else None

    def rule(row: dict) -> str | None:
        if _spreading_at(r0, l0, row["h"], thresholds):
            return OutcomeClass.SPREADING.value
        norm = row["sup_u"] + row["sup_v"]
        if _vanishing_at(r0, l0, row["h"], row["h_prime"], norm, thresholds):
            return OutcomeClass.VANISHING.value
        return None

    return rule
