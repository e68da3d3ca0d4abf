"""Critical-threshold location by monotone bisection over full simulations.

For a supercritical model started below the critical length, spreading is
monotone in the expansion coefficients and in the initial amplitude, so a
unique threshold separates vanishing from spreading along any increasing
path: mu2 = Q(mu1) with Q(0) = 0 strictly increasing, or initial data
tau*(theta1, theta2) scaled by tau.  Each probe is a full simulate +
classify; the bracket is expanded by doubling/halving and then bisected.
The exact threshold is not a computable point -- the result is always an
interval with a vanishing probe at the low end and a spreading probe at
the high end.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .dichotomy import Outcome, OutcomeClass, Thresholds, classify, make_stop_rule
from .errors import InconsistentMonotonicity, NotSupercritical, NumericalError, ValidationError
from .model import InitialData, ModelParams, NonlinearitySpec, reproduction_number
from .spectral import critical_length
from .stefan import SolverControls, simulate

__all__ = [
    "LinkFunction",
    "ProbeRecord",
    "ThresholdResult",
    "find_mu1_star",
    "find_tau_star",
    "write_probe_log",
]

PROBE_LOG_HEADER = "param_value,outcome,t_resolved,h_final"


@dataclass(frozen=True)
class LinkFunction:
    """Monotone link mu2 = Q(mu1); linear by default, power-law optional."""

    kind: str = "linear"
    rho: float = 1.0
    exponent: float = 1.0

    def __call__(self, mu1: float) -> float:
        if self.kind == "linear":
            return self.rho * mu1
        if self.kind == "power":
            return self.rho * mu1 ** self.exponent
        raise ValidationError(f"unknown link kind '{self.kind}'")

    def validate(self) -> None:
        if self.rho <= 0 or self.exponent <= 0:
            raise ValidationError("link coefficients must be positive")
        if abs(self(0.0)) != 0.0:
            raise ValidationError("link must satisfy Q(0) = 0")
        samples = [self(10.0 ** k) for k in range(-3, 7)]
        if any(b <= a for a, b in zip(samples, samples[1:])):
            raise ValidationError("link must be strictly increasing")
        if self(1e6) < 1.0:
            raise ValidationError("link must be unbounded (too small at 1e6)")


@dataclass(frozen=True)
class ProbeRecord:
    value: float
    outcome: OutcomeClass
    t_resolved: float
    h_final: float


@dataclass(frozen=True)
class ThresholdResult:
    """Bracket (lo, hi) with vanishing at lo and spreading at hi."""

    name: str
    lo: float
    hi: float
    runs: int
    probes: tuple[ProbeRecord, ...]
    converged: bool
    note: str = ""

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "lo": self.lo,
            "hi": self.hi,
            "width": self.width,
            "runs": self.runs,
            "converged": self.converged,
            "note": self.note,
        }


DEFAULT_PROBE_CONTROLS = SolverControls(n=256, dt=2e-3, t_max=200.0, output_dt=0.5)


class _Bisector:
    """Shared doubling/halving/bisection engine over a scalar parameter."""

    def __init__(self, name, run_probe, tol, budget):
        self.name = name
        self.run_probe = run_probe  # (value, t_max_scale) -> Outcome-like probe
        self.tol = tol
        self.budget = budget
        self.t_scale = 1.0
        self.t_doubled = False
        self.probes: list[ProbeRecord] = []
        self.by_value: dict[float, OutcomeClass] = {}
        self.runs = 0

    def probe(self, value: float) -> OutcomeClass:
        rec = self.run_probe(value, self.t_scale)
        self.runs += 1
        if rec.outcome is OutcomeClass.UNDETERMINED and not self.t_doubled:
            # one-time horizon doubling; long-undetermined runs are vanishing-like
            self.t_doubled = True
            self.t_scale = 2.0
            rec = self.run_probe(value, self.t_scale)
            self.runs += 1
        self.probes.append(rec)
        self.by_value[value] = rec.outcome
        self._check_monotone()
        return rec.outcome

    def _spreading(self, outcome: OutcomeClass) -> bool:
        return outcome is OutcomeClass.SPREADING

    def _check_monotone(self) -> None:
        spread = [v for v, o in self.by_value.items() if self._spreading(o)]
        vanish = [v for v, o in self.by_value.items() if not self._spreading(o)]
        if spread and vanish and min(spread) <= max(vanish):
            raise InconsistentMonotonicity(
                f"{self.name}: spreading at {min(spread):.6g} but not at {max(vanish):.6g}")

    def search(self, start: float = 1.0) -> tuple[float, float, bool, str]:
        first = self.probe(start)
        if self._spreading(first):
            hi = start
            lo = start
            while True:
                lo *= 0.5
                if lo < 1e-18:
                    raise NumericalError(f"{self.name}: no vanishing probe above 1e-18")
                if not self._spreading(self.probe(lo)):
                    break
        else:
            lo = start
            hi = start
            while True:
                hi *= 2.0
                if hi > 1e18:
                    raise NumericalError(f"{self.name}: no spreading probe below 1e18")
                if self._spreading(self.probe(hi)):
                    break

        converged = True
        note = ""
        while hi - lo >= self.tol:
            if self.runs >= self.budget:
                converged = False
                note = "budget exhausted before reaching tolerance"
                break
            mid = 0.5 * (lo + hi)
            if self._spreading(self.probe(mid)):
                hi = mid
            else:
                lo = mid

        # bracket validity: endpoints re-simulated and re-classified
        if not self._spreading(self.probe(hi)):
            raise InconsistentMonotonicity(f"{self.name}: hi endpoint did not re-verify")
        lo_class = self.probe(lo)
        if self._spreading(lo_class):
            raise InconsistentMonotonicity(f"{self.name}: lo endpoint did not re-verify")
        if lo_class is OutcomeClass.UNDETERMINED:
            note = (note + "; " if note else "") + "lo endpoint undetermined at t_max"
        return lo, hi, converged, note


def _threshold_search(name: str, run_probe, tol: float, budget: int
                      ) -> ThresholdResult:
    """Run the bisection, retrying once with a doubled horizon on inconsistency."""
    last_exc = None
    for attempt in range(2):
        bis = _Bisector(name, run_probe, tol, budget)
        if attempt == 1:
            bis.t_scale = 2.0
            bis.t_doubled = True
        try:
            lo, hi, converged, note = bis.search()
            return ThresholdResult(name, lo, hi, bis.runs, tuple(bis.probes),
                                   converged, note)
        except InconsistentMonotonicity as exc:
            last_exc = exc
    raise last_exc


def _probe_record(value: float, timeline, outcome: Outcome) -> ProbeRecord:
    return ProbeRecord(value, outcome.classification,
                       outcome.evidence.t_fired, float(timeline.h[-1]))


def find_mu1_star(params: ModelParams, nl: NonlinearitySpec, init: InitialData,
                  link: LinkFunction = LinkFunction(), tol: float = 1e-2,
                  controls: SolverControls = DEFAULT_PROBE_CONTROLS,
                  thresholds: Thresholds = Thresholds(),
                  budget: int = 40) -> ThresholdResult:
    """Bracket the critical expansion coefficient along mu2 = Q(mu1).

    Requires R0 > 1 and h0 < l0 (otherwise every run spreads and no
    threshold exists).  Spreading for large mu1 and vanishing for small
    mu1 + mu2 are guaranteed, so doubling/halving always terminates.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if reproduction_number(nl, params) <= 1.0:
        raise NotSupercritical("mu1 threshold requires R0 > 1")
    if params.h0 >= critical_length(params, nl):
        raise ValidationError("mu1 threshold requires h0 < l0")
    link.validate()

    def run_probe(mu1: float, t_scale: float) -> ProbeRecord:
        probe_params = replace(params, mu1=mu1, mu2=link(mu1))
        probe_controls = replace(controls, t_max=controls.t_max * t_scale)
        timeline, _ = simulate(probe_params, nl, init, probe_controls,
                               stop_rule=make_stop_rule(probe_params, nl, thresholds))
        outcome = classify(timeline, probe_params, nl, thresholds)
        return _probe_record(mu1, timeline, outcome)

    return _threshold_search("mu1_star", run_probe, tol, budget)


def find_tau_star(params: ModelParams, nl: NonlinearitySpec, shapes: InitialData,
                  tol: float = 1e-2,
                  controls: SolverControls = DEFAULT_PROBE_CONTROLS,
                  thresholds: Thresholds = Thresholds(),
                  budget: int = 40) -> ThresholdResult:
    """Bracket the critical initial amplitude for data tau*(theta1, theta2)."""
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if reproduction_number(nl, params) <= 1.0:
        raise NotSupercritical("tau threshold requires R0 > 1")
    if params.h0 >= critical_length(params, nl):
        raise ValidationError("tau threshold requires h0 < l0")
    shapes.validate()

    def run_probe(tau: float, t_scale: float) -> ProbeRecord:
        probe_controls = replace(controls, t_max=controls.t_max * t_scale)
        timeline, _ = simulate(params, nl, shapes.with_tau(tau), probe_controls,
                               stop_rule=make_stop_rule(params, nl, thresholds))
        outcome = classify(timeline, params, nl, thresholds)
        return _probe_record(tau, timeline, outcome)

    return _threshold_search("tau_star", run_probe, tol, budget)


def write_probe_log(result: ThresholdResult, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(PROBE_LOG_HEADER + "\n")
        for rec in result.probes:
            fh.write("%.12e,%s,%.12e,%.12e\n"
                     % (rec.value, rec.outcome.value, rec.t_resolved, rec.h_final))
