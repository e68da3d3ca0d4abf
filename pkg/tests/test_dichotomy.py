import math

import numpy as np
import pytest

from epifront import (
    InitialData,
    OutcomeClass,
    SolverControls,
    classify,
    critical_length,
    decay_rate,
    make_stop_rule,
    simulate,
    vanishing_bound,
)
from epifront.errors import InsufficientData, NotSubcritical, ValidationError
from epifront.stefan import Timeline

from conftest import make_params


def synthetic_timeline(t, norm, h=2.0):
    t = np.asarray(t, dtype=float)
    norm = np.asarray(norm, dtype=float)
    return Timeline(t, np.full_like(t, h), np.zeros_like(t),
                    norm / 2.0, norm / 2.0, norm, norm)


class TestClassify:
    def test_spreading_when_h0_beyond_l0(self, monod_benchmark):
        params = make_params(h0=4.0)
        init = InitialData.bump(4.0, "dirichlet")
        rule = make_stop_rule(params, monod_benchmark)
        timeline, _ = simulate(params, monod_benchmark, init,
                               SolverControls(n=128, dt=2e-3, t_max=20.0, output_dt=0.5),
                               stop_rule=rule)
        out = classify(timeline, params, monod_benchmark)
        assert out.classification is OutcomeClass.SPREADING
        assert out.evidence.rule.startswith("h >= l0")
        assert out.l0 == pytest.approx(critical_length(params, monod_benchmark))
        assert out.h_inf is None

    def test_vanishing_subcritical(self, monod_subcritical):
        params = make_params(h0=2.0)
        init = InitialData.bump(2.0, "dirichlet")
        rule = make_stop_rule(params, monod_subcritical)
        timeline, _ = simulate(params, monod_subcritical, init,
                               SolverControls(n=128, dt=2e-3, t_max=100.0, output_dt=0.1),
                               stop_rule=rule)
        out = classify(timeline, params, monod_subcritical)
        assert out.classification is OutcomeClass.VANISHING
        assert out.l0 is None
        assert out.h_inf == pytest.approx(float(timeline.h[-1]))
        assert out.decay_rate_fit is not None and out.decay_rate_fit > 0.5

    def test_supercritical_vanishing_h_bound(self, monod_symmetric):
        l0 = math.pi
        params = make_params(h0=0.5 * l0)
        init = InitialData.bump(params.h0, "dirichlet", tau=0.05)
        rule = make_stop_rule(params, monod_symmetric)
        timeline, state = simulate(params, monod_symmetric, init,
                                   SolverControls(n=128, dt=2e-3, t_max=100.0, output_dt=0.5),
                                   stop_rule=rule)
        out = classify(timeline, params, monod_symmetric)
        assert out.classification is OutcomeClass.VANISHING
        assert out.h_inf <= l0 + 2.0 * state.h / 128

    def test_undetermined_on_short_run(self, monod_symmetric):
        # borderline data, deliberately truncated horizon
        params = make_params(h0=0.5 * math.pi)
        init = InitialData.bump(params.h0, "dirichlet")
        timeline, _ = simulate(params, monod_symmetric, init,
                               SolverControls(n=128, dt=2e-3, t_max=2.0, output_dt=0.5))
        out = classify(timeline, params, monod_symmetric)
        assert out.classification is OutcomeClass.UNDETERMINED
        assert out.evidence.rule == "t_max reached"

    def test_spreading_evidence_is_monotone_stable(self, monod_benchmark):
        params = make_params(h0=4.0)
        init = InitialData.bump(4.0, "dirichlet")
        timeline, _ = simulate(params, monod_benchmark, init,
                               SolverControls(n=128, dt=2e-3, t_max=5.0, output_dt=0.5))
        l0 = critical_length(params, monod_benchmark)
        fired = timeline.h >= l0 * (1.0 + 1e-3)
        first = int(np.argmax(fired))
        assert np.all(fired[first:])

    def test_empty_timeline_rejected(self, monod_benchmark):
        empty = Timeline(*(np.empty(0) for _ in range(7)))
        with pytest.raises(ValidationError):
            classify(empty, make_params(), monod_benchmark)


class TestDecayRate:
    def test_exact_exponential(self):
        t = np.linspace(0.0, 20.0, 401)
        assert decay_rate(synthetic_timeline(t, np.exp(-2.0 * t))) == pytest.approx(2.0, abs=1e-6)

    def test_flat_norm(self):
        t = np.linspace(0.0, 20.0, 401)
        assert decay_rate(synthetic_timeline(t, np.ones_like(t))) == pytest.approx(0.0, abs=1e-12)

    def test_insufficient_data(self):
        t = np.linspace(0.0, 1.0, 10)
        with pytest.raises(InsufficientData):
            decay_rate(synthetic_timeline(t, np.exp(-t)))


class TestVanishingBound:
    def test_zero_expansion_gives_h0(self, monod_subcritical):
        params = make_params(mu1=0.0, mu2=0.0, h0=2.0)
        init = InitialData.bump(2.0, "dirichlet")
        assert vanishing_bound(params, monod_subcritical, init) == 2.0

    def test_small_data_limit_approaches_h0(self, monod_subcritical):
        params = make_params(h0=2.0)
        init = InitialData.bump(2.0, "dirichlet", tau=1e-12)
        assert vanishing_bound(params, monod_subcritical, init) == pytest.approx(2.0, abs=1e-10)

    def test_simulated_h_respects_bound(self, monod_subcritical):
        params = make_params(d2=2.0, h0=2.0)
        init = InitialData.bump(2.0, "dirichlet")
        bound = vanishing_bound(params, monod_subcritical, init)
        rule = make_stop_rule(params, monod_subcritical)
        n = 256
        timeline, state = simulate(params, monod_subcritical, init,
                                   SolverControls(n=n, dt=1e-3, t_max=100.0, output_dt=0.5),
                                   stop_rule=rule)
        assert float(timeline.h[-1]) <= bound + 2.0 * state.h / n

    def test_supercritical_rejected(self, monod_benchmark):
        with pytest.raises(NotSubcritical):
            vanishing_bound(make_params(), monod_benchmark,
                            InitialData.bump(4.0, "dirichlet"))

    def test_neumann_refused(self, monod_subcritical):
        params = make_params(fixed_end="neumann", h0=2.0)
        with pytest.raises(ValidationError):
            vanishing_bound(params, monod_subcritical, InitialData.bump(2.0, "neumann"))
