import math

import pytest

from epifront import (
    InitialData,
    LinkFunction,
    OutcomeClass,
    SolverControls,
    find_mu1_star,
    find_tau_star,
)
from epifront.criteria import write_probe_log
from epifront.errors import NotSupercritical, ValidationError

from conftest import make_params

FAST = SolverControls(n=128, dt=4e-3, t_max=60.0, output_dt=0.5)


@pytest.fixture
def benchmark(monod_symmetric):
    l0 = math.pi
    params = make_params(h0=0.5 * l0)
    init = InitialData.bump(params.h0, "dirichlet")
    return params, monod_symmetric, init


class TestLinkFunction:
    def test_linear_and_power_values(self):
        assert LinkFunction()(2.0) == 2.0
        assert LinkFunction(rho=0.5)(2.0) == 1.0
        assert LinkFunction(kind="power", rho=2.0, exponent=2.0)(3.0) == 18.0

    def test_validation(self):
        LinkFunction().validate()
        LinkFunction(kind="power", rho=0.3, exponent=1.5).validate()
        with pytest.raises(ValidationError):
            LinkFunction(rho=0.0).validate()
        with pytest.raises(ValidationError):
            LinkFunction(kind="banana")(1.0)


class TestMuStar:
    def test_bracket_and_monotone_probes(self, benchmark):
        params, nl, init = benchmark
        res = find_mu1_star(params, nl, init, tol=0.05, controls=FAST, budget=30)
        assert res.converged
        assert res.lo < res.hi
        assert res.width < 0.05
        spread = [p.value for p in res.probes if p.outcome is OutcomeClass.SPREADING]
        vanish = [p.value for p in res.probes if p.outcome is not OutcomeClass.SPREADING]
        assert min(spread) > max(vanish)
        assert res.runs <= 30 + 2  # re-verification runs come on top of the budget

    def test_deterministic_bracket(self, benchmark):
        params, nl, init = benchmark
        first = find_mu1_star(params, nl, init, tol=0.1, controls=FAST, budget=30)
        second = find_mu1_star(params, nl, init, tol=0.1, controls=FAST, budget=30)
        assert first.lo == second.lo and first.hi == second.hi
        assert first.runs == second.runs

    def test_requires_supercritical(self, monod_subcritical):
        with pytest.raises(NotSupercritical):
            find_mu1_star(make_params(h0=1.0), monod_subcritical,
                          InitialData.bump(1.0, "dirichlet"))

    def test_requires_h0_below_l0(self, monod_symmetric):
        params = make_params(h0=4.0)
        with pytest.raises(ValidationError):
            find_mu1_star(params, monod_symmetric, InitialData.bump(4.0, "dirichlet"))


class TestTauStar:
    def test_bracket(self, benchmark):
        params, nl, shapes = benchmark
        res = find_tau_star(params, nl, shapes, tol=0.05, controls=FAST, budget=30)
        assert res.converged
        assert res.width < 0.05
        spread = [p.value for p in res.probes if p.outcome is OutcomeClass.SPREADING]
        vanish = [p.value for p in res.probes if p.outcome is not OutcomeClass.SPREADING]
        assert min(spread) > max(vanish)

    def test_probe_log_format(self, tmp_path, benchmark):
        params, nl, shapes = benchmark
        res = find_tau_star(params, nl, shapes, tol=0.2, controls=FAST, budget=20)
        path = tmp_path / "probes.csv"
        write_probe_log(res, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "param_value,outcome,t_resolved,h_final"
        cells = lines[1].split(",")
        assert len(cells) == 4
        assert cells[1] in {"spreading", "vanishing", "undetermined"}
        float(cells[0]), float(cells[2]), float(cells[3])
