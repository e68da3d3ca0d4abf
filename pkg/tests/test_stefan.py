import math

import numpy as np
import pytest

from epifront import (
    InitialData,
    SimState,
    SolverControls,
    ceiling_constants,
    simulate,
    step,
)
from epifront.errors import BlowUp, CflViolation, InitialDataError, ValidationError
from epifront.stefan import read_timeline_csv, write_state_csv, write_timeline_csv

from conftest import make_params
from fixed_domain_reference import solve_fixed_domain


def fresh_state(h, n, u=None, v=None):
    y = np.linspace(0.0, 1.0, n + 1)
    zero = np.zeros(n + 1)
    return SimState(0.0, h, y, zero if u is None else u, zero if v is None else v, 0.0)


class TestStep:
    def test_zero_fields_only_time_moves(self, monod_symmetric):
        params = make_params(h0=2.0)
        state = fresh_state(2.0, 128)
        out = step(state, params, monod_symmetric, 1e-3)
        assert out.t == pytest.approx(1e-3)
        assert out.h == 2.0
        assert out.h_prime == 0.0
        assert float(np.max(out.u)) == 0.0

    def test_linear_profile_boundary_speed(self, monod_symmetric):
        # u = K1 (1 - y) has u_x(t, h) = -K1/h exactly for the one-sided stencil
        k1, h, mu1 = 4.0 / 3.0, 2.0, 1.5
        params = make_params(mu1=mu1, mu2=0.0, h0=h)
        n = 128
        y = np.linspace(0.0, 1.0, n + 1)
        state = fresh_state(h, n, u=k1 * (1.0 - y))
        out = step(state, params, monod_symmetric, 1e-4)
        assert out.h > h
        predictor_speed = (out.h - h) / 1e-4  # Heun average of two positive speeds
        assert predictor_speed == pytest.approx(mu1 * k1 / h, rel=2e-2)

    def test_cfl_violation_raised(self, monod_symmetric):
        k1, h = 4.0 / 3.0, 2.0
        params = make_params(mu1=5.0, mu2=0.0, h0=h)
        n = 128
        y = np.linspace(0.0, 1.0, n + 1)
        state = fresh_state(h, n, u=k1 * (1.0 - y))
        with pytest.raises(CflViolation):
            step(state, params, monod_symmetric, 0.5)

    def test_blowup_guard(self, monod_symmetric):
        params = make_params(h0=2.0)
        n = 128
        y = np.linspace(0.0, 1.0, n + 1)
        state = fresh_state(2.0, n, u=np.sin(math.pi * y))
        with pytest.raises(BlowUp):
            step(state, params, monod_symmetric, 1e-4, caps=(1e-9, 1e-9))


class TestFixedBoundaryReduction:
    def test_matches_independent_reference(self, monod_subcritical):
        params = make_params(d2=2.0, mu1=0.0, mu2=0.0, h0=2.0)
        init = InitialData.bump(2.0, "dirichlet")
        n = 256
        controls = SolverControls(n=n, dt=5e-4, t_max=1.0, output_dt=1.0)
        timeline, state = simulate(params, monod_subcritical, init, controls)
        assert np.all(timeline.h == 2.0)
        x = np.linspace(0.0, 2.0, n + 1)
        u_ref, v_ref = solve_fixed_domain(params, monod_subcritical,
                                          init.sample_u(x), init.sample_v(x), 2.0, 1.0)
        assert float(np.max(np.abs(state.u - u_ref))) < 1e-6
        assert float(np.max(np.abs(state.v - v_ref))) < 1e-6


class TestSimulate:
    def test_positivity_h_monotone_and_ceilings(self, monod_benchmark):
        params = make_params(h0=4.0)
        init = InitialData.bump(4.0, "dirichlet")
        controls = SolverControls(n=128, dt=2e-3, t_max=8.0, output_dt=0.5)
        timeline, state = simulate(params, monod_benchmark, init, controls)
        ceil = ceiling_constants(monod_benchmark, params, init)
        assert np.all(timeline.sup_u >= 0.0)
        assert np.all(timeline.sup_u <= ceil.K1 + 1e-9)
        assert np.all(timeline.sup_v <= ceil.K2 + 1e-9)
        assert np.all(np.diff(timeline.h) >= 0.0)
        assert np.all(timeline.h_prime >= -1e-12)
        assert not timeline.ceiling_exceeded
        assert np.all(state.u >= 0.0)

    def test_grid_convergence_second_order(self, monod_benchmark):
        params = make_params(h0=3.0)
        init = InitialData.bump(3.0, "dirichlet")
        finals = {}
        for n in (128, 256, 512):
            controls = SolverControls(n=n, dt=2.5e-4, t_max=1.0, output_dt=1.0)
            _, state = simulate(params, monod_benchmark, init, controls)
            finals[n] = state
        # compare on shared nodes of the nested reference grids
        e1 = float(np.max(np.abs(finals[128].u - finals[256].u[::2])))
        e2 = float(np.max(np.abs(finals[256].u - finals[512].u[::2])))
        assert 3.0 < e1 / e2 < 5.0

    def test_comparison_principle_in_parameters(self, monod_benchmark):
        base = dict(n=128, dt=2e-3, t_max=10.0, output_dt=0.5)
        init = InitialData.bump(2.0, "dirichlet")
        runs = {}
        for tag, kw, data in (
            ("base", dict(mu1=0.5, mu2=0.5), init),
            ("mu1_up", dict(mu1=1.0, mu2=0.5), init),
            ("mu2_up", dict(mu1=0.5, mu2=1.0), init),
            ("tau_up", dict(mu1=0.5, mu2=0.5), init.with_tau(1.5)),
        ):
            params = make_params(h0=2.0, **kw)
            timeline, _ = simulate(params, monod_benchmark, data,
                                   SolverControls(**base))
            runs[tag] = timeline
        slack = 1e-8
        for tag in ("mu1_up", "mu2_up", "tau_up"):
            assert np.all(runs[tag].h >= runs["base"].h - slack), tag

    def test_vanishing_flux_inequality(self, monod_subcritical):
        # discrete form of the mass identity that bounds the boundary march
        params = make_params(d2=2.0, h0=2.0)
        nl = monod_subcritical
        init = InitialData.bump(2.0, "dirichlet")
        n = 256
        controls = SolverControls(n=n, dt=1e-3, t_max=4.0, output_dt=0.5)
        y = np.linspace(0.0, 1.0, n + 1)
        u = init.sample_u(y * 2.0)
        v = init.sample_v(y * 2.0)
        u[0] = u[-1] = v[0] = v[-1] = 0.0
        state = SimState(0.0, 2.0, y, u, v, 0.0)
        from scipy.integrate import simpson

        weight = nl.hp0 / params.b
        dy = 1.0 / n

        def mass(st):
            return st.h * (float(simpson(st.u, dx=dy)) + weight * float(simpson(st.v, dx=dy)))

        def flux(st):
            gu = (st.u[-3] - 4.0 * st.u[-2]) / (2.0 * dy * st.h)
            gv = (st.v[-3] - 4.0 * st.v[-2]) / (2.0 * dy * st.h)
            return params.d1 * gu + weight * params.d2 * gv

        dt_out = 0.1
        for _ in range(30):
            prev = state
            for _ in range(100):
                state = step(state, params, nl, 1e-3)
            lhs = (mass(state) - mass(prev)) / dt_out
            rhs = 0.5 * (flux(prev) + flux(state))
            assert lhs <= rhs + 5e-3 * max(1.0, abs(rhs))

    def test_stop_rule_ends_run(self, monod_benchmark):
        params = make_params(h0=4.0)
        init = InitialData.bump(4.0, "dirichlet")
        controls = SolverControls(n=128, dt=2e-3, t_max=50.0, output_dt=0.5)
        timeline, state = simulate(params, monod_benchmark, init, controls,
                                   stop_rule=lambda row: "big" if row["h"] > 5.0 else None)
        assert timeline.stop_reason == "big"
        assert state.t < 50.0

    def test_mismatched_initial_data_rejected(self, monod_benchmark):
        params = make_params(h0=4.0)
        with pytest.raises(InitialDataError):
            simulate(params, monod_benchmark, InitialData.bump(2.0, "dirichlet"))
        with pytest.raises(InitialDataError):
            simulate(params, monod_benchmark, InitialData.bump(4.0, "neumann"))

    def test_minimum_grid_enforced(self):
        with pytest.raises(ValidationError):
            SolverControls(n=32)


class TestPersistence:
    def test_timeline_round_trip(self, tmp_path, monod_benchmark):
        params = make_params(h0=2.0)
        init = InitialData.bump(2.0, "dirichlet")
        timeline, state = simulate(params, monod_benchmark, init,
                                   SolverControls(n=128, dt=2e-3, t_max=2.0, output_dt=0.5))
        path = tmp_path / "timeline.csv"
        write_timeline_csv(timeline, path)
        text = path.read_text().splitlines()
        assert text[0] == "t,h,h_prime,sup_u,sup_v,mass_u,mass_v"
        assert len(text[1].split(",")) == 7
        loaded = read_timeline_csv(path)
        np.testing.assert_allclose(loaded.h, timeline.h, rtol=1e-12)
        np.testing.assert_allclose(loaded.mass_v, timeline.mass_v, rtol=1e-12)

    def test_state_snapshot_columns(self, tmp_path, monod_benchmark):
        params = make_params(h0=2.0)
        init = InitialData.bump(2.0, "dirichlet")
        _, state = simulate(params, monod_benchmark, init,
                            SolverControls(n=128, dt=2e-3, t_max=1.0, output_dt=0.5))
        path = tmp_path / "state.csv"
        write_state_csv(state, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "y,x,u,v"
        row = [float(c) for c in lines[64].split(",")]
        assert row[1] == pytest.approx(row[0] * state.h, rel=1e-12)
