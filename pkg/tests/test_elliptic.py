import math

import numpy as np
import pytest

from epifront import (
    InitialData,
    ceiling_constants,
    critical_length,
    equilibrium,
    semi_infinite_profile,
    solve_steady,
)
from epifront.errors import NotSupercritical, Subcritical, ValidationError

from conftest import make_params


class TestCeilingConstants:
    def test_benchmark_with_initial_data(self, monod_benchmark):
        params = make_params()
        init = InitialData.bump(4.0, "dirichlet", amp_u=1.0, amp_v=1.0)
        ceil = ceiling_constants(monod_benchmark, params, init)
        eq = equilibrium(monod_benchmark, params)
        assert ceil.K2 > max(eq.v_star, 1.0)
        assert ceil.K1 == float(monod_benchmark.H(ceil.K2)) / params.a
        assert ceil.K1 > max(eq.u_star, 1.0)
        assert float(monod_benchmark.G(ceil.K1)) < params.b * ceil.K2

    def test_without_initial_data(self, monod_benchmark):
        ceil = ceiling_constants(monod_benchmark, make_params())
        eq = equilibrium(monod_benchmark, make_params())
        assert ceil.K2 > eq.v_star

    def test_subcritical_raises(self, monod_subcritical):
        with pytest.raises(NotSupercritical):
            ceiling_constants(monod_subcritical, make_params())


class TestSolveSteady:
    def test_subcritical_homogeneous_trivial(self, monod_symmetric):
        prof = solve_steady(make_params(), monod_symmetric, 2.0, "homogeneous", 128)
        assert prof.trivial
        assert float(np.max(prof.u)) == 0.0

    def test_subcritical_elevated_raises(self, monod_symmetric):
        with pytest.raises(Subcritical):
            solve_steady(make_params(), monod_symmetric, 2.0, "elevated", 128)

    def test_unknown_kind_rejected(self, monod_symmetric):
        with pytest.raises(ValidationError):
            solve_steady(make_params(), monod_symmetric, 2.0, "bogus", 128)

    def test_homogeneous_below_equilibrium(self, monod_symmetric):
        params = make_params()
        prof = solve_steady(params, monod_symmetric, 2.0 * math.pi, "homogeneous", 512)
        eq = equilibrium(monod_symmetric, params)
        assert prof.residual < 1e-8
        assert np.all(prof.u[1:-1] > 0.0)
        assert np.all(prof.v[1:-1] > 0.0)
        assert float(np.max(prof.u)) < eq.u_star
        assert float(np.max(prof.v)) < eq.v_star

    def test_elevated_increasing_and_dominating(self, monod_symmetric):
        params = make_params()
        l = 2.0 * math.pi
        hom = solve_steady(params, monod_symmetric, l, "homogeneous", 512)
        ele = solve_steady(params, monod_symmetric, l, "elevated", 512)
        ceil = ceiling_constants(monod_symmetric, params)
        assert ele.residual < 1e-8
        assert ele.u[-1] == pytest.approx(ceil.K1, rel=1e-12)
        assert ele.v[-1] == pytest.approx(ceil.K2, rel=1e-12)
        assert np.all(np.diff(ele.u) > 0.0)
        assert np.all(np.diff(ele.v) > 0.0)
        assert np.all(ele.u >= hom.u - 1e-10)
        assert np.all(ele.v >= hom.v - 1e-10)

    def test_neumann_homogeneous_decreasing(self, monod_symmetric):
        params = make_params(fixed_end="neumann")
        prof = solve_steady(params, monod_symmetric, math.pi, "homogeneous", 256)
        assert prof.residual < 1e-8
        assert np.all(np.diff(prof.u) < 1e-12)

    def test_l_monotonicity(self, monod_symmetric):
        # homogeneous profiles increase with l, elevated profiles decrease
        params = make_params()
        l0 = critical_length(params, monod_symmetric)
        xs = np.linspace(0.0, 1.4 * l0, 200)
        prev_hom = prev_ele = None
        for factor in (1.5, 2.0, 3.0):
            hom = solve_steady(params, monod_symmetric, factor * l0, "homogeneous", 1024)
            ele = solve_steady(params, monod_symmetric, factor * l0, "elevated", 1024)
            hom_u = np.interp(xs, hom.x, hom.u)
            ele_u = np.interp(xs, ele.x, ele.u)
            if prev_hom is not None:
                assert np.all(hom_u >= prev_hom - 1e-4)
                assert np.all(ele_u <= prev_ele + 1e-4)
            prev_hom, prev_ele = hom_u, ele_u


class TestSemiInfinite:
    def test_profile_properties(self, monod_symmetric):
        params = make_params()
        eq = equilibrium(monod_symmetric, params)
        semi = semi_infinite_profile(params, monod_symmetric, 20.0 * math.pi, 2048)
        assert semi.u[0] == 0.0 and semi.v[0] == 0.0
        assert np.all(np.diff(semi.u) > -1e-12)
        assert abs(semi.u[-1] - eq.u_star) < 5e-2
        assert abs(semi.v[-1] - eq.v_star) < 5e-2
        assert semi.convergence_estimate < 1e-3

    def test_sandwich_ordering(self, monod_symmetric):
        params = make_params()
        l_big = 20.0 * math.pi
        semi = semi_infinite_profile(params, monod_symmetric, l_big, 2048)
        hom = solve_steady(params, monod_symmetric, l_big, "homogeneous", 2048)
        ele = solve_steady(params, monod_symmetric, l_big, "elevated", 2048)
        k = len(semi.x)
        assert np.all(ele.u[:k] >= semi.u - 1e-10)
        assert np.all(semi.u >= hom.u[:k] - 1e-10)
        # strictly above any shorter-interval homogeneous profile
        hom_half = solve_steady(params, monod_symmetric, l_big / 2.0, "homogeneous", 1024)
        assert np.all(semi.u[1:-1] >= hom_half.u[1:-1])

    def test_preconditions(self, monod_symmetric, monod_subcritical):
        with pytest.raises(ValidationError):
            semi_infinite_profile(make_params(fixed_end="neumann"), monod_symmetric, 100.0)
        with pytest.raises(NotSupercritical):
            semi_infinite_profile(make_params(), monod_subcritical, 1000.0)
        with pytest.raises(ValidationError):
            semi_infinite_profile(make_params(), monod_symmetric, 2.0)
