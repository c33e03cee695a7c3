import math

import mpmath as mp
import numpy as np
import pytest

from r2ch import diagnostics as dg
from r2ch.mesh import PeriodicGrid
from r2ch.scenarios import (
    KINDS,
    PRESETS,
    ScenarioSpec,
    constant_init,
    dam_break_init,
    periodic_distance,
    periodic_peakon,
    piecewise_sinh_init,
    piecewise_sinh_value,
    preset,
    single_peakon_init,
    three_peakon_init,
    two_peakon_init,
)

# values frozen from 40-digit mpmath evaluations of the closed forms
RHO_DAM_AT_0 = 1.199335989249911634  # 1 + 2 tanh(0.1)
PEAKON_TROUGH = 1.223609282007188652e-6  # 2 / cosh(15)
EXP_M1 = 0.36787944117144232  # e^-1
TWO_PEAKON_X1 = 0.99995460007023751  # 1 - e^-10
SINH_RIGHT_LIMIT = 0.48477181457010729  # sinh(-1/4) / sinh(-1/2)


# ---- dam break


def test_dam_break_values():
    g = PeriodicGrid(-6.0, 6.0, 200)
    s = dam_break_init(0.1, g)
    assert not s.u.any() and not s.m.any()
    assert abs(g.x[100]) < 1e-14
    assert s.rho[100] == pytest.approx(RHO_DAM_AT_0, rel=4e-16)
    assert np.allclose(dam_break_init(0.0, g).rho, 1.0, rtol=0, atol=4e-16)


# ---- periodic cosh peakon


def test_periodic_peakon_values():
    assert periodic_peakon(2.0, -5.0, 30.0, -5.0) == pytest.approx(PEAKON_TROUGH, rel=1e-15)
    assert periodic_peakon(2.0, 0.0, 30.0, 15.0) == pytest.approx(2.0, rel=1e-15)
    assert periodic_peakon(2.0, 0.0, 30.0, -15.0) == pytest.approx(2.0, rel=1e-15)
    x = np.linspace(0, 30, 17)
    assert np.allclose(periodic_peakon(1.0, -3.0, 30.0, x), periodic_peakon(1.0, -3.0, 30.0, x + 30.0),
                       rtol=1e-13, atol=0)
    with pytest.raises(ValueError):
        periodic_peakon(1.0, 0.0, 0.0, 1.0)


def test_three_peakon_matches_extended_precision():
    g = PeriodicGrid(0.0, 30.0, 2048)
    s = three_peakon_init(g)
    assert not s.rho.any()
    with mp.workdps(40):
        L = mp.mpf(30)
        for i in range(0, 2048, 97):
            x = mp.mpf(30) * i / 2048
            ref = mp.mpf(0)
            for c, xc in ((2, -5), (1, -3), (mp.mpf("0.8"), -1)):
                d = x - xc
                d = d - L * mp.floor((d + L / 2) / L)
                ref += c / mp.cosh(L / 2) * mp.cosh(d)
            assert s.u[i] == pytest.approx(float(ref), rel=1e-14)


# ---- exponential peakons


def test_periodic_distance():
    assert periodic_distance(19.0, 1.0, 20.0) == pytest.approx(2.0)
    assert periodic_distance(1.0, 19.0, 20.0) == pytest.approx(2.0)


def test_single_peakon_values():
    g = PeriodicGrid(0.0, 20.0, 800)
    s = single_peakon_init(10.0, g)
    assert s.u[400] == 1.0
    assert s.u[440] == pytest.approx(EXP_M1, rel=1e-14)
    assert np.array_equal(s.rho, np.full(800, 0.5))
    # continuous across the seam
    assert s.u[0] == pytest.approx(math.exp(-10.0), rel=1e-14)


def test_two_peakon_values_and_antisymmetry():
    g = PeriodicGrid(-20.0, 20.0, 800)
    s = two_peakon_init(1.0, -1.0, -5.0, 5.0, g)
    assert s.u[300] == pytest.approx(TWO_PEAKON_X1, rel=1e-15)
    i = np.arange(1, 800)
    assert np.allclose(s.u[i], -s.u[800 - i], rtol=0, atol=1e-14)
    assert np.array_equal(s.rho, np.full(800, 0.5))


# ---- piecewise sinh


def test_piecewise_sinh_values():
    assert piecewise_sinh_value(0.0) == 0.0
    assert piecewise_sinh_value(0.25) == pytest.approx(0.5, rel=1e-15)
    assert piecewise_sinh_value(0.25 + 1e-15) == pytest.approx(SINH_RIGHT_LIMIT, rel=1e-13)
    assert piecewise_sinh_value(0.75) == pytest.approx(-SINH_RIGHT_LIMIT, rel=1e-13)
    assert piecewise_sinh_value(0.75 + 1e-15) == pytest.approx(-0.5, rel=1e-13)
    with pytest.raises(ValueError):
        piecewise_sinh_value(1.0)


def test_piecewise_sinh_grid_uses_closed_branch_at_quarter():
    g = PeriodicGrid(0.0, 1.0, 500)
    s = piecewise_sinh_init(g)
    assert s.u[0] == 0.0
    assert s.u[125] == pytest.approx(0.5, rel=1e-14)
    assert s.u[375] == pytest.approx(-SINH_RIGHT_LIMIT, rel=1e-13)
    assert np.array_equal(s.rho, np.full(500, 1.5))
    with pytest.raises(ValueError):
        piecewise_sinh_init(PeriodicGrid(0.0, 2.0, 10))


# ---- catalog-wide properties


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_every_preset_builds_consistent_state(name):
    p = PRESETS[name]
    s = p.initial_state()
    assert s.grid == p.grid
    assert s.helmholtz_defect() == 0.0
    assert np.all(np.isfinite(s.u)) and np.all(np.isfinite(s.rho))
    assert p.N * p.solver.tau == pytest.approx(p.t_end, rel=1e-12)


@pytest.mark.parametrize("name", ["smooth-I", "smooth-II-table5", "three-peakon", "single-peakon-I", "sinh-I",
                                  "two-peakon-III", "zero"])
def test_restriction_consistency(name):
    spec = PRESETS[name].scenario
    M = 2 * (PRESETS[name].M // 2)
    fine = spec.initial_state(spec.grid(M))
    coarse = spec.initial_state(spec.grid(M // 2))
    assert np.array_equal(fine.u[::2], coarse.u)
    assert np.array_equal(fine.rho[::2], coarse.rho)


@pytest.mark.parametrize("name", ["two-peakon-I-H", "two-peakon-I", "sinh-I-H", "sinh-I-coarse"])
def test_symmetric_data_has_zero_momentum_and_H(name):
    p = PRESETS[name]
    s = p.initial_state()
    ulp = np.finfo(float).eps
    tol = s.grid.M * ulp * (1 + np.max(np.abs(s.u))) ** 3
    assert abs(dg.hamiltonian_h(s, p.scenario.params)) <= tol
    if p.scenario.kind == "two_peakon":
        assert abs(dg.momentum_total(s, p.scenario.params)) <= tol


def test_sinh_jump_nodes_break_symmetry():
    # nodes on x = 1/4 and 3/4 take the closed branch of each printed interval,
    # so the data stop being odd about x = 1/2 once the grid hits the jumps
    g = PeriodicGrid(0.0, 1.0, 500)
    s = piecewise_sinh_init(g)
    assert s.u[125] != pytest.approx(-s.u[375])
    assert abs(dg.hamiltonian_h(s, preset("sinh-I").scenario.params)) > 1.0


def test_preset_examples():
    p = preset("smooth-I-table5")
    sc = p.scenario
    assert (sc.kind, sc.domain, sc.options["a"]) == ("dam_break", (-6.0, 6.0), 0.1)
    assert (sc.params.A, sc.params.mu, sc.params.Omega, sc.params.sigma) == (0, 0, 0, 1)
    assert p.grid.h == pytest.approx(0.06) and p.solver.tau == 0.01 and p.t_end == 10.0
    p4 = preset("smooth-IV")
    assert p4.scenario.domain == pytest.approx((-12 * math.pi, 12 * math.pi))
    assert (p4.scenario.options["a"], p4.scenario.params.A, p4.scenario.params.mu) == (4.0, 1.0, 1.0)
    assert p4.scenario.params.Omega == 73e-6
    p2 = preset("nonsmooth-II")
    assert (p2.scenario.params.A, p2.scenario.params.mu, p2.scenario.params.Omega) == (0, 0, 0.1)
    sp = preset("single-peakon-I")
    assert sp.grid.h == pytest.approx(0.025) and sp.solver.tau == 0.0005
    assert sp.solver.viscosity_enabled and sp.solver.epsilon == 1e-5
    with pytest.raises(KeyError, match="unknown preset"):
        preset("smooth-V")


def test_scenario_spec_validation():
    with pytest.raises(ValueError):
        ScenarioSpec("tsunami", (0.0, 1.0))
    with pytest.raises(ValueError):
        ScenarioSpec("constant", (1.0, 0.0))
    assert set(KINDS) >= {"dam_break", "three_peakon_ch", "single_peakon", "piecewise_sinh", "two_peakon"}


def test_constant_init():
    s = constant_init(PeriodicGrid(0, 1, 8), 2.0, 0.5)
    assert np.array_equal(s.u, np.full(8, 2.0)) and np.array_equal(s.m, np.full(8, 2.0))
