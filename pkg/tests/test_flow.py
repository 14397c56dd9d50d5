"""Bessel/heat machinery and the reduced phase flows."""

import csv
import json

import numpy as np
import pytest
import scipy.special
from mpmath import mp

from acfront.core import PhaseSequence, d2, d_plus
from acfront.errors import FlatnessViolated, OutOfRange, OverflowGuard
from acfront.flow import (FlowParams, bessel_bounds_report, bessel_i,
                          bessel_i_unscaled, decay_report, gradient_lde_solve,
                          heat_kernel, heat_solve, kernel_to_csv, mcf_rhs,
                          mcf_solve, report_to_ndjson, trajectory_to_csv,
                          v_gradient_report, v_rhs, v_solve)
from acfront.harness import splitmix64_uniform

C_REF = -0.279590404792108
D_REF = -0.146568639309


def bessel_series_oracle(k: int, t: float) -> float:
    """High-precision power series for e^{-t} I_k(t), independent of the
    Miller recurrence under test."""
    mp.dps = 40
    x = mp.mpf(t) / 2
    total = mp.mpf(0)
    term_floor = mp.mpf(10) ** (-mp.dps - 5)
    for m in range(0, 2000):
        term = x ** (2 * m + k) / (mp.factorial(m) * mp.factorial(m + k))
        total += term
        if m > 4 and term < term_floor * total:
            break
    return float(total * mp.e ** (-mp.mpf(t)))


def test_bessel_matches_series_oracle():
    for t in (0.5, 2.0, 10.0, 100.0):
        for k in (0, 1, 3, 10):
            got = bessel_i(k, t)
            want = bessel_series_oracle(k, t)
            assert abs(got - want) <= 1e-13 * max(1.0, abs(want))


def test_bessel_matches_scipy_scaled():
    ks = np.arange(0, 40)
    for t in (1.0, 7.0, 50.0, 300.0):
        got = bessel_i(ks, t)
        want = scipy.special.ive(ks, t)
        assert np.max(np.abs(got - want)) < 1e-12


def test_bessel_recurrence_identity_by_central_difference():
    # I_{k-1}(t) + I_{k+1}(t) = 2 I_k'(t) at t=2, k=3
    eps = 1e-4
    lhs = bessel_i_unscaled(2, 2.0) + bessel_i_unscaled(4, 2.0)
    rhs = (bessel_i_unscaled(3, 2.0 + eps) - bessel_i_unscaled(3, 2.0 - eps)) / eps
    assert abs(lhs - rhs) < 1e-8


def test_bessel_guards():
    with pytest.raises(OutOfRange):
        bessel_i(-1, 2.0)
    with pytest.raises(OutOfRange):
        bessel_i(0, -1.0)
    with pytest.raises(OverflowGuard):
        bessel_i_unscaled(0, 1000.0)


def test_kernel_mass_exact():
    for t in (0.0, 0.5, 1.0, 5.0, 20.0, 100.0):
        assert abs(heat_kernel(t).mass() - 1.0) < 1e-12


def test_kernel_symmetric_and_positive():
    table = heat_kernel(7.0)
    assert np.array_equal(table.values, table.values[::-1])
    assert np.all(table.values >= 0.0)
    assert table.k[0] == -table.kmax


def test_heat_solve_delta_reproduces_kernel():
    height = 64
    t = 3.0
    h0 = PhaseSequence(np.zeros(height))
    h0.values[10] = 1.0
    out = heat_solve(h0, t).values
    table = heat_kernel(t)
    folded = np.zeros(height)
    np.add.at(folded, np.mod(table.k + 10, height), table.values)
    assert np.max(np.abs(out - folded)) < 1e-15


def test_heat_solve_matches_euler_oracle():
    rng = np.random.default_rng(3)
    for bc in ("periodic", "reflect"):
        h0 = PhaseSequence(rng.uniform(-1.0, 1.0, size=24), boundary_j=bc)
        t_end, dt = 0.5, 1e-5
        vals = h0.values.copy()
        seq = PhaseSequence(vals, boundary_j=bc)
        for _ in range(int(round(t_end / dt))):
            seq = seq.replace(seq.values + dt * d2(seq))
        want = seq.values
        got = heat_solve(h0, t_end).values
        assert np.max(np.abs(got - want)) < 1e-4


def test_heat_solve_conserves_mass_and_contracts():
    rng = np.random.default_rng(11)
    h0 = PhaseSequence(rng.uniform(-2.0, 2.0, size=48))
    h5 = heat_solve(h0, 5.0)
    assert np.sum(h5.values) == pytest.approx(np.sum(h0.values), abs=1e-12)
    assert np.max(np.abs(h5.values)) <= np.max(np.abs(h0.values))


def test_gradient_norm_decay_is_monotone_exactly():
    # non-strict monotonicity of sup|d+ h(t)| with zero tolerance
    ts = [0.0, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0]
    for seed in range(20):
        h0 = PhaseSequence(2.0 * splitmix64_uniform(seed, 32) - 1.0)
        norms = [np.max(np.abs(d_plus(heat_solve(h0, t)))) for t in ts]
        assert all(b <= a for a, b in zip(norms, norms[1:]))


def test_decay_report_slopes_on_step_data():
    n = 2048
    vals = np.where(np.arange(n) < n // 2, 0.0, 4.0)
    vals += 0.5 * (splitmix64_uniform(2, n) - 0.5)
    h0 = PhaseSequence(vals, boundary_j="reflect")
    rep = decay_report(h0, np.geomspace(10.0, 1000.0, 13))
    assert abs(rep["slope_first"] + 0.5) <= 0.1
    assert abs(rep["slope_second"] + 1.0) <= 0.1
    assert rep["monotone_bound_holds"]
    assert rep["K_first"] < 10.0 and rep["K_second"] < 10.0


def test_bessel_bounds_report_structure():
    rep = bessel_bounds_report([1.0, 5.0, 20.0, 100.0])
    assert rep["all_order_monotone"]
    assert rep["single_sign_change"]
    assert rep["max_telescope_error"] < 1e-10
    assert np.isfinite(rep["first_sum_bound"])
    assert np.isfinite(rep["second_sum_bound"])


def test_v_solve_cole_hopf_matches_euler():
    # flat phases: Euler truncation at dt=1e-3 stays below 1e-4
    p = FlowParams(c=C_REF, d=D_REF, dt=1e-3)
    vals = 0.25 * (2.0 * splitmix64_uniform(21, 32) - 1.0)
    V0 = PhaseSequence(vals)
    grid = [0.0, 1.0, 2.0]
    exact = v_solve(V0, p, t_grid=grid)
    euler = v_solve(V0, p, t_grid=grid, method="euler")
    assert np.max(np.abs(exact.values - euler.values)) < 1e-4


def test_v_solve_translation_invariance_bitwise():
    # with anchor-zero dyadic data a constant shift commutes with the solve
    # down to the last bit
    p = FlowParams(c=C_REF, d=D_REF)
    vals = np.round((2.0 * splitmix64_uniform(4, 24) - 1.0) * 1024.0) / 1024.0
    vals[0] = 0.0
    V0 = PhaseSequence(vals)
    for shift in (3.0, -7.25, 1234.5):
        shifted = PhaseSequence(vals + shift)
        a = v_solve(shifted, p, t_grid=[0.5, 2.0]).values
        b = v_solve(V0, p, t_grid=[0.5, 2.0]).values + shift
        assert np.array_equal(a, b)


def test_v_solve_linear_heat_variant():
    p = FlowParams(c=0.5, d=0.0)
    assert p.variant == "linear_heat"
    j = np.arange(16)
    V0 = PhaseSequence(np.sin(2.0 * np.pi * j / 16.0))
    traj = v_solve(V0, p, t_grid=[0.0, 2.0])
    want = heat_solve(V0, 2.0).values + 0.5 * 2.0
    assert np.max(np.abs(traj.values[-1] - want)) < 1e-14


def test_v_solve_overflow_guard():
    p = FlowParams(c=C_REF, d=D_REF)
    V0 = PhaseSequence(np.array([0.0, 5000.0, 0.0, 5000.0]))
    with pytest.raises(OverflowGuard):
        v_solve(V0, p, t_grid=[1.0])


def test_v_rhs_flat_data_reduces_to_drift():
    p = FlowParams(c=C_REF, d=D_REF)
    V0 = PhaseSequence(np.full(8, 2.5))
    assert np.max(np.abs(v_rhs(V0, p) - p.c)) < 1e-15


def test_v_gradient_report_decays():
    p = FlowParams(c=C_REF, d=D_REF)
    j = np.arange(32)
    V0 = PhaseSequence(np.sin(2.0 * np.pi * j / 8.0))
    rep = v_gradient_report(v_solve(V0, p, t_grid=np.linspace(0.0, 30.0, 31)))
    assert rep["monotone_bound_holds"]
    assert rep["d_plus_norm"][-1] < 1e-6


def test_mcf_forms_agree():
    p = FlowParams(c=C_REF, d=D_REF)
    rng = np.random.default_rng(9)
    G = PhaseSequence(0.05 * rng.standard_normal(16))
    lhs = mcf_rhs(G, p, form="2d")
    rhs = mcf_rhs(G, p, form="anisotropic", A=2.0 * p.d - p.c)
    assert np.max(np.abs(lhs - rhs)) < 1e-14


def test_mcf_matches_gradient_lde():
    p = FlowParams(c=C_REF, d=D_REF)
    j = np.arange(24)
    G0 = PhaseSequence(0.05 * np.sin(2.0 * np.pi * j / 24.0))
    grid = np.linspace(0.0, 10.0, 6)
    mcf = mcf_solve(G0, p, grid)
    lde = gradient_lde_solve(PhaseSequence(d_plus(G0)), p, grid)
    for k in range(grid.size):
        got = d_plus(PhaseSequence(mcf.values[k]))
        assert np.max(np.abs(got - lde.values[k])) < 1e-12


def test_mcf_flatness_guard():
    p = FlowParams(c=C_REF, d=D_REF)
    steep = PhaseSequence(np.array([0.0, 1.0, 0.0, 1.0]))
    with pytest.raises(FlatnessViolated):
        mcf_solve(steep, p, [1.0])
    with pytest.raises(FlatnessViolated):
        gradient_lde_solve(PhaseSequence(np.array([0.0, 1.0])), p, [1.0])


def test_trajectory_at_and_final():
    p = FlowParams(c=C_REF, d=D_REF)
    V0 = PhaseSequence(np.zeros(4))
    traj = v_solve(V0, p, t_grid=[0.0, 1.0, 2.0])
    assert np.array_equal(traj.at(1.0).values, traj.values[1])
    assert np.array_equal(traj.final().values, traj.at(2.0).values)
    with pytest.raises(OutOfRange):
        traj.at(1.5)


def test_csv_and_ndjson_exports(tmp_path):
    table = heat_kernel(1.0)
    kpath = tmp_path / "kernel.csv"
    kernel_to_csv(table, str(kpath))
    with open(kpath, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k", "value"]
    assert len(rows) == 1 + table.values.size
    k_col = np.array([int(r[0]) for r in rows[1:]])
    v_col = np.array([float(r[1]) for r in rows[1:]])
    assert np.array_equal(k_col, table.k)
    assert np.array_equal(v_col, table.values)

    p = FlowParams(c=C_REF, d=D_REF)
    traj = v_solve(PhaseSequence(np.zeros(3)), p, t_grid=[0.0, 1.0])
    tpath = tmp_path / "traj.csv"
    trajectory_to_csv(traj, str(tpath))
    with open(tpath, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "j", "value"]
    assert len(rows) == 1 + 2 * 3

    rep = {"verdict": "pass", "value": 1.0}
    npath = tmp_path / "rep.ndjson"
    report_to_ndjson(rep, str(npath))
    with open(npath) as fh:
        assert json.loads(fh.readline()) == rep
