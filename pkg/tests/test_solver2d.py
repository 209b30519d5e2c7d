import numpy as np
import pytest

from sherlab import (
    InitialDataSpec,
    Scenario2D,
    SpectralField,
    Stepper2D,
    compute_w,
    h1_weighted_norm,
    make_grid,
    make_initial_data,
    run_scenario2d,
)
from sherlab.solver2d import State2D, advection_term


def test_deterministic_initial_data_is_sine(grid):
    spec = InitialDataSpec(amplitude=0.5, modes=(2,), profile="zgauss")
    u = make_initial_data(spec, grid)
    x = np.linspace(0.0, grid.L_x, grid.N_x, endpoint=False)
    phys = u.to_physical()
    prof = phys[np.argmax(np.sin(2 * x))]  # column at sin(2x) = 1
    assert phys[0] == pytest.approx(0.0, abs=1e-14)  # sin(0) column
    assert np.max(np.abs(prof)) > 0
    # x-dependence separates: every column is a multiple of the profile
    ref = phys[1] / np.sin(2 * x[1])
    for i in range(2, grid.N_x):
        if abs(np.sin(2 * x[i])) > 0.1:
            np.testing.assert_allclose(phys[i], np.sin(2 * x[i]) * ref, atol=1e-12)


def test_initial_data_normalization(grid):
    spec = InitialDataSpec(amplitude=0.01, modes=(1, 3), normalize=True)
    u = make_initial_data(spec, grid)
    assert h1_weighted_norm(u) == pytest.approx(0.01, rel=1e-13)


def test_initial_data_wall_values(grid):
    spec = InitialDataSpec(amplitude=1.0, modes=(1, 2), kind="random", seed=3)
    u = make_initial_data(spec, grid)
    assert np.max(np.abs(u.modes[:, 0])) == 0.0
    assert np.max(np.abs(u.modes[:, -1])) == 0.0


def test_initial_data_random_seeded(grid):
    spec = InitialDataSpec(amplitude=1.0, modes=(1,), kind="random", seed=11)
    u1 = make_initial_data(spec, grid)
    u2 = make_initial_data(spec, grid)
    np.testing.assert_array_equal(u1.modes, u2.modes)


def test_initial_data_rejects_bad_mode(grid):
    with pytest.raises(ValueError):
        make_initial_data(InitialDataSpec(modes=(0,)), grid)
    with pytest.raises(ValueError):
        make_initial_data(InitialDataSpec(modes=(grid.N_x,)), grid)
    with pytest.raises(ValueError):
        make_initial_data(InitialDataSpec(profile="bogus"), grid)


def test_advection_closed_form():
    # u = sin(x) g(z), w = -cos(x) G(z) with G = int g:
    # u u_x + w u_z = (1/2) sin(2x) (g^2 - g' G)
    g = make_grid(N_x=48, Z_max=20.0, N_z=201)
    x = np.linspace(0.0, g.L_x, g.N_x, endpoint=False)
    gz = g.z * np.exp(-g.z)
    u = SpectralField.from_physical(np.sin(x)[:, None] * gz, g)
    w = compute_w(u)
    adv = advection_term(u, w).to_physical()
    G = 1.0 - (1.0 + g.z) * np.exp(-g.z)
    expected = 0.5 * np.sin(2 * x)[:, None] * (gz**2 - g.dz(gz) * G)
    np.testing.assert_allclose(adv, expected, atol=5e-4)


def test_single_be_step_matches_dense_solve(grid):
    # one backward-Euler step of the coupled (u, f) system against a dense
    # per-mode linear solve assembled independently of the stepper
    dt = 1e-2
    spec = InitialDataSpec(amplitude=0.1, modes=(1, 2), kind="random", seed=5)
    u0 = make_initial_data(spec, grid)
    stepper = Stepper2D(grid, dt, scheme="be", advection=False)
    state = stepper.step(State2D(t=0.0, u=u0, dt=dt, step_index=0))

    sub, dia, sup = grid.fv_laplacian()
    n = dia.size
    lap = np.diag(dia) + np.diag(sub[1:], -1) + np.diag(sup[:-1], 1)
    eye = np.eye(n)
    for j, k in enumerate(grid.kx):
        block = np.block(
            [
                [eye / dt - lap, -1j * k * eye],
                [1j * k * eye, lap],
            ]
        )
        rhs = np.concatenate([u0.modes[j, 1:-1] / dt, np.zeros(n)])
        sol = np.linalg.solve(block, rhs)
        expect = sol[:n] if j > 0 else sol[:n].real
        np.testing.assert_allclose(state.u.modes[j, 1:-1], expect, atol=1e-12)


def test_linear_step_is_dissipative(grid):
    spec = InitialDataSpec(amplitude=0.1, modes=(1, 2, 3), kind="random", seed=9)
    u = make_initial_data(spec, grid)
    stepper = Stepper2D(grid, 1e-3, advection=False)
    state = State2D(t=0.0, u=u, dt=1e-3, step_index=0)
    norms = [h1_weighted_norm(state.u)]
    for _ in range(20):
        state = stepper.step(state)
        norms.append(h1_weighted_norm(state.u))
    assert all(b <= a * (1 + 1e-12) for a, b in zip(norms, norms[1:]))


def test_forced_manufactured_solution_convergence():
    # forcing chosen so u(t) = e^{-t} sin(x) z e^{-z} solves the linear
    # system exactly in space; the remaining error is the time stepping's
    g = make_grid(N_x=16, Z_max=20.0, N_z=201)
    prof = g.z * np.exp(-g.z)
    u_exact = SpectralField.zero(g)
    u_exact.modes[1] = -0.5j * prof

    sub, dia, sup = g.fv_laplacian()

    def apply_lap(v):
        inner = v[1:-1]
        out = dia * inner + 0j
        out[1:] += sub[1:] * inner[:-1]
        out[:-1] += sup[:-1] * inner[1:]
        full = np.zeros_like(v)
        full[1:-1] = out
        return full

    # discrete magnetic response of the exact mode
    lap_mat = np.diag(dia) + np.diag(sub[1:], -1) + np.diag(sup[:-1], 1)
    f_mode = np.zeros_like(prof, dtype=complex)
    f_mode[1:-1] = np.linalg.solve(lap_mat, -1j * 1.0 * u_exact.modes[1][1:-1])

    def forcing(t):
        out = np.zeros((g.N_x // 2 + 1, g.N_z), dtype=complex)
        # d_t u - lap u - ik f for the decaying exact solution
        out[1] = np.exp(-t) * (
            -u_exact.modes[1] - apply_lap(u_exact.modes[1]) - 1j * f_mode
        )
        return out

    errs = []
    for dt in (2e-2, 1e-2):
        stepper = Stepper2D(g, dt, scheme="sbdf2", advection=False, forcing=forcing)
        state = State2D(t=0.0, u=u_exact.copy(), dt=dt, step_index=0)
        n_steps = int(round(0.5 / dt))
        for _ in range(n_steps):
            state = stepper.step(state)
        err = np.max(np.abs(state.u.modes[1] - np.exp(-0.5) * u_exact.modes[1]))
        errs.append(err)
    order = np.log2(errs[0] / errs[1])
    assert order > 1.8


def test_run_scenario_report_columns():
    sc = Scenario2D(N_x=16, N_z=81, T_final=0.02, dt=1e-3, cadence=5)
    report, state, snaps = run_scenario2d(sc)
    assert report.header == [
        "t",
        "h1_norm",
        "dissipation",
        "cum_dissipation",
        "dissipation_residual",
        "wall_compat",
        "moment_diag",
    ]
    assert state.t == pytest.approx(0.02)
    assert snaps == []


def test_run_scenario_resume_matches_straight_run():
    sc_half = Scenario2D(N_x=16, N_z=81, T_final=0.05, dt=1e-3, cadence=10)
    sc_full = Scenario2D(N_x=16, N_z=81, T_final=0.1, dt=1e-3, cadence=10)
    _, mid, _ = run_scenario2d(sc_half)
    rep_resumed, end_resumed, _ = run_scenario2d(sc_full, start=mid)
    rep_full, end_full, _ = run_scenario2d(sc_full)
    np.testing.assert_array_equal(end_resumed.u.modes, end_full.u.modes)
    np.testing.assert_array_equal(
        rep_resumed.columns["h1_norm"], rep_full.columns["h1_norm"][-len(rep_resumed):]
    )


def test_scenario_validation():
    with pytest.raises(ValueError):
        Scenario2D(dt=0.0)
    with pytest.raises(ValueError):
        Scenario2D(T_final=-1.0)
    with pytest.raises(ValueError):
        Scenario2D(initial=InitialDataSpec(amplitude=-0.1))
