import numpy as np
import pytest

from sherlab import (
    NormReport,
    SpectralField,
    dissipation_functional,
    h1_weighted_norm,
    monotonicity_audit,
    smoothing_ladder,
    tangential_radius_fit,
)


def _single_mode(grid, k, prof, coeff=-0.5j):
    u = SpectralField.zero(grid)
    u.modes[k] = coeff * prof
    return u


def test_h1_norm_single_mode_oracle(grid):
    # u = sin(k x) g(z): squared norm is
    # (L_x / 2) (1 + k^2) (int g^2 + int <z>^2 g'^2)
    g = grid
    prof = g.z * np.exp(-g.z)
    k = 3
    u = _single_mode(g, k, prof)
    w2 = 1.0 + g.z**2
    expected = (g.L_x / 2.0) * (1 + k**2) * (
        g.integrate(prof**2) + g.integrate(w2 * g.dz(prof) ** 2)
    )
    assert h1_weighted_norm(u) ** 2 == pytest.approx(expected, rel=1e-12)


def test_dissipation_single_mode_oracle(grid):
    g = grid
    prof = g.z * np.exp(-g.z)
    k = 2
    u = _single_mode(g, k, prof)
    w2 = 1.0 + g.z**2
    expected = (g.L_x / 2.0) * (1 + k**2) * (
        g.integrate(w2 * g.dzz(prof) ** 2) + k**2 * g.integrate(w2 * prof**2)
    )
    assert dissipation_functional(u) == pytest.approx(expected, rel=1e-12)


def test_norms_are_homogeneous(grid, rng):
    u = SpectralField.zero(grid)
    u.modes[1] = (rng.standard_normal(grid.N_z) + 1j * rng.standard_normal(grid.N_z))
    u.modes[:, 0] = u.modes[:, -1] = 0.0
    c = 3.7
    v = SpectralField(c * u.modes, grid)
    assert h1_weighted_norm(v) == pytest.approx(c * h1_weighted_norm(u), rel=1e-12)
    assert dissipation_functional(v) == pytest.approx(
        c**2 * dissipation_functional(u), rel=1e-12
    )


def test_norm_report_validation():
    with pytest.raises(ValueError):
        NormReport(np.array([0.0, 0.0]), {"h1_norm": np.zeros(2)})
    with pytest.raises(ValueError):
        NormReport(np.array([0.0, 1.0]), {"h1_norm": np.array([1.0, np.nan])})
    rep = NormReport(np.array([0.0, 1.0]), {"h1_norm": np.ones(2)})
    assert rep.header == ["t", "h1_norm"]
    assert len(rep) == 2


def test_monotonicity_audit_passes_on_budgeted_series():
    t = np.linspace(0.0, 1.0, 11)
    h1 = 0.01 * np.exp(-t)
    diss = 0.01**2 * np.exp(-2 * t)  # more than the energy drop needs
    rep = NormReport(t, {"h1_norm": h1, "dissipation": diss})
    passed, slack = monotonicity_audit(rep, 0.01)
    assert passed
    assert slack >= 0.0


def test_monotonicity_audit_fails_above_budget():
    t = np.linspace(0.0, 1.0, 11)
    h1 = 0.02 * np.ones_like(t)
    rep = NormReport(t, {"h1_norm": h1, "dissipation": np.zeros_like(t)})
    passed, slack = monotonicity_audit(rep, 0.01)
    assert not passed
    assert slack < 0.0


def test_smoothing_ladder_steady_field(grid):
    # a time-independent history: all time-derivative entries vanish and
    # spatial entries are the t_max-weighted derivative norms
    prof = grid.z * np.exp(-(grid.z**2) / 2.0)
    u = _single_mode(grid, 1, prof)
    times = np.linspace(0.1, 0.7, 7)
    entries, c0 = smoothing_ladder([u.copy() for _ in times], times, cap=3)
    by_alpha = {e.alpha: e.value for e in entries}
    base = h1_weighted_norm(u)
    assert by_alpha[(0, 0, 0)] == pytest.approx(base, rel=1e-12)
    # d/dx of a k = 1 mode has the same magnitude profile
    assert by_alpha[(0, 1, 0)] == pytest.approx(0.7 * base, rel=1e-12)
    assert by_alpha[(1, 0, 0)] == pytest.approx(0.0, abs=1e-9 * base)
    assert c0 > 0.0
    assert np.isfinite(c0)


def test_smoothing_ladder_needs_uniform_times(grid):
    prof = grid.z * np.exp(-(grid.z**2) / 2.0)
    u = _single_mode(grid, 1, prof)
    fields = [u.copy() for _ in range(6)]
    with pytest.raises(ValueError):
        smoothing_ladder(fields, np.array([0.1, 0.2, 0.31, 0.4, 0.5, 0.6]))
    with pytest.raises(ValueError):
        smoothing_ladder(fields[:3], np.array([0.1, 0.2, 0.3]))


def test_tangential_radius_fit_synthetic_spectrum(grid):
    # |u_k| proportional to e^{-0.7 k}: fitted radius 0.7
    prof = grid.z * np.exp(-(grid.z**2) / 2.0)
    u = SpectralField.zero(grid)
    for k in range(1, grid.N_x // 2 + 1):
        u.modes[k] = np.exp(-0.7 * k) * prof
    est = tangential_radius_fit(u)
    assert not est.indeterminate
    assert est.radius == pytest.approx(0.7, rel=1e-6)


def test_tangential_radius_fit_indeterminate(grid):
    prof = grid.z * np.exp(-(grid.z**2) / 2.0)
    u = SpectralField.zero(grid)
    u.modes[1] = prof
    est = tangential_radius_fit(u)
    assert est.indeterminate
    assert est.n_active == 1
    assert np.isnan(est.radius)
