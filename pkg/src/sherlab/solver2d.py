"""Semi-implicit time integration of the 2D boundary-layer system.

The prognostic variable is the tangential velocity u; the vertical velocity
w and magnetic component f are recomputed from u every step.  Vertical
diffusion and the nonlocal magnetic term are advanced implicitly through a
coupled per-mode block solve of the pair (u_k, f_k); advection is explicit
(second-order extrapolation after a backward-Euler first step).
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .fields import SpectralField, compute_w, solve_magnetic
from .grid import HalfStripGrid, make_grid
from .norms import (
    NormReport,
    dissipation_functional,
    h1_weighted_norm,
)
from .fields import dissipation_residual


class StepRejected(RuntimeError):
    """The implicit solve produced non-finite values; state left unchanged."""

    def __init__(self, t):
        super().__init__(f"step rejected at t = {t}: non-finite field values")
        self.t = t


_PROFILES = {
    "zgauss": lambda z: z * np.exp(-(z**2) / 2.0),
    "zexp": lambda z: z * np.exp(-z),
    "eigen": None,  # sin(pi z / Z_max), filled per grid
}


@dataclass
class InitialDataSpec:
    """Initial-data recipe for the 2D runs.

    ``modes`` lists the tangential wavenumber indices seeded with the
    vertical ``profile``; ``amplitude`` either multiplies the raw profile
    or, with ``normalize`` set, becomes the exact weighted-H1 norm of the
    result.  ``kind`` "random" draws seeded complex coefficients instead of
    the fixed sin(kx) phases.
    """

    amplitude: float = 0.01
    modes: tuple = (1,)
    profile: str = "zgauss"
    kind: str = "deterministic"
    seed: int = 0
    normalize: bool = False


@dataclass
class Scenario2D:
    """Complete description of a 2D experiment."""

    L_x: float = 2.0 * np.pi
    N_x: int = 64
    Z_max: float = 20.0
    N_z: int = 201
    stretch: float = 0.0
    initial: InitialDataSpec = field(default_factory=InitialDataSpec)
    T_final: float = 1.0
    dt: float = 1e-3
    cadence: int = 10
    snapshot_cadence: int = 0
    eps0: float = 0.01
    scheme: str = "sbdf2"
    seed: int = 0

    def __post_init__(self):
        if self.initial.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if self.T_final < 0:
            raise ValueError("T_final must be non-negative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")


@dataclass
class State2D:
    """Solver state: the field, plus one step of history for restarts."""

    t: float
    u: SpectralField
    dt: float
    step_index: int
    u_prev: np.ndarray | None = None
    adv_prev: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)


def make_initial_data(spec: InitialDataSpec, grid: HalfStripGrid) -> SpectralField:
    """Build compatible initial data (vanishing at z = 0 and z = Z_max)."""
    z = grid.z
    if spec.profile == "eigen":
        prof = np.sin(np.pi * z / grid.Z_max)
    elif spec.profile in _PROFILES:
        prof = _PROFILES[spec.profile](z)
    else:
        raise ValueError(f"unknown vertical profile {spec.profile!r}")
    if prof[0] != 0.0:
        raise ValueError("vertical profile must vanish at z = 0")

    u = SpectralField.zero(grid)
    n_k = grid.N_x // 2 + 1
    if spec.kind == "random":
        rng = np.random.default_rng(spec.seed)
        envelopes = np.stack([z**j * np.exp(-(z**2) / 2.0) for j in (1, 2, 3)])
        for k in spec.modes:
            if not 1 <= k < n_k:
                raise ValueError(f"mode index {k} out of range")
            c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            u.modes[k] = c @ envelopes
    elif spec.kind == "deterministic":
        # sin(kx) * profile: coefficient at +k is -i/2
        for k in spec.modes:
            if not 1 <= k < n_k:
                raise ValueError(f"mode index {k} out of range")
            u.modes[k] = -0.5j * prof
    else:
        raise ValueError(f"unknown initial-data kind {spec.kind!r}")

    u.modes[..., 0] = 0.0
    u.modes[..., -1] = 0.0
    if spec.normalize:
        cur = h1_weighted_norm(u)
        u.modes *= spec.amplitude / cur if cur > 0 else 0.0
    else:
        u.modes *= spec.amplitude
    return u


def _dealias_mask(grid: HalfStripGrid) -> np.ndarray:
    k_idx = np.arange(grid.N_x // 2 + 1)
    return (k_idx <= grid.N_x // 3).astype(float)


def advection_term(u: SpectralField, w: SpectralField) -> SpectralField:
    """Dealiased pseudo-spectral u du/dx + w du/dz."""
    g = u.grid
    u._check_same_grid(w)
    mask = _dealias_mask(g)[:, None]
    um = u.modes * mask
    wm = w.modes * mask
    u_phys = np.fft.irfft(um * g.N_x, n=g.N_x, axis=0)
    ux_phys = np.fft.irfft(1j * g.kx[:, None] * um * g.N_x, n=g.N_x, axis=0)
    uz_phys = g.dz(u_phys)
    w_phys = np.fft.irfft(wm * g.N_x, n=g.N_x, axis=0)
    adv = u_phys * ux_phys + w_phys * uz_phys
    out = np.fft.rfft(adv, axis=0) / g.N_x * mask
    out[..., 0] = 0.0
    return SpectralField(out, g)


class Stepper2D:
    """Factorized IMEX stepper for a fixed grid and step size."""

    def __init__(
        self,
        grid: HalfStripGrid,
        dt: float,
        scheme: str = "sbdf2",
        advection: bool = True,
        forcing=None,
    ):
        if scheme not in ("sbdf2", "be"):
            raise ValueError("scheme must be 'sbdf2' or 'be'")
        self.grid = grid
        self.dt = dt
        self.scheme = scheme
        self.advection = advection
        self.forcing = forcing
        self._n = grid.N_z - 2
        self._lu_be = self._factor(1.0 / dt)
        self._lu_bdf2 = self._factor(1.5 / dt) if scheme == "sbdf2" else None

    def _factor(self, a: float):
        g = self.grid
        sub, dia, sup = g.fv_laplacian()
        n = self._n
        lap = sp.diags([sub[1:], dia, sup[:-1]], [-1, 0, 1], format="csc")
        eye = sp.identity(n, format="csc")
        blocks = []
        for k in g.kx:
            mk = sp.bmat(
                [[a * eye - lap, -1j * k * eye], [1j * k * eye, lap]],
                format="csc",
            )
            blocks.append(mk)
        return splu(sp.block_diag(blocks, format="csc"))

    def _implicit_solve(self, lu, rhs_modes: np.ndarray) -> tuple:
        """Solve the coupled (u, f) systems; rhs_modes holds the u-row RHS."""
        g = self.grid
        n = self._n
        n_k = g.N_x // 2 + 1
        big = np.zeros(2 * n * n_k, dtype=complex)
        for j in range(n_k):
            big[2 * n * j : 2 * n * j + n] = rhs_modes[j, 1:-1]
        sol = lu.solve(big)
        u_new = np.zeros_like(rhs_modes)
        f_new = np.zeros_like(rhs_modes)
        for j in range(n_k):
            u_new[j, 1:-1] = sol[2 * n * j : 2 * n * j + n]
            f_new[j, 1:-1] = sol[2 * n * j + n : 2 * n * (j + 1)]
        u_new[0] = u_new[0].real + 0j  # k = 0 mode of a real field is real
        f_new[0] = 0.0
        return u_new, f_new

    def _advection_modes(self, u: SpectralField) -> np.ndarray:
        if not self.advection:
            return np.zeros_like(u.modes)
        return advection_term(u, compute_w(u)).modes

    def step(self, state: State2D) -> State2D:
        g = self.grid
        dt = self.dt
        adv = self._advection_modes(state.u)
        t_new = state.t + dt
        if self.scheme == "be" or state.u_prev is None:
            rhs = state.u.modes / dt - adv
            lu = self._lu_be
        else:
            rhs = (
                (2.0 * state.u.modes - 0.5 * state.u_prev) / dt
                - (2.0 * adv - state.adv_prev)
            )
            lu = self._lu_bdf2
        if self.forcing is not None:
            rhs = rhs + self.forcing(t_new)
        u_new, _ = self._implicit_solve(lu, rhs)
        if not np.all(np.isfinite(u_new.view(float))):
            raise StepRejected(state.t)
        return State2D(
            t=t_new,
            u=SpectralField(u_new, g),
            dt=dt,
            step_index=state.step_index + 1,
            u_prev=state.u.modes.copy(),
            adv_prev=adv,
        )


def compatibility_diagnostics(state: State2D) -> tuple:
    """Wall compatibility and far-field moment diagnostics.

    Returns (max over x of |d^2 u/dz^2| at z = 0,
             per-mode |int z u_k dz| / |u_k|_{L2} for k >= 1).
    """
    g = state.u.grid
    u_phys = state.u.to_physical()
    wall = float(np.max(np.abs(g.dzz(u_phys)[:, 0])))
    m = state.u.modes
    mom = np.abs((g.z * m) @ g.quad_w)
    nrm = np.sqrt((np.abs(m) ** 2) @ g.quad_w)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(nrm > 0, mom / np.maximum(nrm, 1e-300), 0.0)
    return wall, rel[1:]


def run_scenario2d(scenario: Scenario2D, start: State2D | None = None):
    """Drive a 2D run; returns (NormReport, final state, snapshots).

    ``snapshots`` is a list of (t, SpectralField) taken every
    ``snapshot_cadence`` steps (empty when the cadence is 0).  Passing
    ``start`` resumes from a checkpointed state and reproduces the
    uninterrupted run's samples exactly.
    """
    grid = make_grid(
        L_x=scenario.L_x,
        N_x=scenario.N_x,
        Z_max=scenario.Z_max,
        N_z=scenario.N_z,
        stretch=scenario.stretch,
    )
    stepper = Stepper2D(grid, scenario.dt, scheme=scenario.scheme)
    if start is None:
        u0 = make_initial_data(scenario.initial, grid)
        state = State2D(t=0.0, u=u0, dt=scenario.dt, step_index=0)
    else:
        state = start

    n_steps = int(round(scenario.T_final / scenario.dt))
    times, h1s, diss, dres, wall_res, moments = [], [], [], [], [], []
    snapshots = []

    def record(st: State2D):
        times.append(st.t)
        h1s.append(h1_weighted_norm(st.u))
        diss.append(dissipation_functional(st.u))
        dres.append(dissipation_residual(st.u))
        wall, rel = compatibility_diagnostics(st)
        wall_res.append(wall)
        moments.append(float(np.max(rel)) if rel.size else 0.0)

    if state.step_index == 0 or state.step_index >= n_steps:
        record(state)
        if scenario.snapshot_cadence:
            snapshots.append((state.t, state.u.copy()))

    for _ in range(state.step_index, n_steps):
        state = stepper.step(state)
        if state.step_index % scenario.cadence == 0 or state.step_index == n_steps:
            record(state)
        if scenario.snapshot_cadence and state.step_index % scenario.snapshot_cadence == 0:
            snapshots.append((state.t, state.u.copy()))

    times = np.array(times)
    diss_arr = np.array(diss)
    cum = np.zeros_like(times)
    if times.size > 1:
        cum[1:] = np.cumsum(diss_arr[:-1] * np.diff(times))
    report = NormReport(
        times,
        {
            "h1_norm": np.array(h1s),
            "dissipation": diss_arr,
            "cum_dissipation": cum,
            "dissipation_residual": np.array(dres),
            "wall_compat": np.array(wall_res),
            "moment_diag": np.array(moments),
        },
    )
    return report, state, snapshots
