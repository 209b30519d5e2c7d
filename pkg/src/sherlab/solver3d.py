"""Linearized 3D evolution around 1D heat-shear flows, with analytic norms.

The shear pair (U, V) comes from the 1D heat module and must carry zero
first moment so its decay certificate holds.  The linearized fields (u, v)
evolve per tangential mode (k_x, k_y): diffusion and the magnetic coupling
are implicit (a banded block solve of the interleaved (u, f) pair, reused
from the 2D scheme), while the shear advection i(k_x U + k_y V) and the
w dU/dz, w dV/dz couplings are explicit — they inherit the shear's
(1+t)^(-3/2) smallness, so stiffness is not a concern.

Analyticity in y is monitored through the mode-weight realization of the
norm families X_rho / Y_rho / Z_rho, with the radius following
rho(t) = rho0/2 + rho0/2 (1+t)^(-1/2).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solve_banded

from .fields import SpectralField, compute_w3d, solve_magnetic
from .grid import HalfStripGrid, make_grid
from .heat1d import decay_series, fit_decay, solve_heat
from .norms import NormReport


class MomentError(ValueError):
    """Shear initial data with nonvanishing first moment."""


class WeightOverflow(RuntimeError):
    """Analytic mode weight exceeds the double-precision guard."""

    def __init__(self, rho, ky):
        super().__init__(
            f"mode weight overflow at rho = {rho}, k_y = {ky}; "
            "shrink rho or the y-band"
        )
        self.rho = rho
        self.ky = ky


@dataclass
class ShearPair:
    """Heat-shear samples with their decay certificate.

    ``U`` and ``V`` are (n_times, N_z) arrays on ``times`` (uniform step).
    ``decay_slope`` is the fitted log-log rate of the sup-norm triple.
    """

    times: np.ndarray
    U: np.ndarray
    V: np.ndarray
    eps1: float
    grid: HalfStripGrid
    decay_slope: float

    def at(self, t: float) -> tuple:
        i = int(round((t - self.times[0]) / self._dt)) if len(self.times) > 1 else 0
        i = min(max(i, 0), len(self.times) - 1)
        return self.U[i], self.V[i]

    @property
    def _dt(self) -> float:
        return self.times[1] - self.times[0]


@dataclass
class State3D:
    """3D solver state with one step of history for the extrapolation."""

    t: float
    u: SpectralField
    v: SpectralField
    dt: float
    step_index: int
    rho0: float
    prev: tuple | None = None  # (u_modes, v_modes, Nu, Nv) at the previous step


@dataclass
class Scenario3D:
    """Complete description of a 3D linearized experiment."""

    L_x: float = 2.0 * np.pi
    L_y: float = 2.0 * np.pi
    N_x: int = 16
    N_y: int = 16
    Z_max: float = 20.0
    N_z: int = 129
    rho0: float = 0.5
    eps1: float = 1e-3
    amplitude: float = 1e-2
    band: int = 5
    T_final: float = 20.0
    dt: float = 2e-3
    cadence: int = 50
    seed: int = 0


def zero_moment_profile(eps1: float):
    """The canonical zero-moment shear datum eps1 * z (3 - z^2) e^(-z^2/2)."""
    return lambda z: eps1 * z * (3.0 - z**2) * np.exp(-(z**2) / 2.0)


def make_shear(
    grid: HalfStripGrid,
    h0_U,
    h0_V,
    eps1: float,
    T: float,
    dt: float,
    moment_tol: float = 1e-8,
) -> ShearPair:
    """Run the two heat flows and certify the shear decay.

    ``h0_U`` / ``h0_V`` are callables of z (so the vanishing-moment
    hypothesis can be checked by adaptive quadrature, which on-grid rules
    cannot push to the required tolerance) or node arrays, in which case
    the grid quadrature is used.
    """
    profiles = []
    for name, h0 in (("U", h0_U), ("V", h0_V)):
        if callable(h0):
            mom, _ = quad(lambda z: z * h0(z), 0.0, grid.Z_max, limit=200)
            vals = h0(grid.z)
        else:
            vals = np.asarray(h0, dtype=float)
            mom = float((grid.z * vals) @ grid.quad_w)
        if abs(mom) > moment_tol:
            raise MomentError(
                f"shear component {name} has nonzero first moment {mom:.6e}"
            )
        profiles.append(vals)

    times = None
    evolved = []
    slope = 0.0
    for vals in profiles:
        states = solve_heat(grid, vals, T, dt, cadence=1)
        ts = np.array([s.t for s in states])
        evolved.append(np.stack([s.h for s in states]))
        if times is None:
            times = ts
        if np.any(vals != 0.0):
            dt_times, dvals = decay_series(states)
            lo, hi = 0.1 * T + 1.0, T
            if np.count_nonzero((dt_times >= lo) & (dt_times <= hi)) >= 2 and np.all(
                dvals[(dt_times >= lo) & (dt_times <= hi)] > 0
            ):
                slope = min(slope, fit_decay(dt_times, dvals, (lo, hi)))
    return ShearPair(times, evolved[0], evolved[1], eps1, grid, slope)


def rho_schedule(t: float, rho0: float) -> float:
    """Shrinking analyticity radius rho0/2 + rho0/2 (1+t)^(-1/2)."""
    if rho0 <= 0:
        raise ValueError("rho0 must be positive")
    if t < 0:
        raise ValueError("time must be non-negative")
    return 0.5 * rho0 + 0.5 * rho0 / np.sqrt(1.0 + t)


def _mode_weight(rho: float, ky: float, kind: str, guard: float = 1e280) -> float:
    """Series-summed weight sum_m L_{rho,m}^2 ky^(2m) (kind 'X') or the
    (m+1)/rho-weighted variant (kind 'Y'), with relative cutoff 1e-16."""
    term = rho * rho
    total = term if kind == "X" else term / rho
    x = (rho * abs(ky)) ** 2
    m = 0
    while True:
        m += 1
        term *= x / (m * m)
        inc = term if kind == "X" else term * (m + 1) / rho
        total += inc
        if total > guard:
            raise WeightOverflow(rho, ky)
        if inc < 1e-16 * total:
            return total


def analytic_norms(u: SpectralField, v: SpectralField, rho: float) -> tuple:
    """The (X, Y, Z) norm triple of the pair (u, v) at radius rho."""
    g = u.grid
    u._check_same_grid(v)
    ky = g.ky
    wX = np.array([_mode_weight(rho, k, "X") for k in ky])
    wY = np.array([_mode_weight(rho, k, "Y") for k in ky])
    meas = g.L_x * g.L_y
    fac = g.parseval_fac[:, None]

    X2 = Y2 = Z2 = 0.0
    for a in (u.modes, v.modes):
        az = g.dz(a)
        azz = g.dzz(a)
        p0 = (np.abs(a) ** 2) @ g.quad_w
        p1 = (np.abs(az) ** 2) @ g.quad_w
        p2 = (np.abs(azz) ** 2) @ g.quad_w
        px = g.kx[:, None] ** 2 * p0
        X2 += meas * np.sum(fac * wX[None, :] * (p0 + p1))
        Y2 += meas * np.sum(fac * wY[None, :] * (p0 + p1))
        Z2 += meas * np.sum(fac * wX[None, :] * (p1 + p2 + px))
    return float(np.sqrt(X2)), float(np.sqrt(Y2)), float(np.sqrt(Z2))


def make_analytic_data(
    grid: HalfStripGrid, rho0: float, amplitude: float, band: int
) -> tuple:
    """Band-limited y-analytic initial data on the k_x = 1 mode.

    Coefficients fall off like e^(-2 rho0 |k_y|) — twice the initial
    radius, so the X_{rho0} norm is comfortably finite.
    """
    prof = grid.z * np.exp(-(grid.z**2) / 2.0)
    prof[0] = prof[-1] = 0.0
    u = SpectralField.zero(grid)
    v = SpectralField.zero(grid)
    ky_idx = np.fft.fftfreq(grid.N_y, 1.0 / grid.N_y).astype(int)
    for j, m in enumerate(ky_idx):
        if abs(m) > band:
            continue
        c = amplitude * np.exp(-2.0 * rho0 * abs(m))
        u.modes[1, j] = -0.5j * c * prof
        v.modes[1, j] = 0.5 * c * prof
    return u, v


class Stepper3D:
    """IMEX stepper for the linearized system around a frozen-in-time-grid shear."""

    def __init__(
        self,
        grid: HalfStripGrid,
        dt: float,
        shear: ShearPair,
        scheme: str = "sbdf2",
        diffusion: bool = True,
        coupling: bool = True,
        advection: bool = True,
    ):
        self.grid = grid
        self.dt = dt
        self.shear = shear
        self.scheme = scheme
        self.diffusion = diffusion
        self.coupling = coupling
        self.advection = advection
        self._n = grid.N_z - 2
        self._ab_be = [self._banded(k, 1.0 / dt) for k in grid.kx]
        self._ab_bdf2 = (
            [self._banded(k, 1.5 / dt) for k in grid.kx] if scheme == "sbdf2" else None
        )

    def _banded(self, k: float, a: float) -> np.ndarray:
        """Banded storage of the interleaved (u, f) block for one k_x."""
        sub, dia, sup = self.grid.fv_laplacian()
        n = self._n
        d = 1.0 if self.diffusion else 0.0
        c = k if self.coupling else 0.0
        ab = np.zeros((5, 2 * n), dtype=complex)
        idx = np.arange(n)
        # u-rows sit at 2i, f-rows at 2i+1
        ab[2, 2 * idx] = a - d * dia
        ab[2, 2 * idx + 1] = dia
        ab[1, 2 * idx + 1] = -1j * c  # A[2i, 2i+1]
        ab[3, 2 * idx] = 1j * k  # A[2i+1, 2i]
        ab[0, 2 * idx[:-1] + 2] = -d * sup[:-1]  # A[2i, 2i+2]
        ab[0, 2 * idx[:-1] + 3] = sup[:-1]  # A[2i+1, 2i+3]
        ab[4, 2 * idx[1:] - 2] = -d * sub[1:]  # A[2i, 2i-2]
        ab[4, 2 * idx[1:] - 1] = sub[1:]  # A[2i+1, 2i-1]
        return ab

    def _explicit(self, u: SpectralField, v: SpectralField, t: float) -> tuple:
        if not self.advection:
            return np.zeros_like(u.modes), np.zeros_like(v.modes)
        g = self.grid
        U, V = self.shear.at(t)
        Uz = g.dz(U)
        Vz = g.dz(V)
        mult = 1j * (
            g.kx[:, None, None] * U[None, None, :]
            + g.ky[None, :, None] * V[None, None, :]
        )
        w = compute_w3d(u, v).modes
        Nu = mult * u.modes + w * Uz[None, None, :]
        Nv = mult * v.modes + w * Vz[None, None, :]
        return Nu, Nv

    def step(self, state: State3D) -> State3D:
        g = self.grid
        dt = self.dt
        Nu, Nv = self._explicit(state.u, state.v, state.t)
        if self.scheme == "be" or state.prev is None:
            rhs_u = state.u.modes / dt - Nu
            rhs_v = state.v.modes / dt - Nv
            abs_ = self._ab_be
        else:
            up, vp, Nup, Nvp = state.prev
            rhs_u = (2.0 * state.u.modes - 0.5 * up) / dt - (2.0 * Nu - Nup)
            rhs_v = (2.0 * state.v.modes - 0.5 * vp) / dt - (2.0 * Nv - Nvp)
            abs_ = self._ab_bdf2

        n = self._n
        u_new = np.zeros_like(rhs_u)
        v_new = np.zeros_like(rhs_v)
        for i in range(g.N_x // 2 + 1):
            big = np.zeros((2 * n, 2 * g.N_y), dtype=complex)
            big[0::2, : g.N_y] = rhs_u[i].T[1:-1]
            big[0::2, g.N_y :] = rhs_v[i].T[1:-1]
            sol = solve_banded((2, 2), abs_[i], big)
            u_new[i, :, 1:-1] = sol[0::2, : g.N_y].T
            v_new[i, :, 1:-1] = sol[0::2, g.N_y :].T
        if not (
            np.all(np.isfinite(u_new.view(float)))
            and np.all(np.isfinite(v_new.view(float)))
        ):
            raise RuntimeError(f"3D step rejected at t = {state.t}: non-finite values")
        return State3D(
            t=state.t + dt,
            u=SpectralField(u_new, g),
            v=SpectralField(v_new, g),
            dt=dt,
            step_index=state.step_index + 1,
            rho0=state.rho0,
            prev=(state.u.modes.copy(), state.v.modes.copy(), Nu, Nv),
        )


def run_scenario3d(scenario: Scenario3D, shear: ShearPair | None = None):
    """Drive a 3D linearized run; returns (NormReport, final state)."""
    grid = make_grid(
        L_x=scenario.L_x,
        N_x=scenario.N_x,
        Z_max=scenario.Z_max,
        N_z=scenario.N_z,
        L_y=scenario.L_y,
        N_y=scenario.N_y,
    )
    if shear is None:
        h0 = zero_moment_profile(scenario.eps1)
        if scenario.eps1 == 0.0:
            zero = lambda z: np.zeros_like(z)
            shear = make_shear(grid, zero, zero, 0.0, scenario.T_final, scenario.dt)
        else:
            shear = make_shear(
                grid, h0, h0, scenario.eps1, scenario.T_final, scenario.dt
            )
    u, v = make_analytic_data(grid, scenario.rho0, scenario.amplitude, scenario.band)
    state = State3D(0.0, u, v, scenario.dt, 0, scenario.rho0)
    stepper = Stepper3D(grid, scenario.dt, shear)

    n_steps = int(round(scenario.T_final / scenario.dt))
    times, xs, ys, zs, rhos = [], [], [], [], []

    def record(st: State3D):
        rho = rho_schedule(st.t, st.rho0)
        X, Y, Z = analytic_norms(st.u, st.v, rho)
        times.append(st.t)
        xs.append(X)
        ys.append(Y)
        zs.append(Z)
        rhos.append(rho)

    record(state)
    for _ in range(n_steps):
        state = stepper.step(state)
        if state.step_index % scenario.cadence == 0 or state.step_index == n_steps:
            record(state)

    times = np.array(times)
    z2 = np.array(zs) ** 2
    cum = np.zeros_like(times)
    if times.size > 1:
        cum[1:] = np.cumsum(z2[:-1] * np.diff(times))
    report = NormReport(
        times,
        {
            "x_norm": np.array(xs),
            "y_norm": np.array(ys),
            "z_norm": np.array(zs),
            "cum_z2": cum,
            "rho": np.array(rhos),
        },
    )
    return report, state
