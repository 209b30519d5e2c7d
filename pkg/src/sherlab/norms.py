"""Weighted energy functionals, the derivative ladder, and radius estimation.

The working norm is H^1 in x tensor L^2 in z, with the polynomial weight
<z> = (1+z^2)^(1/2) on vertical derivatives; the companion dissipation
functional carries <z> on d^2/dz^2 and d/dx.  The ladder measures weighted
space-time derivatives of a snapshot history and fits the growth constant
of their factorial envelope, and the radius fit reads the tangential
analyticity radius off the Fourier spectrum.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import SpectralField
from .grid import bracket_z


@dataclass
class NormReport:
    """Time series of monitored functionals.

    ``columns`` maps column name to a float array aligned with ``times``.
    The canonical leading columns are h1_norm, dissipation and
    cum_dissipation; experiment drivers append their own diagnostics.
    """

    times: np.ndarray
    columns: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.size > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("report time stamps must be strictly increasing")
        for name, col in self.columns.items():
            col = np.asarray(col, dtype=float)
            if col.shape != self.times.shape:
                raise ValueError(f"column {name!r} length does not match times")
            if not np.all(np.isfinite(col)):
                raise ValueError(f"column {name!r} contains non-finite values")
            self.columns[name] = col

    def __len__(self) -> int:
        return self.times.size

    @property
    def header(self) -> list:
        return ["t"] + list(self.columns.keys())


@dataclass
class LadderEntry:
    """One weighted space-time derivative magnitude.

    ``alpha`` = (time order, x order, z order); ``value`` is the sup over
    sampled interior times of t^(a1 + a2 + a3/2) times the weighted-H1 norm
    of the corresponding derivative of the field history.
    """

    alpha: tuple
    value: float


@dataclass
class RadiusEstimate:
    """Tangential analyticity radius read off the mode spectrum."""

    radius: float
    n_active: int
    indeterminate: bool


def _h1x_factor(grid) -> np.ndarray:
    """Per-mode multiplier realizing the H^1-in-x part: |.|^2 + |d/dx .|^2."""
    return 1.0 + grid.kx**2


def h1_weighted_norm(u: SpectralField) -> float:
    """Norm with squared value |u|^2_{H1xL2z} + |<z> du/dz|^2_{H1xL2z}."""
    g = u.grid
    w2 = bracket_z(g.z) ** 2
    uz = g.dz(u.modes)
    per_mode = (np.abs(u.modes) ** 2) @ g.quad_w + (np.abs(uz) ** 2 * w2) @ g.quad_w
    total = g.L_x * np.sum(u.grid.parseval_fac * _h1x_factor(g) * per_mode)
    return float(np.sqrt(total))


def dissipation_functional(u: SpectralField) -> float:
    """Squared-sum functional |<z> d2u/dz2|^2_{H1xL2z} + |<z> du/dx|^2_{H1xL2z}."""
    g = u.grid
    w2 = bracket_z(g.z) ** 2
    uzz = g.dzz(u.modes)
    per_mode = (np.abs(uzz) ** 2 * w2) @ g.quad_w + g.kx**2 * (
        (np.abs(u.modes) ** 2 * w2) @ g.quad_w
    )
    return float(g.L_x * np.sum(g.parseval_fac * _h1x_factor(g) * per_mode))


def monotonicity_audit(report: NormReport, budget: float, rtol: float = 1e-6):
    """Check norm^2(t_i) + sum_{j<i} D_j dt_j <= budget^2 (1 + rtol) at all i.

    Returns (passed, worst_slack) where slack_i is budget^2 minus the
    monitored sum; the worst slack is the minimum over samples.
    """
    if len(report) == 0:
        raise ValueError("empty report")
    h1 = report.columns["h1_norm"]
    diss = report.columns["dissipation"]
    t = report.times
    cum = np.zeros_like(t)
    if t.size > 1:
        cum[1:] = np.cumsum(diss[:-1] * np.diff(t))
    monitored = h1**2 + cum
    slack = budget**2 - monitored
    passed = bool(np.all(monitored <= budget**2 * (1.0 + rtol)))
    return passed, float(np.min(slack))


_TIME_STENCILS = {
    0: (np.array([1.0]), [0]),
    1: (np.array([-0.5, 0.0, 0.5]), [-1, 0, 1]),
    2: (np.array([1.0, -2.0, 1.0]), [-1, 0, 1]),
    3: (np.array([-0.5, 1.0, 0.0, -1.0, 0.5]), [-2, -1, 0, 1, 2]),
}


def smoothing_ladder(snapshots, times, cap: int = 3, eps0: float | None = None):
    """Weighted derivative ladder over a uniformly spaced snapshot history.

    For every multi-index alpha = (a1, a2, a3) with a1+a2+a3 <= cap, the
    entry value is sup_t t^(a1+a2+a3/2) of the weighted-H1 norm of
    d_t^a1 d_x^a2 d_z^a3 u, with d_t from centered differences on the
    snapshots, d_x spectral and d_z from stencils.  Returns the entry list
    and the least C0 with value <= eps0 * C0^|alpha| * |alpha|! for all
    computed alpha (eps0 defaults to the alpha = 0 entry).
    """
    times = np.asarray(times, dtype=float)
    if len(snapshots) < 5:
        raise ValueError("ladder needs at least 5 snapshots")
    if cap > 3:
        raise ValueError("ladder cap is limited to 3")
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-10):
        raise ValueError("snapshots must be uniformly spaced in time")
    dt = dts[0]
    grid = snapshots[0].grid
    n = len(snapshots)
    stack = np.stack([s.modes for s in snapshots])  # (n, K, N_z)

    entries = []
    for a1 in range(cap + 1):
        coeffs, offsets = _TIME_STENCILS[a1]
        lo, hi = -min(offsets), n - max(offsets)
        # skip t = 0 so the t^gamma weight never meets a boundary sample
        valid = [i for i in range(lo, hi) if times[i] > 0.0]
        if not valid:
            continue
        dtu = np.zeros((len(valid),) + stack.shape[1:], dtype=complex)
        for c, off in zip(coeffs, offsets):
            if c != 0.0:
                dtu += c * stack[[i + off for i in valid]]
        dtu /= dt**a1
        tw = times[valid]
        for a2 in range(cap + 1 - a1):
            dxu = dtu * (1j * grid.kx[:, None]) ** a2
            dzu = dxu
            for a3 in range(cap + 1 - a1 - a2):
                if a3 > 0:
                    dzu = grid.dz(dzu)
                gamma = a1 + a2 + 0.5 * a3
                vals = [
                    tw[i] ** gamma
                    * h1_weighted_norm(SpectralField(dzu[i], grid))
                    for i in range(len(valid))
                ]
                entries.append(LadderEntry((a1, a2, a3), float(max(vals))))

    base = next(e.value for e in entries if e.alpha == (0, 0, 0))
    if eps0 is None:
        eps0 = base
    c0 = 0.0
    if eps0 > 0.0:
        for e in entries:
            order = sum(e.alpha)
            if order == 0:
                continue
            bound = e.value / (eps0 * float(math.factorial(order)))
            c0 = max(c0, bound ** (1.0 / order))
    return entries, float(c0)


def tangential_radius_fit(
    u: SpectralField, noise_floor: float = 1e-14, min_active: int = 2
) -> RadiusEstimate:
    """Smallest adjacent-mode log-amplitude slope of the tangential spectrum.

    For a field analytic in x the mode amplitudes |u_k|_{L2_z} decay like
    e^{-rho k}, so the log-ratio of adjacent active amplitudes estimates
    the radius rho.  Taking the minimum over adjacent pairs makes the
    estimate stable when high modes drop below the noise floor: a minimum
    over a shrinking active set can only grow.  Fewer than ``min_active``
    modes above the floor, or no adjacent active pair, makes the estimate
    indeterminate.
    """
    g = u.grid
    amp = np.sqrt((np.abs(u.modes) ** 2) @ g.quad_w)
    k = g.kx
    mask = (k >= 1.0 - 1e-12) & (amp > noise_floor)
    n_active = int(np.count_nonzero(mask))
    idx = np.where(mask)[0]
    slopes = [
        np.log(amp[a] / amp[b]) / (k[b] - k[a])
        for a, b in zip(idx[:-1], idx[1:])
        if b == a + 1
    ]
    if n_active < min_active or not slopes:
        return RadiusEstimate(float("nan"), n_active, True)
    return RadiusEstimate(float(min(slopes)), n_active, False)
