"""Half-line Dirichlet heat flows and their damped good unknowns.

The flow dh/dt = d^2h/dz^2 with h(0) = 0 is integrated by Crank-Nicolson
on the truncated interval.  The good unknowns

    h_tilde = dh/dz + z h / (2(1+t))
    H       = h_tilde + z/(2(1+t)) * int_0^z h_tilde

satisfy the same equation with damping 1/(1+t) and 2/(1+t) respectively;
this module evaluates them, their Gaussian-weighted seminorms, the
structural residuals (moment conservation, zero-mean of h_tilde, damped
equations), decay-rate fits, and numeric audits of the three weighted
inequalities the decay proof runs on.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .grid import HalfStripGrid, mu_lambda


class HeatError(ValueError):
    """Invalid heat-flow input."""


class WeightedTailDivergence(ValueError):
    """The Gaussian weight beats the profile's decay on the truncated strip."""


@dataclass
class HeatState:
    """One time sample of a vertical heat profile."""

    t: float
    h: np.ndarray
    dt: float
    grid: HalfStripGrid


@dataclass
class GoodUnknowns:
    """The damped unknowns derived from a heat profile at time t."""

    h_tilde: np.ndarray
    H: np.ndarray
    t: float


@dataclass
class ResidualBundle:
    """Structural residuals of a heat-state sequence."""

    moment_drift: float
    htilde_integrals: np.ndarray
    residual_tilde: float
    residual_H: float


def moment(grid: HalfStripGrid, h: np.ndarray) -> float:
    """First moment int z h dz on the truncated strip."""
    return float((grid.z * h) @ grid.quad_w)


def top_tail_fraction(grid: HalfStripGrid, values: np.ndarray) -> float:
    """|values|^2-mass in the top 10% of the strip over the total."""
    total = float((values**2) @ grid.quad_w)
    if total == 0.0:
        return 0.0
    w_top = np.where(grid.z >= 0.9 * grid.Z_max, grid.quad_w, 0.0)
    return float((values**2) @ w_top) / total


def self_similar_profile(t: float, z: np.ndarray) -> np.ndarray:
    """Exact nonzero-moment solution z (1+t)^(-3/2) exp(-z^2/(4(1+t)))."""
    s = 1.0 + t
    return z * s**-1.5 * np.exp(-(z**2) / (4.0 * s))


def solve_heat(
    grid: HalfStripGrid,
    h0: np.ndarray,
    T: float,
    dt: float,
    cadence: int = 1,
    dt_growth: float = 1.0,
    dt_max: float | None = None,
) -> list:
    """Crank-Nicolson integration of the Dirichlet heat equation.

    Samples are recorded every ``cadence`` steps (plus the final state).
    ``dt_growth`` > 1 lets the step grow geometrically up to ``dt_max``,
    which keeps long decay runs cheap while the solution's own timescale
    stretches like 1 + t.
    """
    h0 = np.asarray(h0, dtype=float)
    if h0.shape != grid.z.shape:
        raise HeatError("initial profile does not match the grid")
    if not np.all(np.isfinite(h0)):
        raise HeatError("initial profile contains non-finite values")
    if h0[0] != 0.0:
        raise HeatError("initial profile must vanish at z = 0")
    if np.any(h0 != 0.0) and top_tail_fraction(grid, h0) >= 1e-8:
        raise HeatError(
            "initial profile does not decay before Z_max "
            f"(top-10% mass fraction {top_tail_fraction(grid, h0):.3e})"
        )
    if T < 0 or dt <= 0:
        raise HeatError("need T >= 0 and dt > 0")

    sub, dia, sup = grid.fv_laplacian()
    n = dia.size

    def factor(step):
        ab = np.zeros((3, n))
        ab[0, 1:] = -0.5 * step * sup[:-1]
        ab[1, :] = 1.0 - 0.5 * step * dia
        ab[2, :-1] = -0.5 * step * sub[1:]
        return ab

    states = [HeatState(0.0, h0.copy(), dt, grid)]
    h = h0.copy()
    t = 0.0
    step = dt
    ab = factor(step)
    k = 0
    t_eps = 1e-12 * max(T, 1.0)
    while t < T - t_eps:
        # snap to the horizon rather than leaving a microscopic last step,
        # which would make the sample spacing degenerate
        remaining = T - t
        step_new = remaining if remaining < step * (1.0 + 1e-9) else step
        if step_new != step:
            step = step_new
            ab = factor(step)
        hi = h[1:-1]
        rhs = hi + 0.5 * step * (dia * hi)
        rhs[1:] += 0.5 * step * sub[1:] * hi[:-1]
        rhs[:-1] += 0.5 * step * sup[:-1] * hi[1:]
        h[1:-1] = solve_banded((1, 1), ab, rhs)
        t += step
        k += 1
        if k % cadence == 0 or t >= T - t_eps:
            states.append(HeatState(t, h.copy(), step, grid))
        if dt_growth > 1.0:
            nxt = step * dt_growth
            if dt_max is not None:
                nxt = min(nxt, dt_max)
            if nxt != step:
                step = nxt
                ab = factor(step)
    return states


def good_unknowns(state: HeatState) -> GoodUnknowns:
    """Evaluate both damped unknowns from a heat profile."""
    g = state.grid
    fac = g.z / (2.0 * (1.0 + state.t))
    h_tilde = g.dz(state.h) + fac * state.h
    H = h_tilde + fac * g.cumint(h_tilde)
    return GoodUnknowns(h_tilde, H, state.t)


def weighted_seminorm(
    grid: HalfStripGrid, h: np.ndarray, lam: float, k: int = 0, t: float = 0.0
) -> float:
    """Quadrature value of | d^k h / dz^k |_{L^2} with weight mu_lambda.

    Raises :class:`WeightedTailDivergence` when the weighted integrand's
    top-10% mass exceeds 1e-6 of the total, i.e. the Gaussian weight beats
    the profile's decay and the truncated integral is meaningless.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if not 0 <= k <= 3:
        raise ValueError("derivative order must be between 0 and 3")
    d = np.asarray(h, dtype=float)
    for _ in range(k):
        d = grid.dz(d)
    mu = mu_lambda(grid.z, lam, t)
    integrand = mu * d**2
    total = float(integrand @ grid.quad_w)
    if total > 0.0:
        w_top = np.where(grid.z >= 0.9 * grid.Z_max, grid.quad_w, 0.0)
        tail = float(integrand @ w_top) / total
        if tail >= 1e-6:
            raise WeightedTailDivergence(
                f"weighted tail fraction {tail:.3e} dominates; "
                "integral diverges on the truncated strip"
            )
    return float(np.sqrt(total))


def _nonuniform_dt_weights(t0, t1, t2):
    """Centered first-derivative weights at t1 on a nonuniform triple."""
    a = t1 - t0
    b = t2 - t1
    return (-b / (a * (a + b)), (b - a) / (a * b), a / (b * (a + b)))


def structural_residuals(states: list, t_min: float = 0.0) -> ResidualBundle:
    """Moment drift, zero-mean defect of h_tilde, and damped-equation residuals.

    ``t_min`` restricts the residual maxima to samples at or after that
    time; drift and the h_tilde integrals always cover the whole history.
    """
    if len(states) < 3:
        raise HeatError("need at least 3 consecutive samples")
    g = states[0].grid
    m0 = moment(g, states[0].h)
    drift = max(abs(moment(g, s.h) - m0) for s in states)

    goods = [good_unknowns(s) for s in states]
    integrals = np.array([gu.h_tilde @ g.quad_w for gu in goods])

    res_t, res_H = 0.0, 0.0
    for i in range(1, len(states) - 1):
        t0, t1, t2 = (states[j].t for j in (i - 1, i, i + 1))
        if t1 < t_min:
            continue
        c0, c1, c2 = _nonuniform_dt_weights(t0, t1, t2)
        for attr, damping, acc in (("h_tilde", 1.0, "t"), ("H", 2.0, "H")):
            p0, p1, p2 = (getattr(goods[j], attr) for j in (i - 1, i, i + 1))
            dpdt = c0 * p0 + c1 * p1 + c2 * p2
            r = dpdt - g.dzz(p1) + damping / (1.0 + t1) * p1
            # measure over nodes with centered stencils only: the one-sided
            # boundary rows of dzz are not consistent approximations of the
            # interior equation and would freeze the residual at O(1)
            val = float(np.sqrt((r[2:-2] ** 2) @ g.quad_w[2:-2]))
            if acc == "t":
                res_t = max(res_t, val)
            else:
                res_H = max(res_H, val)
    return ResidualBundle(drift, integrals, res_t, res_H)


def decay_series(states: list) -> tuple:
    """Times and the sup-norm triple |h_z| + |z h_z| + |z h_zz| per sample."""
    g = states[0].grid
    times, vals = [], []
    for s in states:
        hz = g.dz(s.h)
        hzz = g.dzz(s.h)
        v = (
            np.max(np.abs(hz))
            + np.max(np.abs(g.z * hz))
            + np.max(np.abs(g.z * hzz))
        )
        times.append(s.t)
        vals.append(float(v))
    return np.array(times), np.array(vals)


def fit_decay(times, values, window) -> float:
    """Least-squares slope of log(value) against log(1+t) inside the window."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    ta, tb = window
    mask = (times >= ta) & (times <= tb)
    if np.count_nonzero(mask) < 2:
        raise ValueError("window contains fewer than 2 samples")
    if np.any(values[mask] <= 0.0):
        raise ValueError("decay fit requires positive values in the window")
    return float(np.polyfit(np.log1p(times[mask]), np.log(values[mask]), 1)[0])


def lemma_audit(lemma_id: str, samples: list, **params) -> dict:
    """Numeric audit of the weighted inequalities behind the decay proof.

    ``samples`` is a list of (t, profile) pairs.  Supported ids:

    * "3.1": lam^(1/2)/(sqrt(2)(1+t)^(1/2)) |h|_mu  <=  |h_z|_mu; the
      returned worst ratio is LHS/RHS against the exact constant.
    * "3.2": |z^k h|_inf <= C (1+t)^((1+2k)/4) |h_z|_mu; returns fitted C.
    * "3.3": |d^(k+1) h|_mu_lam <= C |d^k h_tilde|_mu_lamt for lam < lamt;
      returns fitted C.

    Samples whose weighted integrals diverge on the truncated strip are
    flagged and excluded from the ratio.
    """
    lam = params.get("lam", 1.0)
    worst = 0.0
    flagged = []
    ratios = []
    for idx, (t, h) in enumerate(samples):
        grid = params["grid"]
        try:
            if lemma_id == "3.1":
                lhs = np.sqrt(lam) / (np.sqrt(2.0) * np.sqrt(1.0 + t)) * (
                    weighted_seminorm(grid, h, lam, 0, t)
                )
                rhs = weighted_seminorm(grid, h, lam, 1, t)
            elif lemma_id == "3.2":
                k = params.get("k", 0)
                lhs = float(np.max(np.abs(grid.z**k * h)))
                rhs = (1.0 + t) ** ((1 + 2 * k) / 4.0) * weighted_seminorm(
                    grid, h, lam, 1, t
                )
            elif lemma_id == "3.3":
                lamt = params["lam_tilde"]
                if not lam < lamt:
                    raise ValueError("lemma 3.3 needs lam < lam_tilde")
                k = params.get("k", 0)
                lhs = weighted_seminorm(grid, h, lam, k + 1, t)
                fac = grid.z / (2.0 * (1.0 + t))
                h_tilde = grid.dz(h) + fac * h
                rhs = weighted_seminorm(grid, h_tilde, lamt, k, t)
            else:
                raise ValueError(f"unknown lemma id {lemma_id!r}")
        except WeightedTailDivergence:
            flagged.append(idx)
            continue
        if rhs == 0.0:
            if lhs == 0.0:
                ratios.append(0.0)
                continue
            flagged.append(idx)
            continue
        ratios.append(lhs / rhs)
        worst = max(worst, lhs / rhs)
    return {
        "lemma": lemma_id,
        "worst_ratio": worst,
        "fitted_constant": worst,
        "ratios": np.array(ratios),
        "flagged": flagged,
    }
