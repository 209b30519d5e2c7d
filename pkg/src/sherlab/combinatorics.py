"""Gevrey weight families and numeric scans of the combinatorial inequalities.

The weight M_{r,alpha} = r^|alpha| (|alpha|+1)^4 / |alpha|! controls the
space-time derivative ladder; L_{rho,m} = rho^(m+1)/m! its one-parameter
analytic-in-y cousin.  The four binomial/weight-ratio inequalities used to
close the nonlinear estimates are verified here by exhaustive enumeration
over a multi-index cap, together with the discrete Young convolution
inequality and the half-line Hardy inequality.  All ratios are computed in
log space so factorials never overflow.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

_FACT_CAP = 30
_FACTORIALS = [math.factorial(n) for n in range(_FACT_CAP + 1)]


def gevrey_weight(kind: str, param: float, arg) -> float:
    """Evaluate M_{r,alpha} (kind "M") or L_{rho,m} (kind "L")."""
    if kind == "M":
        r = param
        if not 0.0 < r < 1.0:
            raise ValueError(f"r must lie in (0, 1), got {r}")
        n = int(sum(arg)) if np.iterable(arg) else int(arg)
        if n < 0 or n > _FACT_CAP:
            raise ValueError(f"|alpha| = {n} outside the cached range 0..{_FACT_CAP}")
        return r**n * (n + 1) ** 4 / _FACTORIALS[n]
    if kind == "L":
        rho, m = param, int(arg)
        if rho <= 0:
            raise ValueError(f"rho must be positive, got {rho}")
        if m < 0 or m > _FACT_CAP:
            raise ValueError(f"m = {m} outside the cached range 0..{_FACT_CAP}")
        return rho ** (m + 1) / _FACTORIALS[m]
    raise ValueError(f"unknown weight family {kind!r}")


def _log_m(r: float, n) -> np.ndarray:
    """log M_{r,alpha} as a function of n = |alpha| (vectorized)."""
    n = np.asarray(n, dtype=float)
    return n * np.log(r) + 4.0 * np.log(n + 1.0) - gammaln(n + 1.0)


@dataclass
class ScanResult:
    """Outcome of one inequality scan."""

    ineq_id: str
    r: float
    cap: int
    constant: float
    alpha: tuple
    beta: tuple


# Each inequality: (beta3 condition, numerator shift flags, denominators, RHS)
# encoded procedurally below; see inequality_scan.
_INEQ_IDS = ("A.3", "A.4", "A.5", "A.6")


def _alphas(cap: int):
    for a1 in range(cap + 1):
        for a2 in range(cap + 1 - a1):
            for a3 in range(1, cap + 1 - a1 - a2):
                yield (a1, a2, a3)


def inequality_scan(ineq_id: str, r: float, cap: int) -> ScanResult:
    """Minimal constant making one of the four weight-ratio inequalities
    hold over all admissible (alpha, beta) with |alpha| <= cap.

    The scanned quantity is LHS / (RHS without its constant); the returned
    constant is the sup, with the attaining pair.  Admissibility: alpha_3
    >= 1, beta <= alpha, plus the per-inequality beta_3 condition keeping
    every shifted index in Z^3_+.
    """
    if ineq_id not in _INEQ_IDS:
        raise ValueError(f"unknown inequality id {ineq_id!r}")
    if not 0.0 < r < 1.0:
        raise ValueError(f"r must lie in (0, 1), got {r}")
    if cap < 1:
        raise ValueError("cap must allow |alpha| >= 1")

    best = -np.inf
    best_pair = None
    for alpha in _alphas(cap):
        a1, a2, a3 = alpha
        na = a1 + a2 + a3
        b1, b2, b3 = np.meshgrid(
            np.arange(a1 + 1), np.arange(a2 + 1), np.arange(a3 + 1), indexing="ij"
        )
        if ineq_id in ("A.3", "A.5"):
            mask = b3 == 0
        else:
            mask = b3 >= 1
        if not np.any(mask):
            continue
        b1, b2, b3 = b1[mask], b2[mask], b3[mask]
        nb = b1 + b2 + b3
        log_binom = (
            gammaln(a1 + 1.0) - gammaln(b1 + 1.0) - gammaln(a1 - b1 + 1.0)
            + gammaln(a2 + 1.0) - gammaln(b2 + 1.0) - gammaln(a2 - b2 + 1.0)
            + gammaln(a3 + 1.0) - gammaln(b3 + 1.0) - gammaln(a3 - b3 + 1.0)
        )
        if ineq_id == "A.3":
            # |beta| and |alpha - beta + (0,1,-1)| = |alpha| - |beta|
            log_lhs = (
                log_binom - np.log(na) + _log_m(r, na)
                - _log_m(r, nb) - _log_m(r, na - nb)
            )
            rhs = (nb + 1.0) ** -4 + (na - nb + 1.0) ** -4
        elif ineq_id == "A.4":
            # denominators at |beta| - 1 and |alpha| - |beta| + 1
            log_lhs = (
                log_binom - np.log(na) + _log_m(r, na)
                - _log_m(r, nb - 1) - _log_m(r, na - nb + 1)
            )
            rhs = nb**-4.0 + (na - nb + 2.0) ** -4
        elif ineq_id == "A.5":
            log_lhs = (
                log_binom + np.log(r) - np.log(na) + _log_m(r, na)
                - _log_m(r, nb) - _log_m(r, na - nb + 1)
            )
            rhs = (nb + 1.0) ** -4 + (na - nb + 2.0) ** -4
        else:  # A.6: denominators at |beta| (shift (0,1,-1)) and |alpha|-|beta|
            log_lhs = (
                log_binom - np.log(na) + _log_m(r, na)
                - _log_m(r, nb) - _log_m(r, na - nb)
            )
            rhs = (nb + 1.0) ** -4 + (na - nb + 1.0) ** -4
        ratio = log_lhs - np.log(rhs)
        i = int(np.argmax(ratio))
        if ratio[i] > best:
            best = ratio[i]
            best_pair = (alpha, (int(b1[i]), int(b2[i]), int(b3[i])))
    return ScanResult(ineq_id, r, cap, float(np.exp(best)), *best_pair)


def young_check(p, q) -> float:
    """Ratio l2(p * q) / (l1(p) l2(q)) for nonnegative sequences; <= 1."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(p < 0) or np.any(q < 0):
        raise ValueError("sequences must be nonnegative")
    denom = np.sum(p) * np.sqrt(np.sum(q**2))
    if denom == 0.0:
        return 0.0
    conv = np.convolve(p, q)
    return float(np.sqrt(np.sum(conv**2)) / denom)


def hardy_check(grid, h) -> float:
    """Ratio |h/z|_{L^2} / (2 |dh/dz|_{L^2}) on the half strip; <= 1.

    The z -> 0 limit of h/z is taken as dh/dz at the wall.  Profiles not
    vanishing at z = 0 are rejected.
    """
    h = np.asarray(h, dtype=float)
    if h[0] != 0.0:
        raise ValueError("Hardy check requires h(0) = 0")
    dh = grid.dz(h)
    denom = 2.0 * np.sqrt((dh**2) @ grid.quad_w)
    if denom == 0.0:
        return 0.0
    over_z = np.empty_like(h)
    over_z[0] = dh[0]
    over_z[1:] = h[1:] / grid.z[1:]
    return float(np.sqrt((over_z**2) @ grid.quad_w) / denom)
