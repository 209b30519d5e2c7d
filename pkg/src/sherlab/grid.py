"""Half-strip discretization: tangential Fourier grid x vertical finite-difference grid.

The vertical grid lives on [0, Z_max] with an optional tanh stretching map
that clusters nodes near z = 0.  All vertical operators (first/second
derivative stencils, quadrature weights, the conservative Laplacian used by
the implicit solvers) are attached to the grid at construction time and the
grid is immutable afterwards.
"""

from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Invalid grid parameters."""


def _newton_cotes_weights(n_nodes: int, h: float) -> np.ndarray:
    """Quadrature weights on a uniform grid of ``n_nodes`` points, spacing ``h``.

    Composite Simpson when the interval count is even; otherwise Simpson on
    the leading intervals plus a 3/8 rule on the last three.  All weights are
    positive, unlike the quadratic end-correction rules.
    """
    if n_nodes < 4:
        raise GridError("need at least 4 nodes for quadrature weights")
    w = np.zeros(n_nodes)
    n_int = n_nodes - 1
    if n_int % 2 == 0:
        stop = n_nodes
    else:
        stop = n_nodes - 3  # leave 3 intervals for the 3/8 tail
        w[stop - 1 :] += np.array([1.0, 3.0, 3.0, 1.0]) * (3.0 * h / 8.0)
    # Simpson over nodes [0, stop)
    w[0] += h / 3.0
    w[stop - 1] += h / 3.0
    w[1 : stop - 1 : 2] += 4.0 * h / 3.0
    w[2 : stop - 1 : 2] += 2.0 * h / 3.0
    return w


def _d1_matrix_diags(z: np.ndarray):
    """Three-point first-derivative stencil, exact on quadratics.

    Returns (sub, diag, sup) arrays plus one-sided boundary rows, packed as a
    dense (N, N) matrix is avoided; we return a callable-friendly structure.
    """
    n = z.size
    sub = np.zeros(n)
    dia = np.zeros(n)
    sup = np.zeros(n)
    a = z[1:-1] - z[:-2]
    b = z[2:] - z[1:-1]
    sub[1:-1] = -b / (a * (a + b))
    dia[1:-1] = (b - a) / (a * b)
    sup[1:-1] = a / (b * (a + b))
    return sub, dia, sup


def _one_sided_d1(z: np.ndarray, at_start: bool) -> np.ndarray:
    """Second-order one-sided first-derivative weights at an endpoint."""
    if at_start:
        z0, z1, z2 = z[0], z[1], z[2]
    else:
        z0, z1, z2 = z[-1], z[-2], z[-3]
    h1 = z1 - z0
    h2 = z2 - z1
    c0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2))
    c1 = (h1 + h2) / (h1 * h2)
    c2 = -h1 / (h2 * (h1 + h2))
    return np.array([c0, c1, c2])


def _one_sided_d2(z: np.ndarray, at_start: bool) -> np.ndarray:
    """Second-order one-sided second-derivative weights (4 nodes)."""
    if at_start:
        zz = z[:4] - z[0]
    else:
        zz = z[-4:] - z[-1]
    # solve Vandermonde system: weights reproduce f'' for cubics
    v = np.vander(zz, 4, increasing=True).T
    rhs = np.array([0.0, 0.0, 2.0, 0.0])
    return np.linalg.solve(v, rhs)


@dataclass(frozen=True)
class HalfStripGrid:
    """Tensor grid: periodic tangential Fourier modes x truncated vertical nodes."""

    L_x: float
    N_x: int
    Z_max: float
    N_z: int
    stretch: float
    z: np.ndarray
    quad_w: np.ndarray          # Simpson-type quadrature weights in z
    cell_w: np.ndarray          # trapezoid / finite-volume cell weights in z
    L_y: float | None = None
    N_y: int | None = None
    _d1: tuple = field(default=None, repr=False)
    _d1_bnd: tuple = field(default=None, repr=False)
    _d2_bnd: tuple = field(default=None, repr=False)

    # -- tangential spectra -------------------------------------------------

    @property
    def kx(self) -> np.ndarray:
        """Wavenumbers of the rfft layout in x."""
        return 2.0 * np.pi / self.L_x * np.arange(self.N_x // 2 + 1)

    @property
    def ky(self) -> np.ndarray:
        """Full (signed) wavenumbers in y; only present on 3D grids."""
        if self.N_y is None:
            raise GridError("grid has no y direction")
        return 2.0 * np.pi / self.L_y * np.fft.fftfreq(self.N_y, 1.0 / self.N_y)

    @property
    def parseval_fac(self) -> np.ndarray:
        """Multiplicity of each rfft mode in Parseval sums."""
        fac = np.full(self.N_x // 2 + 1, 2.0)
        fac[0] = 1.0
        if self.N_x % 2 == 0:
            fac[-1] = 1.0
        return fac

    # -- vertical operators -------------------------------------------------

    def dz(self, f: np.ndarray) -> np.ndarray:
        """First z-derivative along the last axis (2nd order, exact on quadratics)."""
        sub, dia, sup = self._d1
        out = np.empty_like(f)
        out[..., 1:-1] = (
            sub[1:-1] * f[..., :-2] + dia[1:-1] * f[..., 1:-1] + sup[1:-1] * f[..., 2:]
        )
        c0, cn = self._d1_bnd
        out[..., 0] = f[..., :3] @ c0
        out[..., -1] = f[..., -3:] @ cn[::-1]
        return out

    def dzz(self, f: np.ndarray) -> np.ndarray:
        """Second z-derivative along the last axis."""
        a = self.z[1:-1] - self.z[:-2]
        b = self.z[2:] - self.z[1:-1]
        out = np.empty_like(f)
        out[..., 1:-1] = (
            2.0 * f[..., :-2] / (a * (a + b))
            - 2.0 * f[..., 1:-1] / (a * b)
            + 2.0 * f[..., 2:] / (b * (a + b))
        )
        c0, cn = self._d2_bnd
        out[..., 0] = f[..., :4] @ c0
        out[..., -1] = f[..., -4:] @ cn[::-1]
        return out

    def integrate(self, f: np.ndarray) -> np.ndarray:
        """Quadrature of ``f`` over [0, Z_max] along the last axis."""
        return f @ self.quad_w

    def cumint(self, f: np.ndarray) -> np.ndarray:
        """Cumulative trapezoid integral from z = 0 along the last axis."""
        dzs = np.diff(self.z)
        seg = 0.5 * (f[..., 1:] + f[..., :-1]) * dzs
        out = np.zeros_like(f)
        out[..., 1:] = np.cumsum(seg, axis=-1)
        return out

    def fv_laplacian(self):
        """Conservative Dirichlet Laplacian on interior nodes.

        Returns (sub, dia, sup) of length N_z - 2.  Built so that the
        discrete summation-by-parts identity (f, A f)_cell = -|Gf|^2 holds
        exactly for fields vanishing at both ends, where G is the midpoint
        gradient.  On a uniform grid this is the standard 3-point stencil.
        """
        z = self.z
        h = np.diff(z)                      # face spacings, length N_z-1
        w = self.cell_w[1:-1]               # interior cell measures
        sub = np.zeros(self.N_z - 2)
        dia = np.zeros(self.N_z - 2)
        sup = np.zeros(self.N_z - 2)
        sub[1:] = 1.0 / (h[1:-1] * w[1:])
        sup[:-1] = 1.0 / (h[1:-1] * w[:-1])
        dia[:] = -(1.0 / h[:-1] + 1.0 / h[1:]) / w
        return sub, dia, sup

    def midpoint_gradient(self, f: np.ndarray) -> np.ndarray:
        """Two-point gradient on cell faces (adjoint-exact with cell_w)."""
        return (f[..., 1:] - f[..., :-1]) / np.diff(self.z)

    @property
    def face_w(self) -> np.ndarray:
        """Face measures matching :meth:`midpoint_gradient`."""
        return np.diff(self.z)

    def top_mass_fraction(self, f: np.ndarray) -> float:
        """|f|^2-mass in the top 10% of the strip over the total (truncation gauge)."""
        total = float(self.integrate(np.abs(f) ** 2).sum())
        if total == 0.0:
            return 0.0
        top = self.z >= 0.9 * self.Z_max
        w_top = np.where(top, self.quad_w, 0.0)
        return float((np.abs(f) ** 2 @ w_top).sum()) / total


@dataclass(frozen=True)
class WeightProfile:
    """Samples of <z> = (1+z^2)^(1/2) and the Gaussian weight mu_lambda."""

    bracket_z: np.ndarray
    lam: float
    t: float
    mu_values: np.ndarray


def make_grid(
    L_x: float = 2.0 * np.pi,
    N_x: int = 64,
    Z_max: float = 20.0,
    N_z: int = 201,
    stretch: float = 0.0,
    L_y: float | None = None,
    N_y: int | None = None,
) -> HalfStripGrid:
    """Build a half-strip grid with all vertical operators attached."""
    if N_x % 2 != 0 or N_x < 4:
        raise GridError("tangential mode count must be even and >= 4")
    if N_y is not None and (N_y % 2 != 0 or N_y < 4):
        raise GridError("tangential mode count must be even and >= 4")
    if Z_max <= 0:
        raise GridError("Z_max must be positive")
    if N_z < 9:
        raise GridError("N_z must be at least 9")
    if L_x <= 0 or (L_y is not None and L_y <= 0):
        raise GridError("tangential period must be positive")
    if N_y is not None and L_y is None:
        L_y = L_x
    if stretch < 0:
        raise GridError("stretch must be non-negative")

    xi = np.linspace(0.0, 1.0, N_z)
    h_xi = 1.0 / (N_z - 1)
    if stretch < 1e-12:
        z = Z_max * xi
        dz_dxi = np.full(N_z, Z_max)
    else:
        g = stretch
        z = Z_max * (1.0 - np.tanh(g * (1.0 - xi)) / np.tanh(g))
        dz_dxi = Z_max * g / np.tanh(g) / np.cosh(g * (1.0 - xi)) ** 2
    z[0] = 0.0
    z[-1] = Z_max

    quad_w = _newton_cotes_weights(N_z, h_xi) * dz_dxi

    h = np.diff(z)
    cell_w = np.zeros(N_z)
    cell_w[0] = 0.5 * h[0]
    cell_w[-1] = 0.5 * h[-1]
    cell_w[1:-1] = 0.5 * (h[:-1] + h[1:])

    grid = HalfStripGrid(
        L_x=L_x,
        N_x=N_x,
        Z_max=Z_max,
        N_z=N_z,
        stretch=stretch,
        z=z,
        quad_w=quad_w,
        cell_w=cell_w,
        L_y=L_y,
        N_y=N_y,
    )
    object.__setattr__(grid, "_d1", _d1_matrix_diags(z))
    object.__setattr__(
        grid, "_d1_bnd", (_one_sided_d1(z, True), _one_sided_d1(z, False))
    )
    object.__setattr__(
        grid, "_d2_bnd", (_one_sided_d2(z, True), _one_sided_d2(z, False))
    )
    return grid


def weight_values(grid: HalfStripGrid, lam: float, t: float) -> WeightProfile:
    """Evaluate <z> and mu_lambda(t, z) = exp(lam z^2 / (4(1+t))) at the nodes."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    if t < 0.0:
        raise ValueError(f"time must be non-negative, got {t}")
    z = grid.z
    return WeightProfile(
        bracket_z=np.sqrt(1.0 + z**2),
        lam=lam,
        t=t,
        mu_values=np.exp(lam * z**2 / (4.0 * (1.0 + t))),
    )


def bracket_z(z: np.ndarray) -> np.ndarray:
    """<z> = (1+z^2)^(1/2)."""
    return np.sqrt(1.0 + z**2)


def mu_lambda(z: np.ndarray, lam: float, t: float) -> np.ndarray:
    """Gaussian weight exp(lam z^2 / (4(1+t)))."""
    return np.exp(lam * z**2 / (4.0 * (1.0 + t)))
