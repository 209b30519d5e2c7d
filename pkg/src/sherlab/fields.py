"""Spectral fields on the half strip and the model's nonlocal closures.

A field is stored as complex tangential-mode amplitudes times vertical node
values.  The vertical velocity w follows from incompressibility and the
magnetic components (f, and g in 3D) from the per-mode Dirichlet problem
d^2 f/dz^2 = -ik u.  The module also audits the dissipation identity
(f_x, u) = -|f_z|^2 that makes the nonlocal term act like tangential
dissipation.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .grid import HalfStripGrid


class FieldError(ValueError):
    """Incompatible field operands or invalid field data."""


@dataclass
class SpectralField:
    """Tangential Fourier amplitudes times vertical node values.

    ``modes`` has shape (N_x//2 + 1, N_z) in 2D and (N_x//2 + 1, N_y, N_z)
    in 3D (rfft layout in x, full fft layout in y).  The rfft layout keeps
    only k >= 0; conjugate symmetry of the underlying real field is implied.
    ``modes[k]`` holds the actual Fourier coefficient (rfft / N_x).
    """

    modes: np.ndarray
    grid: HalfStripGrid

    def __post_init__(self):
        expect = (self.grid.N_x // 2 + 1,)
        if self.grid.N_y is not None:
            expect = expect + (self.grid.N_y,)
        expect = expect + (self.grid.N_z,)
        if self.modes.shape != expect:
            raise FieldError(
                f"mode array shape {self.modes.shape} does not match grid {expect}"
            )

    @property
    def is3d(self) -> bool:
        return self.grid.N_y is not None

    def copy(self) -> "SpectralField":
        return SpectralField(self.modes.copy(), self.grid)

    def to_physical(self) -> np.ndarray:
        """Real-space samples, shape (N_x, N_z) or (N_x, N_y, N_z)."""
        m = self.modes
        if self.is3d:
            m = np.fft.ifft(m * self.grid.N_y, axis=1)
        return np.fft.irfft(m * self.grid.N_x, n=self.grid.N_x, axis=0)

    @classmethod
    def from_physical(cls, values: np.ndarray, grid: HalfStripGrid) -> "SpectralField":
        m = np.fft.rfft(values, axis=0) / grid.N_x
        if grid.N_y is not None:
            m = np.fft.fft(m, axis=1) / grid.N_y
        return cls(m, grid)

    @classmethod
    def zero(cls, grid: HalfStripGrid) -> "SpectralField":
        shape = (grid.N_x // 2 + 1,)
        if grid.N_y is not None:
            shape = shape + (grid.N_y,)
        shape = shape + (grid.N_z,)
        return cls(np.zeros(shape, dtype=complex), grid)

    def _check_same_grid(self, other: "SpectralField"):
        if other.grid is not self.grid and (
            other.grid.N_x != self.grid.N_x
            or other.grid.N_z != self.grid.N_z
            or other.grid.N_y != self.grid.N_y
        ):
            raise FieldError("fields live on different grids")

    def tangential_measure(self) -> float:
        """Area of the tangential torus (L_x, or L_x*L_y in 3D)."""
        g = self.grid
        return g.L_x * (g.L_y if g.L_y is not None else 1.0)

    def mode_weights(self) -> np.ndarray:
        """Parseval multiplicity per mode, broadcast to the modes' shape."""
        fac = self.grid.parseval_fac
        if self.is3d:
            return fac[:, None]
        return fac

    def l2_squared(self, z_weight: np.ndarray | None = None) -> float:
        """Squared L^2 norm over the strip, optional pointwise z-weight."""
        prof = np.abs(self.modes) ** 2
        if z_weight is not None:
            prof = prof * z_weight
        per_mode = prof @ self.grid.quad_w
        fac = self.mode_weights()
        return float(self.tangential_measure() * np.sum(fac * per_mode))


def _banded_from_tridiag(sub, dia, sup) -> np.ndarray:
    n = dia.size
    ab = np.zeros((3, n))
    ab[0, 1:] = sup[:-1]
    ab[1, :] = dia
    ab[2, :-1] = sub[1:]
    return ab


def compute_w(u: SpectralField) -> SpectralField:
    """Vertical velocity from incompressibility: w = -int_0^z div_tan(u).

    In 2D the integrand is du/dx; callers with 3D data pass the full
    tangential divergence through :func:`compute_w3d`.
    """
    g = u.grid
    if u.is3d:
        raise FieldError("3D fields carry a v-component; use compute_w3d")
    div = 1j * g.kx[:, None] * u.modes
    return SpectralField(-g.cumint(div), g)


def compute_w3d(u: SpectralField, v: SpectralField) -> SpectralField:
    """3D vertical velocity: w = -int_0^z (du/dx + dv/dy)."""
    u._check_same_grid(v)
    g = u.grid
    div = (
        1j * g.kx[:, None, None] * u.modes
        + 1j * g.ky[None, :, None] * v.modes
    )
    return SpectralField(-g.cumint(div), g)


def solve_magnetic(u: SpectralField) -> SpectralField:
    """Per-mode Dirichlet problem d^2 f/dz^2 = -ik u, f(0) = f(Z_max) = 0.

    The same conservative Laplacian used by the implicit time steppers is
    used here, which is what makes the dissipation identity hold to
    roundoff.  The k = 0 column is identically zero.
    """
    g = u.grid
    sub, dia, sup = g.fv_laplacian()
    ab = _banded_from_tridiag(sub, dia, sup)

    m = u.modes
    if u.is3d:
        kmat = np.broadcast_to(g.kx[:, None], m.shape[:-1])
    else:
        kmat = g.kx
    flat = m.reshape(-1, g.N_z)
    k_flat = kmat.reshape(-1)

    rhs = (-1j * k_flat[:, None] * flat[:, 1:-1]).T  # interior rows, modes as columns
    f_int = solve_banded((1, 1), ab, rhs)
    f = np.zeros_like(flat)
    f[:, 1:-1] = f_int.T
    f[np.abs(k_flat) == 0.0] = 0.0
    return SpectralField(f.reshape(m.shape), g)


def dissipation_residual(u: SpectralField, f: SpectralField | None = None) -> float:
    """Relative defect of the identity (df/dx, u)_{L^2} = -|df/dz|^2_{L^2}.

    Both sides are evaluated with the discrete inner products adjoint to
    the Laplacian used in :func:`solve_magnetic`, so the residual of any
    compatible field is at roundoff level.  Returns 0 for the zero field.
    """
    g = u.grid
    if f is None:
        f = solve_magnetic(u)
    u._check_same_grid(f)
    if u.is3d:
        kx = g.kx[:, None, None]
    else:
        kx = g.kx[:, None]
    fac = u.mode_weights()
    meas = u.tangential_measure()

    fx = 1j * kx * f.modes
    per_mode = np.real(np.conj(u.modes) * fx) @ g.cell_w
    lhs = meas * float(np.sum(fac * per_mode))

    grad = g.midpoint_gradient(f.modes)
    per_mode_d = (np.abs(grad) ** 2) @ g.face_w
    rhs = meas * float(np.sum(fac * per_mode_d))

    floor = 1e-300
    if rhs == 0.0 and lhs == 0.0:
        return 0.0
    return abs(lhs + rhs) / max(rhs, floor)
