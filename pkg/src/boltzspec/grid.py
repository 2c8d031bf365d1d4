"""Velocity grid, discrete Fourier transform conventions and field containers.

All (2N)^3 arrays, physical and spectral, are stored in standard FFT order:
position ``p`` along an axis holds the multi-index component ``k = p`` for
``p < N`` and ``k = p - 2N`` otherwise, so the Nyquist slot holds ``k = -N``.
The collocation point at position ``p`` is ``v = k L / N``.  Use
:func:`to_natural` / :func:`from_natural` to move between this layout and
the ascending ``-N, ..., N-1`` layout used for plotting.

The transform pair follows the ``1/c_k`` convention, with ``c_k = 2`` on the
``|k_i| = N`` planes:

    forward:  X_k = (1/c_k) sum_l f_l exp(-i pi k.l / N)
    inverse:  f_l = (2N)^-3 sum_{k=-N..N} X_k exp(i pi k.l / N)

Under cyclic identification the inverse sum counts each Nyquist plane
twice, so it equals ``ifftn(c * X)`` and the pair is an exact round trip.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

from .errors import GridMismatch, ImaginaryResidueExceeded

VAXES = (-3, -2, -1)
DEALIAS_FACTOR = (3.0 + np.sqrt(2.0)) / 4.0


@dataclass(frozen=True)
class SpectralGrid:
    """Cubic periodic velocity grid ``[-L, L)^3`` with ``2N`` points per axis.

    ``R`` is the cutoff on the relative speed in the collision kernel.  When
    ``L`` is omitted it is set to the smallest dealiasing-safe value
    ``(3 + sqrt 2) R / 4``.
    """

    N: int
    R: float
    L: float | None = None

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        if not self.R > 0:
            raise ValueError(f"R must be positive, got {self.R!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "R", float(self.R))
        if self.L is None:
            object.__setattr__(self, "L", DEALIAS_FACTOR * self.R)
        object.__setattr__(self, "L", float(self.L))
        if self.L < DEALIAS_FACTOR * self.R * (1 - 1e-12):
            raise ValueError(
                f"L={self.L} violates the dealiasing bound L >= (3+sqrt2)R/4 = "
                f"{DEALIAS_FACTOR * self.R}"
            )

    @property
    def n(self) -> int:
        return 2 * self.N

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n,) * 3

    @property
    def rshape(self) -> tuple[int, int, int]:
        """Shape of the half spectrum returned by ``rfftn``."""
        return (self.n, self.n, self.N + 1)

    @property
    def h(self) -> float:
        """Grid spacing ``L/N``."""
        return self.L / self.N

    @property
    def cell_volume(self) -> float:
        return self.h**3

    @cached_property
    def index(self) -> np.ndarray:
        """Integer multi-index component for each position along one axis."""
        return np.rint(np.fft.fftfreq(self.n, 1.0 / self.n)).astype(np.int64)

    @cached_property
    def rindex(self) -> np.ndarray:
        """Index along the last axis of the half spectrum: ``0..N``."""
        return np.arange(self.N + 1)

    @cached_property
    def v1d(self) -> np.ndarray:
        return self.index * self.h

    @cached_property
    def velocity(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Broadcastable velocity components ``(v1, v2, v3)``."""
        v = self.v1d
        return v[:, None, None], v[None, :, None], v[None, None, :]

    @cached_property
    def speed_sq(self) -> np.ndarray:
        v1, v2, v3 = self.velocity
        return v1**2 + v2**2 + v3**2

    @cached_property
    def kabs(self) -> np.ndarray:
        """``|k|`` on the full grid, Nyquist planes taken at ``|k_i| = N``."""
        k = self.index.astype(float)
        return np.sqrt(k[:, None, None] ** 2 + k[None, :, None] ** 2 + k[None, None, :] ** 2)

    @cached_property
    def rkabs(self) -> np.ndarray:
        """``|k|`` on the half spectrum."""
        k = self.index.astype(float)
        kr = self.rindex.astype(float)
        return np.sqrt(k[:, None, None] ** 2 + k[None, :, None] ** 2 + kr[None, None, :] ** 2)

    @cached_property
    def c1d(self) -> np.ndarray:
        return np.where(np.abs(self.index) == self.N, 2.0, 1.0)

    @cached_property
    def c(self) -> np.ndarray:
        """Nyquist weights ``c_k = c_{k1} c_{k2} c_{k3}`` on the full grid."""
        c = self.c1d
        return c[:, None, None] * c[None, :, None] * c[None, None, :]

    @cached_property
    def rc(self) -> np.ndarray:
        """Nyquist weights on the half spectrum."""
        c = self.c1d
        cr = np.where(self.rindex == self.N, 2.0, 1.0)
        return c[:, None, None] * c[None, :, None] * cr[None, None, :]

    def check(self, values: np.ndarray) -> None:
        if values.shape[-3:] != self.shape:
            raise GridMismatch(f"array of shape {values.shape} does not live on a {self.shape} grid")


@dataclass
class DistributionField:
    """Samples ``f(v_k)`` on the collocation points, FFT-ordered.

    ``values`` may carry leading batch axes, e.g. one field per spatial cell.
    """

    values: np.ndarray
    grid: SpectralGrid
    imag_residue: float = field(default=0.0, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.grid.check(self.values)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


@dataclass
class FourierField:
    """Coefficients ``X_k`` of the forward transform, FFT-ordered."""

    coeffs: np.ndarray
    grid: SpectralGrid

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        self.grid.check(self.coeffs)


def forward_dft(field: DistributionField) -> FourierField:
    """``X_k = (1/c_k) sum_l f_l exp(-i pi k.l/N)`` for ``k = -N..N-1``."""
    grid = field.grid
    return FourierField(sfft.fftn(field.values, axes=VAXES) / grid.c, grid)


def inverse_dft(coeffs: FourierField, threshold: float = 1e-8) -> DistributionField:
    """Inverse of :func:`forward_dft`; returns the real part.

    The largest imaginary magnitude relative to the largest real magnitude is
    stored on the result as ``imag_residue``.  Exceeding ``threshold`` raises
    :class:`ImaginaryResidueExceeded`: a real field always has Hermitian
    coefficients, so a large residue points at a broken symmetry upstream.
    """
    grid = coeffs.grid
    x = sfft.ifftn(coeffs.coeffs * grid.c, axes=VAXES)
    scale = np.max(np.abs(x.real)) if x.size else 0.0
    residue = float(np.max(np.abs(x.imag)) / scale) if scale > 0 else float(np.max(np.abs(x.imag), initial=0.0))
    if residue > threshold:
        raise ImaginaryResidueExceeded(f"imaginary residue {residue:.3e} exceeds {threshold:.1e}")
    return DistributionField(x.real.copy(), grid, imag_residue=residue)


def to_natural(values: np.ndarray) -> np.ndarray:
    """FFT order -> ascending ``-N..N-1`` order along the velocity axes."""
    return np.fft.fftshift(values, axes=VAXES)


def from_natural(values: np.ndarray) -> np.ndarray:
    return np.fft.ifftshift(values, axes=VAXES)


def position_of(k: int, N: int) -> int:
    """Array position holding the cyclic multi-index component ``k``."""
    return int(k) % (2 * N)


def multi_index(k, N: int) -> tuple[int, int, int]:
    return tuple(position_of(ki, N) for ki in k)


def l2_norm(values: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """``sqrt((L/N)^3 sum_k |f_k|^2)`` over the velocity axes."""
    return np.sqrt(grid.cell_volume * np.sum(np.abs(values) ** 2, axis=VAXES))


def integrate(values: np.ndarray, grid: SpectralGrid) -> np.ndarray:
    """Collocation-sum quadrature ``(L/N)^3 sum_k f_k``."""
    return grid.cell_volume * np.sum(values, axis=VAXES)
