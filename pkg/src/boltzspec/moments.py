"""Moments, Maxwellians and the two standard test distributions."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NonpositiveDensity
from .grid import VAXES, DistributionField, FourierField, SpectralGrid


@dataclass(frozen=True)
class MaxwellianParams:
    """Density, bulk velocity and temperature of a Maxwellian."""

    rho: float
    u: tuple = (0.0, 0.0, 0.0)
    theta: float = 1.0

    def __post_init__(self):
        u = tuple(float(x) for x in np.asarray(self.u, dtype=float).reshape(3))
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "theta", float(self.theta))
        if not self.rho > 0:
            raise NonpositiveDensity(f"rho must be positive, got {self.rho}")
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")


STANDARD = MaxwellianParams(1.0, (0.0, 0.0, 0.0), 1.0)


@dataclass(frozen=True)
class MomentSet:
    rho: np.ndarray
    u: np.ndarray  # (..., 3)
    theta: np.ndarray
    q: np.ndarray  # (..., 3)
    p: np.ndarray  # (..., 3, 3)

    def params(self, index=()) -> MaxwellianParams:
        """Maxwellian parameters of one entry (``index`` picks a batch element)."""
        return MaxwellianParams(self.rho[index], self.u[index], self.theta[index])


def compute_moments(field: DistributionField, check: bool = True, split_nyquist: bool = False) -> MomentSet:
    """Collocation-sum moments ``(L/N)^3 sum_k``; works on batched fields.

    ``theta`` is defined as ``trace(p) / (3 rho)``, so that identity is exact.
    With ``split_nyquist`` each value on a Nyquist plane is shared equally
    between ``-L`` and ``+L``, the two velocities that point stands for on
    the periodic grid; the moments are then exactly covariant under
    ``v -> -v``.
    """
    grid = field.grid
    f = field.values
    dv = grid.cell_volume
    v = grid.velocity
    if split_nyquist:
        f, v = _split_nyquist(f, grid)
    rho = dv * f.sum(axis=VAXES)
    if check and np.any(rho <= 0):
        raise NonpositiveDensity(f"nonpositive density {np.min(rho):.3e}")
    mom = np.stack([dv * (f * vi).sum(axis=VAXES) for vi in v], axis=-1)
    u = mom / rho[..., None]
    # centred velocities, broadcast against the batch axes
    c = [vi - u[..., i].reshape(u.shape[:-1] + (1, 1, 1)) for i, vi in enumerate(v)]
    p = np.empty(rho.shape + (3, 3))
    for a in range(3):
        for b in range(a, 3):
            p[..., a, b] = p[..., b, a] = dv * (f * c[a] * c[b]).sum(axis=VAXES)
    theta = np.trace(p, axis1=-2, axis2=-1) / (3 * rho)
    csq = c[0] ** 2 + c[1] ** 2 + c[2] ** 2
    q = np.stack([0.5 * dv * (f * csq * ci).sum(axis=VAXES) for ci in c], axis=-1)
    return MomentSet(rho=rho, u=u, theta=theta, q=q, p=p)


def _split_nyquist(f: np.ndarray, grid: SpectralGrid):
    """Append a ``+L`` plane per velocity axis holding half of the ``-L`` plane."""
    N = grid.N
    for ax in VAXES:
        nyq = 0.5 * np.take(f, [N], axis=ax)
        f = np.concatenate([f, nyq], axis=ax)
        idx = [slice(None)] * f.ndim
        idx[ax] = slice(N, N + 1)
        f[tuple(idx)] = nyq
    v1d = np.append(grid.v1d, grid.L)
    v = tuple(v1d.reshape([-1 if i == a else 1 for i in range(3)]) for a in range(3))
    return f, v


def gaussian(grid: SpectralGrid, rho, u, theta, scale: float = 2.0) -> np.ndarray:
    """``rho / (scale pi theta)^{3/2} exp(-|v-u|^2 / (scale theta))`` on the grid.

    ``rho``, ``theta`` may be arrays of batch shape and ``u`` of shape
    ``batch + (3,)``; the result then has shape ``batch + grid.shape``.
    """
    rho = np.asarray(rho, dtype=float)
    theta = np.asarray(theta, dtype=float)
    u = np.asarray(u, dtype=float)
    ext = rho.shape + (1, 1, 1)
    rho_, th_ = rho.reshape(ext), theta.reshape(ext)
    d2 = sum((vi - u[..., i].reshape(ext)) ** 2 for i, vi in enumerate(grid.velocity))
    return rho_ / (scale * np.pi * th_) ** 1.5 * np.exp(-d2 / (scale * th_))


def maxwellian_field(params: MaxwellianParams, grid: SpectralGrid) -> DistributionField:
    return DistributionField(gaussian(grid, params.rho, params.u, params.theta), grid)


def maxwellian_fourier(params: MaxwellianParams, grid: SpectralGrid) -> FourierField:
    """Closed-form continuous Fourier coefficients of the Maxwellian.

    Coefficients use the physical scaling ``int M(v) exp(-i pi l.v / L) dv``,
    so ``l = 0`` gives ``rho``.  On the Nyquist planes the two aliases
    ``+-N`` are averaged, which turns the shift phase into a cosine and
    matches what :func:`forward_dft` (times ``(L/N)^3``) produces there.
    """
    k = grid.index.astype(float)
    factors = []
    for ui in params.u:
        phase = np.exp(-1j * np.pi * k * ui / grid.L)
        phase = np.where(np.abs(grid.index) == grid.N, np.cos(np.pi * grid.N * ui / grid.L), phase)
        factors.append(phase * np.exp(-np.pi**2 * params.theta * k**2 / (2 * grid.L**2)))
    coeffs = params.rho * factors[0][:, None, None] * factors[1][None, :, None] * factors[2][None, None, :]
    return FourierField(coeffs, grid)


class Distribution(enum.Enum):
    F1 = 1
    F2 = 2


F1_SHIFT = np.sqrt(2.0)
F1_VARTHETA = 1.0 / 3.0


def test_distribution(which, grid: SpectralGrid, tie: str = "average") -> DistributionField:
    """Sample ``F1`` (four-bump Gaussian mixture) or ``F2`` (split at ``v1 = 0``).

    Both have zero bulk velocity and unit temperature.  ``F2`` jumps across
    ``v1 = 0``, a plane that holds grid points.  ``tie="average"`` (default)
    stores the mean of the two one-sided limits there, which is what the
    trapezoid rule needs to recover unit density; ``tie="positive"`` takes the
    ``v1 > 0`` branch instead.
    """
    if tie not in ("average", "positive"):
        raise ValueError(f"tie must be 'average' or 'positive', got {tie!r}")
    which = Distribution[which] if isinstance(which, str) else Distribution(which)
    v1, v2, v3 = grid.velocity
    if which is Distribution.F1:
        u, t = F1_SHIFT, F1_VARTHETA
        total = (
            np.exp(-((v1 + u) ** 2 + v2**2 + v3**2) / (2 * t))
            + np.exp(-((v1 - u) ** 2 + v2**2 + v3**2) / (2 * t))
            + np.exp(-(v1**2 + (v2 + u) ** 2 + v3**2) / (2 * t))
            + np.exp(-(v1**2 + (v2 - u) ** 2 + v3**2) / (2 * t))
        )
        return DistributionField(total / (4 * np.pi**1.5), grid)
    a = 2**0.25 * (2 - np.sqrt(2.0)) / np.pi**1.5
    s2 = np.sqrt(2.0)
    vsq = grid.speed_sq
    right = a * np.exp(-vsq / s2)
    left = a / 4 * np.exp(-vsq / (2 * s2))
    values = np.where(v1 >= 0, right, left)
    if tie == "average":
        values = np.where(v1 == 0, 0.5 * (right + left), values)
    return DistributionField(values, grid)
