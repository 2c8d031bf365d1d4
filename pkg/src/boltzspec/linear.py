"""Fast evaluation of the collision operator linearized about a Maxwellian.

``L[f] = Q[M, f] + Q[f, M]`` costs three FFTs per radial node ``g_j``:
the gain part factors through ``r = f / M`` and two narrower Gaussians
``M^g``, ``M^h``, while the loss part reuses the binary loss weights.
Transforms follow the ``1/c_k`` convention of :mod:`boltzspec.grid`.

Dividing by ``M`` amplifies round-off where ``M`` underflows, so points with
``M / rho`` below ``epsilon`` get ``r = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .binary import CollisionKernel, _sinc, loss_weights
from .errors import DivisionUnderflow, GridMismatch, NonFiniteOutput
from .grid import VAXES, DistributionField, SpectralGrid
from .moments import MaxwellianParams, compute_moments, gaussian
from .quadrature import RadialQuadrature


@dataclass(frozen=True)
class CutoffPolicy:
    enabled: bool = True
    epsilon: float = 1e-9

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class PrecomputedTables:
    """Per-node tables on the half spectrum (``s``, ``phi``, ``omega``) and ``varphi`` in physical space."""

    grid: SpectralGrid
    rq: RadialQuadrature
    kernel: CollisionKernel
    s: np.ndarray  # (J,) + rshape
    phi: np.ndarray  # (J,) + rshape
    varphi: np.ndarray  # (J,) + shape
    omega: np.ndarray  # rshape


def precompute(grid: SpectralGrid, rq: RadialQuadrature, kernel: CollisionKernel) -> PrecomputedTables:
    if abs(rq.R - grid.R) > 1e-12 * grid.R:
        raise GridMismatch(f"radial quadrature cut-off {rq.R} differs from grid R {grid.R}")
    wb = rq.weights * kernel(rq.nodes)
    s = _sinc(np.pi * rq.nodes[:, None, None, None] * grid.rkabs / (2 * grid.L))
    phi = 32 * np.pi**2 * wb[:, None, None, None] * s
    # inverse transform of each s_j, ``ifftn(c s_j)``
    varphi = sfft.irfftn(s * grid.rc, s=grid.shape, axes=VAXES)
    omega = 16 * np.pi**2 * loss_weights(kernel, rq, grid)
    return PrecomputedTables(grid, rq, kernel, s, phi, varphi, omega)


def cutoff_ratio(f: DistributionField, params: MaxwellianParams, policy: CutoffPolicy = CutoffPolicy()) -> DistributionField:
    """``r = f / M`` where ``M / rho >= epsilon`` and zero elsewhere.

    With the policy disabled every point is divided, which overflows the
    double-precision range far from the bulk velocity.
    """
    M = gaussian(f.grid, params.rho, params.u, params.theta)
    return DistributionField(_ratio(f.values, M, np.asarray(params.rho), policy), f.grid)


def _ratio(f, M, rho, policy):
    if policy.enabled:
        keep = M >= policy.epsilon * rho.reshape(rho.shape + (1, 1, 1))
    else:
        keep = np.ones(M.shape, dtype=bool)
    if np.any(keep & (M == 0)):
        raise DivisionUnderflow("Maxwellian underflows to zero at a kept point")
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return np.where(keep, f / np.where(keep, M, 1.0), 0.0)


class LinearizedCollision:
    """``L[f]`` about a fixed set of Maxwellians.

    ``rho``, ``theta`` may have batch shape ``B`` and ``u`` shape ``B + (3,)``;
    inputs then have shape ``B + grid.shape`` and every batch entry is
    linearized about its own Maxwellian.  Everything that depends only on the
    Maxwellians is built here, so repeated applications (as in an iterative
    solver) cost ``3J + 5`` FFTs each.
    """

    def __init__(self, tables: PrecomputedTables, rho, u, theta,
                 policy: CutoffPolicy = CutoffPolicy(), mass_fix: bool = False):
        grid = tables.grid
        self.tables = tables
        self.grid = grid
        self.policy = policy
        self.mass_fix = mass_fix
        self.rho = np.asarray(rho, dtype=float)
        self.u = np.asarray(u, dtype=float)
        self.theta = np.asarray(theta, dtype=float)
        self.M = gaussian(grid, self.rho, self.u, self.theta)
        # M^g is centred at the origin, M^h at the bulk velocity.  On the
        # sphere |v| = g/2 that varphi_j concentrates on, M^g M^h equals
        # M(v + g sigma/2) M(v - g sigma/2), which fixes the 1/8 below.
        Mg = gaussian(grid, self.rho, np.zeros_like(self.u), self.theta, scale=1.0) / 8
        self.Mh = gaussian(grid, self.rho, self.u, self.theta, scale=1.0)
        self.w = sfft.irfftn(sfft.rfftn(self.M, axes=VAXES) * tables.omega, s=grid.shape, axes=VAXES)
        # transforms of M^g varphi_j do not depend on f: cache them per node.
        # The product with FFT(r) is a plain cyclic convolution; a 1/c_k
        # weight here would leave a non-decaying Nyquist component in the
        # kernel that rings against the cut-off edge of r.
        self.U = [sfft.rfftn(Mg * vp, axes=VAXES) for vp in tables.varphi]

    @classmethod
    def about(cls, params: MaxwellianParams, tables: PrecomputedTables, **kw) -> "LinearizedCollision":
        return cls(tables, params.rho, params.u, params.theta, **kw)

    def ratio(self, f: np.ndarray) -> np.ndarray:
        return _ratio(f, self.M, self.rho, self.policy)

    def __call__(self, f, workers=None) -> np.ndarray:
        fv = f.values if isinstance(f, DistributionField) else np.asarray(f, dtype=float)
        grid = self.grid
        grid.check(fv)
        t = self.tables
        rhat = sfft.rfftn(self.ratio(fv), axes=VAXES, workers=workers)
        Lhat = np.zeros(np.broadcast_shapes(rhat.shape, self.U[0].shape), dtype=complex)
        for j, U in enumerate(self.U):
            psi = sfft.irfftn(U * rhat, s=grid.shape, axes=VAXES, workers=workers)
            psi *= self.Mh
            Lhat += t.phi[j] * sfft.rfftn(psi, axes=VAXES, workers=workers)
        fhat = sfft.rfftn(fv, axes=VAXES, workers=workers)
        loss = sfft.irfftn(fhat * t.omega, s=grid.shape, axes=VAXES, workers=workers) * self.M + self.w * fv
        if self.mass_fix:
            Lhat -= sfft.rfftn(loss, axes=VAXES, workers=workers)
            mass_fix_linear(Lhat)
            out = sfft.irfftn(Lhat, s=grid.shape, axes=VAXES, workers=workers)
        else:
            out = sfft.irfftn(Lhat, s=grid.shape, axes=VAXES, workers=workers) - loss
        if not np.all(np.isfinite(out)):
            raise NonFiniteOutput("linearized collision produced non-finite values")
        return out


def mass_fix_linear(Lhat: np.ndarray) -> np.ndarray:
    """Zero the ``k = 0`` coefficient in place (FFT order) and return it."""
    Lhat[..., 0, 0, 0] = 0.0
    return Lhat


def linearized_collision(f: DistributionField, params: MaxwellianParams | None, tables: PrecomputedTables,
                         policy: CutoffPolicy = CutoffPolicy(), mass_fix: bool = False) -> DistributionField:
    """``Q[M, f] + Q[f, M]``; ``params`` default to the moments of ``f``."""
    if f.grid != tables.grid:
        raise GridMismatch("field and tables live on different grids")
    if params is None:
        params = compute_moments(f).params()
    op = LinearizedCollision.about(params, tables, policy=policy, mass_fix=mass_fix)
    return DistributionField(op(f), f.grid)
