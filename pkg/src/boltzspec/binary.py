"""Fast spectral evaluation of the quadratic collision operator.

With ``D = fftn(f)`` and the radial/hemisphere rules ``(g_j, w_j)``,
``(sigma_m, w_m)`` the scheme reads, in physical space,

    Q[f,f] = 16 pi^2 [ sum_j w_j B(g_j) S_j * P_j  -  f * (W * f) ]

where ``S_j`` multiplies by ``sinc(pi g_j |k| / 2L)`` in Fourier space,
``W`` by the radial loss weights, and

    P_j = sum_m w_m  f(. + g_j sigma_m / 2) f(. - g_j sigma_m / 2).

The shifted copies are exact translations of the trigonometric interpolant
(phase factors ``exp(+-i pi g sigma.k / 2L)``), so each ``(j, m)`` pair costs
two inverse real FFTs.  On Nyquist planes the phase is replaced by its
``+-N`` average ``cos``; that keeps every field real and reproduces the
cyclic double-products of the coefficient-space formula.

The kernel is always truncated at ``g = R``; the untruncated Fourier
representation holds only formally.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .errors import GridMismatch, NonFiniteOutput
from .grid import VAXES, DistributionField, SpectralGrid
from .quadrature import RadialQuadrature, SphericalQuadrature

FOUR_PI = 4 * np.pi


@dataclass(frozen=True)
class CollisionKernel:
    """Variable-hard-sphere kernel ``B(g) = C g^{2(1-omega)}``."""

    C: float = 1 / FOUR_PI
    omega: float = 1.0

    def __post_init__(self):
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not 0.5 <= self.omega <= 1.0:
            raise ValueError("omega must lie in [1/2, 1]")

    def __call__(self, g):
        g = np.asarray(g, dtype=float)
        if self.omega == 1.0:
            return np.full_like(g, self.C)
        return self.C * g ** (2 * (1 - self.omega))

    @classmethod
    def maxwell(cls) -> "CollisionKernel":
        return cls(1 / FOUR_PI, 1.0)

    @classmethod
    def argon(cls) -> "CollisionKernel":
        """``g^0.56 / 4 pi``, viscosity index 0.72."""
        return cls(1 / FOUR_PI, 0.72)


class ConservationFix(enum.Enum):
    NONE = "none"
    ZERO = "zero"  # zero the k = 0 coefficient after assembly
    SINC = "sinc"  # quadrature-consistent loss weights

    @classmethod
    def parse(cls, value) -> "ConservationFix":
        if isinstance(value, cls):
            return value
        if value is None:
            return cls.NONE
        return cls(str(value).lower())


def _nyquist_phase(grid: SpectralGrid, shift: np.ndarray, last_axis: bool) -> list:
    """1-D factors ``exp(i pi shift_i k / L)`` with Nyquist entries replaced by ``cos``."""
    out = []
    for i in range(3):
        k = grid.rindex if (last_axis and i == 2) else grid.index
        a = np.pi * shift[..., i, None] / grid.L
        ph = np.exp(1j * a * k)
        ph = np.where(np.abs(k) == grid.N, np.cos(a * grid.N), ph)
        out.append(ph)
    return out


def _outer(p1, p2, p3):
    return p1[..., :, None, None] * p2[..., None, :, None] * p3[..., None, None, :]


def _sinc(x):
    return np.sinc(x / np.pi)


def loss_weights(kernel: CollisionKernel, rq: RadialQuadrature, grid: SpectralGrid,
                 sq: SphericalQuadrature | None = None, fix=ConservationFix.NONE) -> np.ndarray:
    """Radial loss sum ``sum_j w_j B(g_j) sinc(pi g_j |l| / L)`` on the half spectrum.

    With ``fix = SINC`` the sinc is swapped for its hemisphere quadrature
    ``sum_m w_m cos(pi g_j sigma_m . l / L)``, which needs ``sq``.  The
    cosine is built as the square of the half-shift phase used by the gain
    term, so on Nyquist planes it becomes ``cos^2`` and the zero mode of the
    gain and loss parts cancel exactly.
    """
    fix = ConservationFix.parse(fix)
    wb = rq.weights * kernel(rq.nodes)
    if fix is not ConservationFix.SINC:
        x = np.pi * rq.nodes[:, None, None, None] * grid.rkabs / grid.L
        return np.tensordot(wb, _sinc(x), axes=1)
    if sq is None:
        raise ValueError("the sinc replacement needs a hemisphere quadrature")
    out = np.zeros(grid.rshape)
    for gj, wj in zip(rq.nodes, wb):
        shifts = 0.5 * gj * sq.nodes  # (M, 3)
        p = [ph**2 for ph in _nyquist_phase(grid, shifts, last_axis=True)]
        acc = np.tensordot(sq.weights, _outer(*p).real, axes=1)
        out += wj * acc
    return out


@dataclass
class BinaryCollision:
    """Quadratic collision operator bound to a grid, kernel and quadratures.

    Loss weights, radial sinc factors and phase tables are built once and
    reused; instances are safe to share between threads once constructed.
    """

    grid: SpectralGrid
    kernel: CollisionKernel
    rq: RadialQuadrature
    sq: SphericalQuadrature
    fix: ConservationFix = ConservationFix.NONE

    def __post_init__(self):
        self.fix = ConservationFix.parse(self.fix)
        if abs(self.rq.R - self.grid.R) > 1e-12 * self.grid.R:
            raise GridMismatch(f"radial quadrature cut-off {self.rq.R} differs from grid R {self.grid.R}")
        grid = self.grid
        self.wb = self.rq.weights * self.kernel(self.rq.nodes)
        self.loss = loss_weights(self.kernel, self.rq, grid, self.sq, self.fix)
        x = np.pi * self.rq.nodes[:, None, None, None] * grid.rkabs / (2 * grid.L)
        self.gain_filter = self.wb[:, None, None, None] * _sinc(x)  # (J, rshape)
        # phase factors per (j, m), kept as 1-D arrays to save memory
        shifts = 0.5 * self.rq.nodes[:, None, None] * self.sq.nodes[None, :, :]  # (J, M, 3)
        self.phases = _nyquist_phase(grid, shifts, last_axis=True)

    def _check(self, f) -> np.ndarray:
        values = f.values if isinstance(f, DistributionField) else np.asarray(f, dtype=float)
        if isinstance(f, DistributionField) and f.grid != self.grid:
            raise GridMismatch("field lives on a different grid")
        self.grid.check(values)
        return values

    def _shifted_pair(self, D, j, m, buf, workers):
        """``f(. + s)`` and ``f(. - s)`` for the shift ``s = g_j sigma_m / 2``; ``buf`` is scratch like ``D``."""
        p1, p2, p3 = self.phases
        ph = _outer(p1[j, m], p2[j, m], p3[j, m])
        shape = self.grid.shape
        np.multiply(D, ph, out=buf)
        fa = sfft.irfftn(buf, s=shape, axes=VAXES, workers=workers, overwrite_x=True)
        np.multiply(D, ph.conj(), out=buf)
        fb = sfft.irfftn(buf, s=shape, axes=VAXES, workers=workers, overwrite_x=True)
        return fa, fb

    def _finish(self, Qhat, workers):
        if self.fix is ConservationFix.ZERO:
            Qhat[..., 0, 0, 0] = 0.0
        return sfft.irfftn(Qhat, s=self.grid.shape, axes=VAXES, workers=workers)

    def __call__(self, f, workers=None) -> np.ndarray:
        """``Q[f, f]`` at the collocation points; ``f`` may be batched."""
        fv = self._check(f)
        D = sfft.rfftn(fv, axes=VAXES, workers=workers)
        gain = np.zeros_like(D)
        buf = np.empty_like(D)
        for j in range(self.rq.J):
            P = np.zeros_like(fv)
            for m in range(self.sq.M):
                fa, fb = self._shifted_pair(D, j, m, buf, workers)
                fa *= fb
                fa *= self.sq.weights[m]
                P += fa
            gain += self.gain_filter[j] * sfft.rfftn(P, axes=VAXES, workers=workers)
        lossfield = sfft.irfftn(D * self.loss, s=self.grid.shape, axes=VAXES, workers=workers)
        Qhat = gain - sfft.rfftn(fv * lossfield, axes=VAXES, workers=workers)
        out = 16 * np.pi**2 * self._finish(Qhat, workers)
        if not np.all(np.isfinite(out)):
            raise NonFiniteOutput("binary collision produced non-finite values")
        return out

    def pair(self, f, g, workers=None) -> np.ndarray:
        """``Q[f, g] + Q[g, f]``; equals ``2 Q[f, f]`` when ``g = f``."""
        fv, gv = self._check(f), self._check(g)
        Df = sfft.rfftn(fv, axes=VAXES, workers=workers)
        Dg = sfft.rfftn(gv, axes=VAXES, workers=workers)
        gain = np.zeros_like(Df)
        buf_f, buf_g = np.empty_like(Df), np.empty_like(Dg)
        for j in range(self.rq.J):
            P = np.zeros(np.broadcast_shapes(fv.shape, gv.shape))
            for m in range(self.sq.M):
                fa, fb = self._shifted_pair(Df, j, m, buf_f, workers)
                ga, gb = self._shifted_pair(Dg, j, m, buf_g, workers)
                P += self.sq.weights[m] * (fa * gb + fb * ga)
            gain += self.gain_filter[j] * sfft.rfftn(P, axes=VAXES, workers=workers)
        lf = sfft.irfftn(Df * self.loss, s=self.grid.shape, axes=VAXES, workers=workers)
        lg = sfft.irfftn(Dg * self.loss, s=self.grid.shape, axes=VAXES, workers=workers)
        Qhat = gain - sfft.rfftn(fv * lg + gv * lf, axes=VAXES, workers=workers)
        out = 16 * np.pi**2 * self._finish(Qhat, workers)
        if not np.all(np.isfinite(out)):
            raise NonFiniteOutput("binary collision produced non-finite values")
        return out


def binary_collision(f: DistributionField, kernel, rq, sq, fix=ConservationFix.NONE) -> DistributionField:
    op = BinaryCollision(f.grid, kernel, rq, sq, fix)
    return DistributionField(op(f), f.grid)


def binary_collision_pair(f: DistributionField, g: DistributionField, kernel, rq, sq,
                          fix=ConservationFix.NONE) -> DistributionField:
    if f.grid != g.grid:
        raise GridMismatch("f and g live on different grids")
    op = BinaryCollision(f.grid, kernel, rq, sq, fix)
    return DistributionField(op.pair(f, g), f.grid)
