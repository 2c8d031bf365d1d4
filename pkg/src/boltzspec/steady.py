"""Steady 1D3V Boltzmann equation ``v1 df/dx = Q[f, f] / Kn`` between diffuse walls.

First-order upwind finite volumes in ``x``; the spectral grid in ``v``.
The nonlinear system is solved by a modified Newton method whose Jacobian
uses the linearization about each cell's local Maxwellian, so the binary
operator is evaluated once per cell per Newton step.  The correction
equation

    T g - L[g] / Kn = r,      T = upwind transport,

is solved by source iteration: the collision part is lagged, shifted by
``nu = rho`` for stability, and the remaining pure-transport problem is
solved exactly by sweeping along each velocity's characteristic direction.
"""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .binary import BinaryCollision, CollisionKernel, ConservationFix
from .errors import DegenerateFlux, NonConvergence
from .grid import DistributionField, SpectralGrid
from .linear import CutoffPolicy, LinearizedCollision, precompute
from .moments import MomentSet, compute_moments, gaussian
from .quadrature import make_hemisphere_quadrature, make_radial_quadrature

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WallState:
    """Diffuse wall moving tangentially with velocity ``u`` at temperature ``theta``."""

    u: tuple = (0.0, 0.0, 0.0)
    theta: float = 1.0

    def __post_init__(self):
        u = tuple(float(x) for x in np.asarray(self.u, dtype=float).reshape(3))
        object.__setattr__(self, "u", u)
        if u[0] != 0.0:
            raise ValueError("wall velocity must have zero normal component")
        if not self.theta > 0:
            raise ValueError("wall temperature must be positive")


def default_cutoff(theta_max: float) -> float:
    """Kernel cut-off ``R`` suited to the hottest wall."""
    return 3.5 if theta_max <= 2.0 else 4.0


@dataclass
class SteadyProblem:
    Kn: float
    wall_L: WallState = field(default_factory=WallState)
    wall_R: WallState = field(default_factory=WallState)
    x_L: float = -0.5
    x_R: float = 0.5
    Nx: int = 200
    C: float = 1.0
    N: int = 16
    R: float | None = None
    M: int = 25  # hemisphere points for the binary residual
    kernel: CollisionKernel = field(default_factory=CollisionKernel.maxwell)
    fix: ConservationFix = ConservationFix.NONE
    cutoff: CutoffPolicy = field(default_factory=CutoffPolicy)
    outer_res: float = 1e-5
    inner_abs: float = 1e-7
    inner_rel: float = 1e-3
    max_newton: int = 20
    max_inner: int = 500
    chunk: int = 25  # cells per batched collision evaluation

    def __post_init__(self):
        self.fix = ConservationFix.parse(self.fix)
        if not self.x_L < self.x_R:
            raise ValueError("need x_L < x_R")
        if not (self.Kn > 0 and self.Nx >= 1 and self.C > 0):
            raise ValueError("need Kn > 0, Nx >= 1 and C > 0")
        if self.R is None:
            self.R = default_cutoff(max(self.wall_L.theta, self.wall_R.theta))

    @classmethod
    def couette(cls, u_w: float, Kn: float, **kw) -> "SteadyProblem":
        return cls(Kn, WallState((0, -u_w, 0), 1.0), WallState((0, u_w, 0), 1.0), **kw)

    @classmethod
    def fourier(cls, theta_R: float, Kn: float, theta_L: float = 1.0, **kw) -> "SteadyProblem":
        return cls(Kn, WallState((0, 0, 0), theta_L), WallState((0, 0, 0), theta_R), **kw)

    @property
    def dx(self) -> float:
        return (self.x_R - self.x_L) / self.Nx

    @property
    def x(self) -> np.ndarray:
        return self.x_L + (np.arange(self.Nx) + 0.5) * self.dx

    def grid(self) -> SpectralGrid:
        return SpectralGrid(self.N, self.R)


@dataclass
class SolverReport:
    newton_iterations: int = 0
    residuals: list = field(default_factory=list)  # outer L2 residual per Newton step
    inner_histories: list = field(default_factory=list)  # relative inner residuals per Newton step
    inner_capped: list = field(default_factory=list)  # True where the inner cap was hit
    negative_sources: list = field(default_factory=list)  # count of L[g] + nu g < 0 entries
    binary_seconds: float = 0.0
    inner_seconds: float = 0.0
    total_seconds: float = 0.0

    @property
    def binary_fraction(self) -> float:
        return self.binary_seconds / self.total_seconds if self.total_seconds else 0.0


def initial_guess(problem: SteadyProblem, grid: SpectralGrid | None = None) -> np.ndarray:
    """Uniform density, zero velocity, temperature blended linearly between the walls.

    Each cell is scaled to collocation density ``C / (x_R - x_L)``, so the
    discrete total mass is ``C`` even where the Maxwellian tail is cut off.
    """
    grid = grid or problem.grid()
    span = problem.x_R - problem.x_L
    x = problem.x
    theta = ((problem.x_R - x) * problem.wall_L.theta + (x - problem.x_L) * problem.wall_R.theta) / span
    f = gaussian(grid, np.ones(problem.Nx), np.zeros((problem.Nx, 3)), theta)
    f *= (problem.C / span) / (grid.cell_volume * f.sum(axis=(1, 2, 3)))[:, None, None, None]
    return f


def _v1(grid: SpectralGrid) -> np.ndarray:
    """Transport velocity ``v1`` per grid plane, shape ``(2N, 1, 1)``.

    The Nyquist plane ``v1 = -L`` stands for both ``+-L`` of the periodic
    grid and has no mirror point, so it is given zero transport speed like
    the ``v1 = 0`` plane.  This keeps the discrete scheme symmetric under
    ``(x, v1) -> (-x, -v1)``.
    """
    v1 = grid.velocity[0].copy()
    v1[grid.N] = 0.0
    return v1


def wall_ghost(boundary: np.ndarray, wall: WallState, side: str, grid: SpectralGrid,
               check: bool = True) -> np.ndarray:
    """Ghost-cell values: the wall Maxwellian whose density cancels the discrete wall flux.

    ``side`` is ``"left"`` or ``"right"``.  The density is fixed by
    ``sum_k v1 f_k = 0`` over the merged state (ghost values for velocities
    leaving the wall, interior values for velocities hitting it), so the
    zero-flux condition holds to rounding.  ``check`` rejects a non-positive
    outgoing flux, which only makes sense for a distribution, not for a
    Newton correction.
    """
    v1 = _v1(grid)
    unit = gaussian(grid, 1.0, wall.u, wall.theta)
    if side == "left":
        outgoing = -np.sum(np.minimum(v1, 0) * boundary)
        incoming = np.sum(np.maximum(v1, 0) * unit)
    elif side == "right":
        outgoing = np.sum(np.maximum(v1, 0) * boundary)
        incoming = -np.sum(np.minimum(v1, 0) * unit)
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    if check and not outgoing > 0:
        raise DegenerateFlux(f"outgoing flux at the {side} wall is {outgoing:.3e}")
    return (outgoing / incoming) * unit


class SteadySolver:
    """Holds the operators, tables and upwind data for one :class:`SteadyProblem`."""

    def __init__(self, problem: SteadyProblem):
        self.problem = p = problem
        self.grid = g = problem.grid()
        rq = make_radial_quadrature(p.N, p.R)
        self.binary = BinaryCollision(g, p.kernel, rq, make_hemisphere_quadrature(p.M), p.fix)
        self.tables = precompute(g, rq, p.kernel)
        v1 = _v1(g)
        self.vplus = np.maximum(v1, 0)
        self.vminus = np.minimum(v1, 0)
        # velocity-axis slices in FFT order: 0 and N (Nyquist) are not transported,
        # 1..N-1 -> v1 > 0, N+1..2N-1 -> v1 < 0
        self.pos = slice(1, p.N)
        self.neg = slice(p.N + 1, 2 * p.N)
        self.still = [0, p.N]
        self.speed = np.abs(v1)[:, :1, :1] / p.dx

    # -- pieces of the discrete equations -------------------------------------------------
    def ghosts(self, f, check=True):
        p = self.problem
        return (wall_ghost(f[0], p.wall_L, "left", self.grid, check),
                wall_ghost(f[-1], p.wall_R, "right", self.grid, check))

    def transport(self, f, check=True) -> np.ndarray:
        gl, gr = self.ghosts(f, check)
        fm = np.concatenate([gl[None], f[:-1]])
        fp = np.concatenate([f[1:], gr[None]])
        return (self.vplus * (f - fm) + self.vminus * (fp - f)) / self.problem.dx

    def norm(self, r) -> float:
        return float(np.sqrt(self.problem.dx * self.grid.cell_volume * np.sum(r * r)))

    def collide(self, f) -> np.ndarray:
        c = self.problem.chunk
        return np.concatenate([self.binary(f[i:i + c]) for i in range(0, len(f), c)])

    def residual(self, f):
        r = self.transport(f) - self.collide(f) / self.problem.Kn
        return r, self.norm(r)

    def linearization(self, moments: MomentSet, mass_fix: bool = True):
        """Per-cell ``L`` about the cells' Maxwellians, batched in chunks.

        ``mass_fix`` drops the zero mode of each cell's ``L[g]``.  Transport
        with flux-balanced ghosts already conserves mass exactly, so the
        correction equation is singular along one mass-carrying direction;
        a mass-leaking ``L`` turns that into a slowly decaying mode that
        stalls source iteration on small velocity domains.
        """
        c = self.problem.chunk
        ops = [
            LinearizedCollision(self.tables, moments.rho[i:i + c], moments.u[i:i + c], moments.theta[i:i + c],
                                policy=self.problem.cutoff, mass_fix=mass_fix)
            for i in range(0, len(moments.rho), c)
        ]
        return lambda g: np.concatenate([op(g[k * c:(k + 1) * c]) for k, op in enumerate(ops)])

    def sweep(self, rhs, nu, gl, gr) -> np.ndarray:
        """Solve ``T g + (nu/Kn) g = rhs`` exactly with given ghost values."""
        Kn = self.problem.Kn
        g = np.empty_like(rhs)
        s = self.speed
        damp = nu / Kn
        for i in self.still:
            g[:, i] = rhs[:, i] / damp[:, None, None]
        pos, neg = self.pos, self.neg
        prev = gl[pos]
        for j in range(len(rhs)):
            prev = (rhs[j, pos] + s[pos] * prev) / (s[pos] + damp[j])
            g[j, pos] = prev
        prev = gr[neg]
        for j in range(len(rhs) - 1, -1, -1):
            prev = (rhs[j, neg] + s[neg] * prev) / (s[neg] + damp[j])
            g[j, neg] = prev
        return g


    def wall_responses(self, nu) -> tuple[np.ndarray, np.ndarray]:
        """Sweeps of zero data driven by unit wall Maxwellians at the left and right walls."""
        p = self.problem
        zero = np.zeros((p.Nx,) + self.grid.shape)
        unit_l = gaussian(self.grid, 1.0, p.wall_L.u, p.wall_L.theta)
        unit_r = gaussian(self.grid, 1.0, p.wall_R.u, p.wall_R.theta)
        return (self.sweep(zero, nu, unit_l, np.zeros_like(unit_r)),
                self.sweep(zero, nu, np.zeros_like(unit_l), unit_r))

    def sweep_with_walls(self, rhs, nu, responses) -> np.ndarray:
        """Solve ``T g + (nu/Kn) g = rhs`` with the diffuse-wall ghosts of ``g`` itself.

        The sweep is affine in the two ghost densities, and each density is
        fixed by the outgoing flux at its wall, which in turn depends on the
        other density through the sweep.  That 2x2 system is solved exactly,
        so the result satisfies the wall conditions of the discrete problem.
        """
        p = self.problem
        resp_l, resp_r = responses
        zero = np.zeros(self.grid.shape)
        g = self.sweep(rhs, nu, zero, zero)
        inc_l = np.sum(self.vplus * gaussian(self.grid, 1.0, p.wall_L.u, p.wall_L.theta))
        inc_r = -np.sum(self.vminus * gaussian(self.grid, 1.0, p.wall_R.u, p.wall_R.theta))
        # rho_l = a + b rho_r, rho_r = c + d rho_l
        a = -np.sum(self.vminus * g[0]) / inc_l
        b = -np.sum(self.vminus * resp_r[0]) / inc_l
        c = np.sum(self.vplus * g[-1]) / inc_r
        d = np.sum(self.vplus * resp_l[-1]) / inc_r
        rho_l = (a + b * c) / (1 - b * d)
        rho_r = c + d * rho_l
        return g + rho_l * resp_l + rho_r * resp_r


def residual(f: np.ndarray, problem: SteadyProblem, solver: SteadySolver | None = None):
    """Upwind residual field and its discrete L2 norm ``sqrt(dx (L/N)^3 sum r^2)``."""
    solver = solver or SteadySolver(problem)
    return solver.residual(f)


def source_iteration_solve(f: np.ndarray, r: np.ndarray, problem: SteadyProblem,
                           solver: SteadySolver | None = None, report: SolverReport | None = None) -> np.ndarray:
    """Newton correction ``g`` from ``T g - L[g]/Kn = r`` by source iteration.

    ``L`` is linearized about each cell's Maxwellian in its mass-conserving
    form; ``nu`` is the cell density.  Each sweep satisfies the wall
    conditions of ``g`` exactly (see :meth:`SteadySolver.sweep_with_walls`).  The total-mass component of ``r`` (a defect of
    the binary operator, invisible to the left-hand side) is removed first;
    the Newton step restores the mass constraint anyway.  Stops at
    ``inner_abs`` absolute or ``inner_rel`` relative residual, or at
    ``max_inner`` iterations (flagged in ``report``).
    """
    solver = solver or SteadySolver(problem)
    Kn = problem.Kn
    moments = compute_moments(DistributionField(f, solver.grid))
    lin = solver.linearization(moments)
    nu = moments.rho
    nu_b = nu[:, None, None, None]
    r0 = solver.norm(r)
    r = r - (np.sum(r) / np.sum(f)) * f
    responses = solver.wall_responses(nu)
    g = np.zeros_like(f)
    Lg = np.zeros_like(f)
    history = []
    capped = True
    negatives = 0
    if r0 == 0:
        capped = False
    else:
        for _ in range(problem.max_inner):
            source = Lg + nu_b * g
            negatives = int(np.count_nonzero(source < 0))
            g = solver.sweep_with_walls(source / Kn + r, nu, responses)
            Lg = lin(g)
            res = solver.norm(solver.transport(g, check=False) - Lg / Kn - r)
            history.append(res / r0)
            if res <= problem.inner_abs or res <= problem.inner_rel * r0:
                capped = False
                break
    if report is not None:
        report.inner_histories.append(history)
        report.inner_capped.append(capped)
        report.negative_sources.append(negatives)
    if capped:
        log.warning("inner iteration hit the cap of %d iterations", problem.max_inner)
    return g


def total_mass(f: np.ndarray, problem: SteadyProblem, grid: SpectralGrid) -> float:
    return float(problem.dx * grid.cell_volume * np.sum(f))


def newton_solve(problem: SteadyProblem, f0: np.ndarray | None = None, callback=None):
    """Modified Newton iteration; returns ``(f, report)``.

    ``newton_iterations`` counts updates ``f <- f - g``, so a start that
    already meets ``outer_res`` reports zero.  Raises
    :class:`NonConvergence` (with the report and last iterate attached)
    after ``max_newton`` updates.
    """
    solver = SteadySolver(problem)
    grid = solver.grid
    report = SolverReport()
    f = initial_guess(problem, grid) if f0 is None else np.array(f0, dtype=float)
    start = time.perf_counter()
    while True:
        t0 = time.perf_counter()
        r, rnorm = solver.residual(f)
        report.binary_seconds += time.perf_counter() - t0
        report.residuals.append(rnorm)
        log.info("newton %d residual %.3e", report.newton_iterations, rnorm)
        if callback is not None:
            callback(report)
        if rnorm < problem.outer_res:
            break
        if report.newton_iterations >= problem.max_newton:
            report.total_seconds = time.perf_counter() - start
            raise NonConvergence(f"no convergence after {problem.max_newton} Newton steps", report, f)
        t0 = time.perf_counter()
        g = source_iteration_solve(f, r, problem, solver, report)
        report.inner_seconds += time.perf_counter() - t0
        f = f - g
        f *= problem.C / total_mass(f, problem, grid)
        report.newton_iterations += 1
    report.total_seconds = time.perf_counter() - start
    return f, report


def profile_moments(f: np.ndarray, grid: SpectralGrid) -> MomentSet:
    """Per-cell moments (arrays over cells).

    Nyquist values are split between ``+-L``, matching the zero transport
    speed of that plane, so the profiles respect the reflection symmetry of
    the slab problems.
    """
    return compute_moments(DistributionField(f, grid), split_nyquist=True)


__all__ = [
    "SolverReport", "SteadyProblem", "SteadySolver", "WallState", "default_cutoff", "initial_guess",
    "newton_solve", "profile_moments", "residual", "source_iteration_solve", "total_mass", "wall_ghost",
]
