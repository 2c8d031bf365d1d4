"""Radial Gauss-Radau rule with weight g^2 and hemisphere rules from Lebedev grids."""
from __future__ import annotations

from dataclasses import dataclass
from math import gamma

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import ConvergenceFailure, UnsupportedOrder


@dataclass(frozen=True)
class RadialQuadrature:
    """``sum_j weights[j] psi(nodes[j]) ~ int_0^R g^2 psi(g) dg``."""

    nodes: np.ndarray
    weights: np.ndarray
    R: float

    @property
    def J(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class SphericalQuadrature:
    """Half of an antipodally symmetric Lebedev grid.

    Weights sum to one, so ``2 pi sum_m w_m phi(sigma_m)`` integrates an even
    function over the upper hemisphere.
    """

    nodes: np.ndarray  # (M, 3)
    weights: np.ndarray
    order: int

    @property
    def M(self) -> int:
        return len(self.weights)


def _jacobi_recurrence(n: int, alpha: float, beta: float):
    """Monic Jacobi recurrence ``p_{k+1} = (x - a_k) p_k - b_k p_{k-1}`` on [-1, 1]."""
    k = np.arange(n, dtype=float)
    s = 2 * k + alpha + beta
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (beta**2 - alpha**2) / (s * (s + 2))
    if alpha + beta == 0:
        a[0] = (beta - alpha) / (alpha + beta + 2)
    b = np.zeros(n)
    b[0] = 2 ** (alpha + beta + 1) * gamma(alpha + 1) * gamma(beta + 1) / gamma(alpha + beta + 2)
    kk = k[1:]
    ss = s[1:]
    b[1:] = 4 * kk * (kk + alpha) * (kk + beta) * (kk + alpha + beta) / (ss**2 * (ss + 1) * (ss - 1))
    return a, b


def gauss_radau_jacobi(n: int, alpha: float, beta: float, fixed: float = 1.0):
    """Gauss-Radau nodes/weights for ``(1-x)^alpha (1+x)^beta`` with a node at ``fixed``.

    Golub's modification of the Jacobi matrix followed by a symmetric
    tridiagonal eigensolve.  Exact for polynomials of degree ``2n - 2``.
    """
    if n < 1:
        raise ValueError("need at least one node")
    a, b = _jacobi_recurrence(n, alpha, beta)
    mu0 = b[0]
    if n == 1:
        return np.array([fixed]), np.array([mu0])
    # ratio p_k(z)/p_{k-1}(z) avoids overflow of the raw polynomial values
    ratio = fixed - a[0]
    for k in range(1, n - 1):
        ratio = fixed - a[k] - b[k] / ratio
    a = a.copy()
    a[n - 1] = fixed - b[n - 1] / ratio
    try:
        nodes, vecs = eigh_tridiagonal(a, np.sqrt(b[1:n]))
    except LinAlgError as exc:
        raise ConvergenceFailure(f"tridiagonal eigensolve failed: {exc}") from exc
    weights = mu0 * vecs[0] ** 2
    if not (np.all(np.isfinite(nodes)) and np.all(weights > 0)):
        raise ConvergenceFailure("Gauss-Radau rule produced invalid nodes or weights")
    return nodes, weights


def make_radial_quadrature(N: int, R: float) -> RadialQuadrature:
    """``J = N + 1`` point rule for ``int_0^R g^2 psi(g) dg``, exact to degree ``2N``.

    The fixed Radau node sits at ``g = R`` so no node lands on ``g = 0``.
    """
    if N < 1 or R <= 0:
        raise ValueError("need N >= 1 and R > 0")
    x, w = gauss_radau_jacobi(N + 1, 0.0, 2.0, fixed=1.0)
    half = R / 2
    g = half * (1 + x)
    g[-1] = R
    return RadialQuadrature(nodes=g, weights=w * half**3, R=float(R))


# Octahedral orbits of the small Lebedev grids: (kind, params, weight).
# Kinds: a1 (1,0,0); a2 (1,1,0)/sqrt2; a3 (1,1,1)/sqrt3; b (l,l,m) with
# m = sqrt(1-2l^2); c (p,q,0) with q = sqrt(1-p^2).  Weights sum to 1.
_LEBEDEV_ORBITS = {
    5: [("a1", (), 1 / 15), ("a3", (), 3 / 40)],
    7: [("a1", (), 1 / 21), ("a2", (), 4 / 105), ("a3", (), 9 / 280)],
    9: [("a1", (), 1 / 105), ("a3", (), 9 / 280), ("c", (0.4597008433809831,), 1 / 35)],
    11: [
        ("a1", (), 4 / 315),
        ("a2", (), 64 / 2835),
        ("a3", (), 27 / 1280),
        ("b", (1 / np.sqrt(11.0),), 14641 / 725760),
    ],
}
_EMBEDDED_M = {7: 5, 13: 7, 19: 9, 25: 11}
_SCIPY_ORDERS = (3, 5, 7, 9, 11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31, 35,
                 41, 47, 53, 59, 65, 71, 77, 83, 89, 95, 101, 107, 113, 119, 125, 131)
_SCIPY_POINTS = (6, 14, 26, 38, 50, 74, 86, 110, 146, 170, 194, 230, 266, 302, 350, 434,
                 590, 770, 974, 1202, 1454, 1730, 2030, 2354, 2702, 3074, 3470, 3890,
                 4334, 4802, 5294, 5810)


def _signed_perms(base) -> np.ndarray:
    from itertools import permutations, product

    pts = set()
    for perm in permutations(base):
        for signs in product((1, -1), repeat=3):
            pts.add(tuple(float(s * p) + 0.0 for s, p in zip(signs, perm)))
    return np.array(sorted(pts))


def _orbit(kind: str, params) -> np.ndarray:
    if kind == "a1":
        return _signed_perms((1.0, 0.0, 0.0))
    if kind == "a2":
        s = 1 / np.sqrt(2.0)
        return _signed_perms((s, s, 0.0))
    if kind == "a3":
        s = 1 / np.sqrt(3.0)
        return _signed_perms((s, s, s))
    if kind == "b":
        (l,) = params
        return _signed_perms((l, l, np.sqrt(1 - 2 * l * l)))
    if kind == "c":
        (p,) = params
        return _signed_perms((p, np.sqrt(1 - p * p), 0.0))
    raise ValueError(kind)


def lebedev_sphere(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Full-sphere Lebedev grid ``(points (n, 3), weights summing to 1)``."""
    if order in _LEBEDEV_ORBITS:
        pts, wts = [], []
        for kind, params, w in _LEBEDEV_ORBITS[order]:
            orb = _orbit(kind, params)
            pts.append(orb)
            wts.append(np.full(len(orb), w))
        return np.vstack(pts), np.concatenate(wts)
    if order not in _SCIPY_ORDERS:
        raise UnsupportedOrder(f"no Lebedev rule of order {order}")
    from scipy.integrate import lebedev_rule

    x, w = lebedev_rule(order)
    return x.T.copy(), w / w.sum()


def _upper_half(points: np.ndarray) -> np.ndarray:
    """Mask choosing one point of each antipodal pair (z > 0, ties broken by y then x)."""
    tol = 1e-12
    x, y, z = points.T
    return (z > tol) | ((np.abs(z) <= tol) & ((y > tol) | ((np.abs(y) <= tol) & (x > 0))))


def make_hemisphere_quadrature(M: int) -> SphericalQuadrature:
    """Hemisphere rule with ``M`` points (half of a ``2M``-point Lebedev grid)."""
    if M in _EMBEDDED_M:
        order = _EMBEDDED_M[M]
    else:
        try:
            order = _SCIPY_ORDERS[_SCIPY_POINTS.index(2 * M)]
        except ValueError:
            raise UnsupportedOrder(
                f"M={M} is not half of a supported Lebedev grid size {_SCIPY_POINTS}"
            ) from None
    points, weights = lebedev_sphere(order)
    mask = _upper_half(points)
    if mask.sum() != M:
        raise UnsupportedOrder(f"Lebedev grid of order {order} is not antipodally symmetric")
    return SphericalQuadrature(nodes=points[mask], weights=2 * weights[mask], order=order)


def hemisphere_for_degree(degree: int) -> SphericalQuadrature:
    """Smallest shipped hemisphere rule integrating harmonics up to ``degree`` exactly."""
    for order, npts in zip(_SCIPY_ORDERS, _SCIPY_POINTS):
        if order >= degree:
            return make_hemisphere_quadrature(npts // 2)
    raise UnsupportedOrder(f"no Lebedev rule reaches degree {degree}")


def dump_csv(quad, path) -> None:
    """Write nodes and weights of either rule as CSV, for auditing."""
    import csv

    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        if isinstance(quad, RadialQuadrature):
            out.writerow(["g", "weight"])
            for g, w in zip(quad.nodes, quad.weights):
                out.writerow([f"{g:.17e}", f"{w:.17e}"])
        else:
            out.writerow(["sx", "sy", "sz", "weight"])
            for s, w in zip(quad.nodes, quad.weights):
                out.writerow([*(f"{c:.17e}" for c in s), f"{w:.17e}"])
