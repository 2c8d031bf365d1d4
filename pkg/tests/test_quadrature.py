import math

import numpy as np
import pytest
from scipy.integrate import lebedev_rule

from boltzspec.errors import UnsupportedOrder
from boltzspec.quadrature import (
    dump_csv, gauss_radau_jacobi, hemisphere_for_degree, lebedev_sphere, make_hemisphere_quadrature,
    make_radial_quadrature,
)


def sphere_monomial_mean(a, b, c):
    """Mean of ``x^a y^b z^c`` over the unit sphere (closed form)."""
    if a % 2 or b % 2 or c % 2:
        return 0.0
    num = math.gamma((a + 1) / 2) * math.gamma((b + 1) / 2) * math.gamma((c + 1) / 2)
    return num / math.gamma((a + b + c + 3) / 2) / (2 * np.pi)


class TestRadial:
    @pytest.mark.parametrize("N", [4, 8, 16, 32])
    @pytest.mark.parametrize("R", [3.5, 6.0])
    def test_exact_to_degree_2N(self, N, R):
        rq = make_radial_quadrature(N, R)
        assert rq.J == N + 1
        for k in range(2 * N + 1):
            exact = R ** (k + 3) / (k + 3)
            approx = np.sum(rq.weights * rq.nodes**k)
            assert abs(approx - exact) <= 1e-11 * exact

    def test_node_fixed_at_cutoff(self):
        rq = make_radial_quadrature(8, 6.0)
        assert rq.nodes[-1] == 6.0
        assert np.all(rq.nodes > 0) and np.all(rq.weights > 0)

    @pytest.mark.parametrize("alpha,beta", [(0.0, 2.0), (1.0, 0.0), (0.5, 1.5)])
    def test_radau_jacobi_exactness(self, alpha, beta):
        n = 6
        x, w = gauss_radau_jacobi(n, alpha, beta, fixed=1.0)
        assert x[-1] == pytest.approx(1.0)
        for k in range(2 * n - 1):
            # int_{-1}^{1} x^k (1-x)^alpha (1+x)^beta dx by a fine Gauss-Jacobi rule
            from scipy.special import roots_jacobi
            xr, wr = roots_jacobi(40, alpha, beta)
            assert np.sum(w * x**k) == pytest.approx(np.sum(wr * xr**k), abs=1e-12)

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            make_radial_quadrature(0, 1.0)


class TestSphere:
    @pytest.mark.parametrize("order", [5, 7, 9, 11])
    def test_embedded_matches_scipy(self, order):
        p, w = lebedev_sphere(order)
        x, ws = lebedev_rule(order)
        ours = sorted(zip(*np.round(p.T, 12), np.round(w, 14)))
        ref = sorted(zip(*np.round(x, 12), np.round(ws / ws.sum(), 14)))
        np.testing.assert_allclose(np.array(ours), np.array(ref), atol=1e-12)

    @pytest.mark.parametrize("M,degree", [(7, 5), (13, 7), (19, 9), (25, 11)])
    def test_hemisphere_even_harmonics(self, M, degree):
        sq = make_hemisphere_quadrature(M)
        assert sq.M == M
        assert np.sum(sq.weights) == pytest.approx(1.0)
        assert np.all(sq.nodes[:, 2] >= -1e-12)
        # even functions of sigma are integrated exactly over the hemisphere
        for a in range(0, degree + 1):
            for b in range(0, degree + 1 - a):
                for c in range(0, degree + 1 - a - b):
                    if (a + b + c) % 2:
                        continue
                    val = np.sum(sq.weights * sq.nodes[:, 0] ** a * sq.nodes[:, 1] ** b * sq.nodes[:, 2] ** c)
                    assert val == pytest.approx(sphere_monomial_mean(a, b, c), abs=1e-12)

    def test_rule_for_degree_32(self):
        sq = hemisphere_for_degree(32)
        assert sq.order == 35 and sq.M == 217

    @pytest.mark.parametrize("M", [8, 100])
    def test_unsupported_sizes(self, M):
        with pytest.raises(UnsupportedOrder):
            make_hemisphere_quadrature(M)

    def test_unsupported_order(self):
        with pytest.raises(UnsupportedOrder):
            lebedev_sphere(4)


def test_dump_csv(tmp_path):
    path = tmp_path / "rq.csv"
    dump_csv(make_radial_quadrature(4, 2.0), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "g,weight" and len(lines) == 6
    dump_csv(make_hemisphere_quadrature(7), tmp_path / "sq.csv")
    assert len((tmp_path / "sq.csv").read_text().splitlines()) == 8
