import numpy as np
import pytest

from boltzspec import moments
from boltzspec.binary import BinaryCollision, CollisionKernel
from boltzspec.errors import GridMismatch
from boltzspec.grid import DistributionField, SpectralGrid, integrate, l2_norm
from boltzspec.homogeneous import initial_distribution
from boltzspec.linear import (
    CutoffPolicy, LinearizedCollision, cutoff_ratio, linearized_collision, mass_fix_linear, precompute,
)
from boltzspec.moments import STANDARD, MaxwellianParams, maxwellian_field
from boltzspec.quadrature import make_hemisphere_quadrature, make_radial_quadrature


@pytest.fixture(scope="module")
def maxwell16(grid16, rq16):
    return precompute(grid16, rq16, CollisionKernel.maxwell())


@pytest.fixture(scope="module")
def argon16(grid16, rq16):
    return precompute(grid16, rq16, CollisionKernel.argon())


def _modes(grid):
    """Eigenfunctions of the Maxwell-molecule operator about (1, 0, 1) with ``B = 1/(4 pi)``.

    Eigenvalues follow from the classical Burnett-function analysis:
    shear stress -1/2, heat flux -1/3 (ratio 2/3, the Prandtl number) and
    the isotropic fourth-order mode -1/3.
    """
    v1, v2, _ = grid.velocity
    vsq = grid.speed_sq
    M = maxwellian_field(STANDARD, grid).values
    return {
        "stress": (M * v1 * v2, -0.5),
        "heat": (M * v1 * (vsq - 5), -1 / 3),
        "fourth": (M * (vsq**2 - 10 * vsq + 15), -1 / 3),
    }


class TestExactEigenvalues:
    @pytest.mark.parametrize("mode", ["stress", "heat", "fourth"])
    def test_maxwell_molecule_modes(self, grid16, maxwell16, mode):
        phi, lam = _modes(grid16)[mode]
        Lphi = LinearizedCollision.about(STANDARD, maxwell16)(phi)
        assert l2_norm(Lphi - lam * phi, grid16) <= 5e-3 * l2_norm(lam * phi, grid16)

    @pytest.mark.parametrize("mode", ["stress", "heat"])
    def test_matches_binary_pair(self, grid16, rq16, maxwell16, mode):
        phi, _ = _modes(grid16)[mode]
        M = maxwellian_field(STANDARD, grid16).values
        ref = BinaryCollision(grid16, CollisionKernel.maxwell(), rq16, make_hemisphere_quadrature(25)).pair(M, phi)
        Lphi = LinearizedCollision.about(STANDARD, maxwell16)(phi)
        assert l2_norm(Lphi - ref, grid16) <= 1e-4 * l2_norm(ref, grid16)


class TestProperties:
    @pytest.mark.parametrize("params", [STANDARD, MaxwellianParams(0.8, (0.4, -0.2, 0.1), 1.2)])
    @pytest.mark.parametrize("kernel", ["maxwell", "argon"])
    def test_equilibrium_annihilation(self, grid16, maxwell16, argon16, params, kernel):
        tables = maxwell16 if kernel == "maxwell" else argon16
        M = maxwellian_field(params, grid16).values
        assert l2_norm(LinearizedCollision.about(params, tables)(M), grid16) <= 1e-5

    def test_collision_invariants_annihilated(self, grid16, maxwell16):
        M = maxwellian_field(STANDARD, grid16).values
        op = LinearizedCollision.about(STANDARD, maxwell16)
        for phi in (M * grid16.velocity[0], M * grid16.speed_sq):
            assert l2_norm(op(phi), grid16) <= 1e-5 * l2_norm(phi, grid16)

    def test_linear_in_f(self, grid16, argon16):
        op = LinearizedCollision.about(STANDARD, argon16)
        f = initial_distribution(2, grid16)
        h = maxwellian_field(MaxwellianParams(1.0, (0.2, 0, 0), 0.9), grid16).values
        np.testing.assert_allclose(op(2 * f - 3 * h), 2 * op(f) - 3 * op(h), atol=1e-13)

    def test_batched_matches_single(self, grid8, rq8):
        tables = precompute(grid8, rq8, CollisionKernel.maxwell())
        f = initial_distribution(1, grid8)
        op = LinearizedCollision(tables, np.array([1.0, 0.9]), np.array([[0, 0, 0], [0.1, 0, 0]]), np.array([1.0, 1.1]))
        out = op(np.stack([f, f]))
        single = LinearizedCollision.about(MaxwellianParams(0.9, (0.1, 0, 0), 1.1), tables)(f)
        np.testing.assert_allclose(out[1], single, atol=1e-15)

    def test_mass_fix(self, grid16, argon16):
        f = initial_distribution(2, grid16)
        out = LinearizedCollision.about(STANDARD, argon16, mass_fix=True)(f)
        assert abs(integrate(out, grid16)) < 1e-15
        coeffs = np.ones((2, 4, 4, 3), dtype=complex)
        assert np.all(mass_fix_linear(coeffs)[:, 0, 0, 0] == 0)

    def test_quadratic_residual_law(self, grid16, rq16, maxwell16):
        M = maxwellian_field(STANDARD, grid16).values
        v1, v2, _ = grid16.velocity
        delta = M * (v1 * v2 + 0.1 * (grid16.speed_sq**2 - 10 * grid16.speed_sq + 15))
        Q = BinaryCollision(grid16, CollisionKernel.maxwell(), rq16, make_hemisphere_quadrature(25))
        L = LinearizedCollision.about(STANDARD, maxwell16)
        res = [l2_norm(Q(M + e * delta) - L(M + e * delta), grid16) for e in (0.2, 0.1)]
        assert 3.6 <= res[0] / res[1] <= 4.4


class TestCutoff:
    def test_ratio_zero_outside(self, grid16):
        f = initial_distribution(2, grid16)
        r = cutoff_ratio(DistributionField(f, grid16), STANDARD).values
        M = maxwellian_field(STANDARD, grid16).values
        keep = M >= 1e-9
        assert np.all(r[~keep] == 0)
        np.testing.assert_allclose(r[keep], f[keep] / M[keep])

    def test_cutoff_barely_matters_for_fast_decay(self, grid16, maxwell16):
        f = initial_distribution(1, grid16)
        on = LinearizedCollision.about(STANDARD, maxwell16)(f)
        off = LinearizedCollision.about(STANDARD, maxwell16, policy=CutoffPolicy(enabled=False))(f)
        assert l2_norm(on - off, grid16) <= 1e-8

    def test_no_cutoff_blows_up_for_slow_decay(self):
        # F2 / M grows without bound, so without the cut-off round-off is
        # amplified until the relaxation diverges within a few steps
        from boltzspec.homogeneous import HomogeneousRun, run_homogeneous

        off = run_homogeneous(HomogeneousRun(case=2, t_end=0.3, cutoff=CutoffPolicy(enabled=False)))
        on = run_homogeneous(HomogeneousRun(case=2, t_end=0.3))
        assert off.l2_to_maxwellian[-1] > 1e3
        assert on.l2_to_maxwellian[-1] < on.l2_to_maxwellian[0]

    @pytest.mark.parametrize("eps", [0.0, 1.0, -1e-3])
    def test_policy_validation(self, eps):
        with pytest.raises(ValueError):
            CutoffPolicy(epsilon=eps)


def test_tables_must_match_grid(grid8):
    with pytest.raises(GridMismatch):
        precompute(grid8, make_radial_quadrature(8, 5.0), CollisionKernel.maxwell())


def test_function_wrapper_defaults_to_own_moments(grid8, rq8):
    tables = precompute(grid8, rq8, CollisionKernel.maxwell())
    f = DistributionField(moments.test_distribution("F1", grid8).values, grid8)
    out = linearized_collision(f, None, tables)
    params = moments.compute_moments(f).params()
    np.testing.assert_allclose(out.values, LinearizedCollision.about(params, tables)(f.values))
    with pytest.raises(GridMismatch):
        linearized_collision(DistributionField(np.ones((8, 8, 8)), SpectralGrid(4, 6.0)), None, tables)
