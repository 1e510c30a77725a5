import numpy as np
import pytest

from gim.errors import DimensionMismatchError
from gim.masks import MaskSet
from gim.operators import (
    DEFAULT_CATALOGUE,
    FeatureKind,
    GridGeometry,
    feature_adjoint_apply,
    feature_apply,
    laplacian_apply,
    saddle_apply,
    stacked_adjoint_apply,
    stacked_apply,
)
from oracles import (
    dense_feature,
    dense_laplacian,
    dense_saddle,
    dense_stacked,
    random_masks,
)

SMALL_GEOMS = [GridGeometry(3, 3), GridGeometry(5, 4), GridGeometry(6, 6),
               GridGeometry(1, 6), GridGeometry(6, 1)]


class TestLaplacian:
    def test_constants_in_kernel(self, rng):
        for geom in SMALL_GEOMS:
            out = laplacian_apply(geom, np.ones(geom.pixel_count))
            assert np.all(out == 0.0)

    def test_centre_impulse_3x3(self):
        geom = GridGeometry(3, 3)
        u = np.zeros(9)
        u[4] = 1.0
        out = laplacian_apply(geom, u)
        expected = np.array([0, -1, 0, -1, 4, -1, 0, -1, 0], float)
        assert np.array_equal(out, expected)

    def test_positive_semidefinite(self, rng):
        geom = GridGeometry(8, 8)
        for _ in range(20):
            u = rng.normal(size=64)
            quad = u @ laplacian_apply(geom, u)
            assert quad >= -1e-12 * (u @ u)

    def test_matches_dense_oracle(self, rng):
        for geom in SMALL_GEOMS:
            dense = dense_laplacian(geom)
            for _ in range(5):
                u = rng.normal(size=geom.pixel_count)
                assert np.allclose(laplacian_apply(geom, u), dense @ u,
                                   rtol=0, atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            laplacian_apply(GridGeometry(3, 3), np.zeros(8))


class TestFeatureApply:
    def test_dirichlet_identity(self, rng):
        geom = GridGeometry(4, 5)
        u = rng.normal(size=20)
        assert np.array_equal(feature_apply(FeatureKind.DIRICHLET, geom, u), u)

    def test_deriv_x_on_ramp(self):
        geom = GridGeometry(4, 4)
        u = np.tile(np.arange(4.0), 4)
        out = feature_apply(FeatureKind.DERIV_X, geom, u).reshape(4, 4)
        assert np.all(out[:, :3] == 1.0)
        assert np.all(out[:, 3] == 0.0)

    def test_derivatives_kill_constants(self):
        geom = GridGeometry(5, 3)
        c = np.full(15, 7.25)
        assert np.all(feature_apply(FeatureKind.DERIV_X, geom, c) == 0.0)
        assert np.all(feature_apply(FeatureKind.DERIV_Y, geom, c) == 0.0)

    @pytest.mark.parametrize("kind", [FeatureKind.AVG2, FeatureKind.AVG16])
    def test_average_of_constant(self, kind):
        geom = GridGeometry(5, 4)
        c = np.full(20, 3.5)
        assert np.allclose(feature_apply(kind, geom, c), 3.5, rtol=0, atol=1e-13)

    @pytest.mark.parametrize("kind", DEFAULT_CATALOGUE)
    def test_matches_dense_oracle(self, rng, kind):
        for geom in SMALL_GEOMS:
            dense = dense_feature(kind, geom)
            for _ in range(5):
                u = rng.normal(size=geom.pixel_count)
                assert np.allclose(feature_apply(kind, geom, u), dense @ u,
                                   rtol=0, atol=1e-12)
                v = rng.normal(size=geom.pixel_count)
                assert np.allclose(feature_adjoint_apply(kind, geom, v),
                                   dense.T @ v, rtol=0, atol=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            feature_apply(FeatureKind.AVG2, GridGeometry(3, 3), np.zeros(10))


class TestAdjointConsistency:
    @pytest.mark.parametrize("kind", DEFAULT_CATALOGUE)
    def test_feature_adjoints(self, rng, kind):
        for geom in [GridGeometry(6, 6), GridGeometry(8, 8), GridGeometry(7, 3)]:
            n = geom.pixel_count
            for _ in range(20):
                x, y = rng.normal(size=n), rng.normal(size=n)
                lhs = feature_apply(kind, geom, x) @ y
                rhs = x @ feature_adjoint_apply(kind, geom, y)
                assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_avg16_on_smaller_grid(self, rng):
        # patch larger than the image: reflection wraps several times
        geom = GridGeometry(8, 8)
        for _ in range(20):
            x, y = rng.normal(size=64), rng.normal(size=64)
            lhs = feature_apply(FeatureKind.AVG16, geom, x) @ y
            rhs = x @ feature_adjoint_apply(FeatureKind.AVG16, geom, y)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))

    def test_stacked_adjoint(self, rng):
        geom = GridGeometry(5, 5)
        masks = random_masks(geom, DEFAULT_CATALOGUE, rng, density=0.3)
        n, m = 25, 5
        for _ in range(20):
            x = rng.normal(size=n)
            y = rng.normal(size=m * n)
            lhs = stacked_apply(masks, x) @ y
            rhs = x @ stacked_adjoint_apply(masks, y)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


class TestStacked:
    def test_empty_masks_give_zero(self, rng):
        geom = GridGeometry(4, 4)
        masks = MaskSet.empty(geom, DEFAULT_CATALOGUE)
        out = stacked_apply(masks, rng.normal(size=16))
        assert out.shape == (80,)
        assert np.all(out == 0.0)

    def test_single_dirichlet_point(self, rng):
        geom = GridGeometry(4, 4)
        masks = MaskSet.empty(geom, DEFAULT_CATALOGUE)
        masks.add_point(0, 11)
        f = rng.uniform(0, 255, 16)
        out = stacked_apply(masks, f)
        expected = np.zeros(80)
        expected[11] = f[11]
        assert np.array_equal(out, expected)

    def test_matches_dense_oracle(self, rng):
        geom = GridGeometry(5, 5)
        for _ in range(5):
            masks = random_masks(geom, DEFAULT_CATALOGUE, rng, density=0.3)
            dense = dense_stacked(masks)
            u = rng.normal(size=25)
            assert np.allclose(stacked_apply(masks, u), dense @ u,
                               rtol=0, atol=1e-12)
            lam = rng.normal(size=125)
            assert np.allclose(stacked_adjoint_apply(masks, lam), dense.T @ lam,
                               rtol=0, atol=1e-12)

    def test_adjoint_places_value_back(self):
        geom = GridGeometry(3, 3)
        masks = MaskSet.empty(geom, (FeatureKind.DIRICHLET,))
        masks.add_point(0, 5)
        lam = np.zeros(9)
        lam[5] = 2.5
        out = stacked_adjoint_apply(masks, lam)
        assert out[5] == 2.5 and np.count_nonzero(out) == 1


class TestSaddle:
    def test_zero_maps_to_zero(self):
        geom = GridGeometry(3, 3)
        masks = MaskSet.empty(geom, DEFAULT_CATALOGUE)
        masks.add_point(0, 0)
        assert np.all(saddle_apply(masks, np.zeros(9 * 6)) == 0.0)

    def test_constant_u_zero_lambda(self, rng):
        geom = GridGeometry(4, 4)
        masks = random_masks(geom, DEFAULT_CATALOGUE, rng, density=0.25)
        z = np.concatenate([np.full(16, 2.0), np.zeros(80)])
        out = saddle_apply(masks, z)
        assert np.allclose(out[:16], 0.0, atol=1e-13)  # L kills constants
        assert np.allclose(out[16:], stacked_apply(masks, z[:16]), atol=1e-13)

    def test_matches_dense_oracle(self, rng):
        geom = GridGeometry(4, 4)
        for _ in range(5):
            masks = random_masks(geom, DEFAULT_CATALOGUE, rng, density=0.25)
            dense = dense_saddle(masks)
            z = rng.normal(size=96)
            assert np.allclose(saddle_apply(masks, z), dense @ z,
                               rtol=0, atol=1e-12)

    def test_symmetry(self, rng):
        geom = GridGeometry(4, 4)
        masks = random_masks(geom, DEFAULT_CATALOGUE, rng, density=0.25)
        for _ in range(50):
            z, w = rng.normal(size=96), rng.normal(size=96)
            lhs = saddle_apply(masks, z) @ w
            rhs = z @ saddle_apply(masks, w)
            assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


def test_feature_kind_labels_round_trip():
    for kind in DEFAULT_CATALOGUE:
        assert FeatureKind.from_label(kind.value) is kind
    with pytest.raises(ValueError):
        FeatureKind.from_label("sobel")
