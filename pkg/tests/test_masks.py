import numpy as np
import pytest

from gim.errors import MaskFileError
from gim.masks import (
    MaskSet,
    extract_feature_values,
    load_masks,
    mask_density,
    save_masks,
    validate_support,
)
from gim.operators import DEFAULT_CATALOGUE, FeatureKind, GridGeometry
from oracles import dense_stacked, random_masks


class TestDensity:
    def test_empty(self):
        masks = MaskSet.empty(GridGeometry(10, 10), DEFAULT_CATALOGUE)
        assert mask_density(masks) == 0.0

    def test_single_point(self):
        masks = MaskSet.empty(GridGeometry(10, 10), DEFAULT_CATALOGUE)
        masks.add_point(3, 42)
        assert mask_density(masks) == pytest.approx(0.01)

    def test_saturated(self):
        geom = GridGeometry(4, 3)
        masks = MaskSet(geom, DEFAULT_CATALOGUE, np.ones((5, 12), bool))
        assert mask_density(masks) == pytest.approx(5.0)

    def test_insertion_monotone(self, rng):
        masks = MaskSet.empty(GridGeometry(6, 6), DEFAULT_CATALOGUE)
        prev = 0
        slots = [(int(i), int(j)) for i in range(5) for j in range(36)]
        rng.shuffle(slots)
        for i, j in slots[:40]:
            masks.add_point(i, j)
            assert masks.total_points == prev + 1
            prev = masks.total_points

    def test_duplicate_slot_rejected(self):
        masks = MaskSet.empty(GridGeometry(3, 3), DEFAULT_CATALOGUE)
        masks.add_point(1, 4)
        with pytest.raises(ValueError):
            masks.add_point(1, 4)
        masks.add_point(2, 4)  # same pixel, different feature: allowed


class TestExtractFeatureValues:
    def test_empty_masks(self, rng):
        masks = MaskSet.empty(GridGeometry(4, 4), DEFAULT_CATALOGUE)
        out = extract_feature_values(masks, rng.normal(size=16))
        assert np.all(out == 0.0)

    def test_full_dirichlet_block(self, rng):
        geom = GridGeometry(4, 4)
        grids = np.zeros((5, 16), bool)
        grids[0] = True
        masks = MaskSet(geom, DEFAULT_CATALOGUE, grids)
        f = rng.uniform(0, 255, 16)
        out = extract_feature_values(masks, f)
        assert np.array_equal(out[:16], f)
        assert np.all(out[16:] == 0.0)

    def test_matches_dense_oracle(self, rng):
        geom = GridGeometry(5, 5)
        masks = random_masks(geom, DEFAULT_CATALOGUE, rng, density=0.3)
        f = rng.uniform(0, 255, 25)
        assert np.allclose(extract_feature_values(masks, f),
                           dense_stacked(masks) @ f, rtol=0, atol=1e-10)

    def test_sparsity_invariant(self, rng):
        geom = GridGeometry(5, 5)
        masks = random_masks(geom, DEFAULT_CATALOGUE, rng, density=0.3)
        values = extract_feature_values(masks, rng.uniform(0, 255, 25))
        assert np.all(values[~masks.support()] == 0.0)
        validate_support(masks, values)


class TestSerialization:
    def _random_instance(self, rng, channels=1):
        geom = GridGeometry(7, 5)
        masks = random_masks(geom, DEFAULT_CATALOGUE, rng, density=0.2)
        values = np.zeros((channels, 5 * 35))
        sup = masks.support()
        for c in range(channels):
            values[c, sup] = rng.uniform(-300, 300, sup.sum())
        return masks, values

    @pytest.mark.parametrize("channels", [1, 3])
    def test_round_trip(self, tmp_path, rng, channels):
        masks, values = self._random_instance(rng, channels)
        path = tmp_path / "mask.txt"
        save_masks(masks, values, path)
        masks2, values2 = load_masks(path)
        assert masks2.geom == masks.geom
        assert masks2.catalogue == masks.catalogue
        assert np.array_equal(masks2.grids, masks.grids)
        assert np.array_equal(values2, values)

    def test_header_only_file(self, tmp_path):
        path = tmp_path / "mask.txt"
        path.write_text("GIM1 4 4 1 2 dirichlet,dx\n")
        masks, values = load_masks(path)
        assert masks.total_points == 0
        assert values.shape == (1, 32)

    def test_feature_id_out_of_range(self, tmp_path):
        path = tmp_path / "mask.txt"
        path.write_text("GIM1 4 4 1 2 dirichlet,dx\n2 0 0 5.0\n")
        with pytest.raises(MaskFileError) as err:
            load_masks(path)
        assert err.value.line == 2

    def test_bad_header(self, tmp_path):
        path = tmp_path / "mask.txt"
        path.write_text("GIM9 4 4 1 2 dirichlet,dx\n")
        with pytest.raises(MaskFileError) as err:
            load_masks(path)
        assert err.value.line == 1

    def test_pixel_out_of_range(self, tmp_path):
        path = tmp_path / "mask.txt"
        path.write_text("GIM1 4 4 1 1 dirichlet\n0 4 0 5.0\n")
        with pytest.raises(MaskFileError):
            load_masks(path)

    def test_wrong_field_count(self, tmp_path):
        path = tmp_path / "mask.txt"
        path.write_text("GIM1 4 4 3 1 dirichlet\n0 0 0 5.0\n")
        with pytest.raises(MaskFileError) as err:
            load_masks(path)
        assert err.value.line == 2

    def test_duplicate_point(self, tmp_path):
        path = tmp_path / "mask.txt"
        path.write_text("GIM1 4 4 1 1 dirichlet\n0 1 1 5.0\n0 1 1 6.0\n")
        with pytest.raises(MaskFileError) as err:
            load_masks(path)
        assert err.value.line == 3

    def test_unknown_kind(self, tmp_path):
        path = tmp_path / "mask.txt"
        path.write_text("GIM1 4 4 1 1 sobel\n")
        with pytest.raises(MaskFileError):
            load_masks(path)

    def test_values_preserved_exactly(self, tmp_path):
        geom = GridGeometry(3, 3)
        masks = MaskSet.empty(geom, (FeatureKind.DIRICHLET,))
        masks.add_point(0, 4)
        values = np.zeros((1, 9))
        values[0, 4] = 0.1 + 0.2  # not representable exactly in decimal
        path = tmp_path / "mask.txt"
        save_masks(masks, values, path)
        _, values2 = load_masks(path)
        assert values2[0, 4] == values[0, 4]
