import math

import numpy as np
import pytest

from lambdaseg import (
    ConnectivityConfig,
    ImageGrid,
    InvalidPathError,
    UnsupportedCompositionError,
    connectedness_degree,
    neighbor_connectivity,
    path_connectivity,
    read_pgm,
    segment,
    similarity,
    write_label_csv,
    write_label_pgm,
)
from oracles import brute_connectedness, brute_partition, canonical_labels

PRODUCT = ConnectivityConfig(composition="product")
EIGHT = ConnectivityConfig(adjacency=8)

PALETTE = np.array([0, 64, 128, 255])


def random_image(rng, w, h):
    return ImageGrid.from_array(PALETTE[rng.integers(0, 4, (h, w))])


class TestSimilarity:
    def test_equal_values(self):
        assert similarity(10, 10, 255) == 1.0

    def test_extreme_contrast(self):
        assert similarity(0, 255, 255) == 0.0

    def test_direct_arithmetic(self):
        assert similarity(10, 200, 255) == pytest.approx(1 - 190 / 255, abs=1e-12)

    def test_symmetry_and_bounds_exhaustive(self):
        for u in range(0, 256, 5):
            for v in range(0, 256, 5):
                a = similarity(u, v, 255)
                assert a == similarity(v, u, 255)
                assert 0.0 <= a <= 1.0
                assert (a == 1.0) == (u == v)

    def test_clamped_below_zero(self):
        assert similarity(0, 200, 100) == 0.0


class TestNeighborConnectivity:
    def test_adjacent_equal(self, corner_image):
        assert neighbor_connectivity(corner_image, (0, 0), (1, 0)) == 1.0

    def test_non_adjacent_is_zero(self):
        img = ImageGrid.from_array(np.zeros((3, 3), dtype=int))
        assert neighbor_connectivity(img, (0, 0), (2, 2)) == 0.0

    def test_adjacent_contrast(self, corner_image):
        got = neighbor_connectivity(corner_image, (1, 0), (1, 1))
        assert got == pytest.approx(0.2549019607843137, abs=1e-9)

    def test_diagonal_depends_on_adjacency(self, corner_image):
        assert neighbor_connectivity(corner_image, (0, 0), (1, 1)) == 0.0
        assert neighbor_connectivity(corner_image, (0, 0), (1, 1), EIGHT) == pytest.approx(
            0.2549019607843137, abs=1e-9
        )

    def test_out_of_bounds(self, corner_image):
        with pytest.raises(IndexError):
            neighbor_connectivity(corner_image, (0, 0), (2, 0))


class TestPathConnectivity:
    def test_min_composition(self):
        img = ImageGrid.from_array([[10, 20, 30]])
        path = [(0, 0), (1, 0), (2, 0)]
        assert path_connectivity(path, img) == pytest.approx(0.960784, abs=1e-6)

    def test_product_composition(self):
        img = ImageGrid.from_array([[10, 20, 30]])
        path = [(0, 0), (1, 0), (2, 0)]
        assert path_connectivity(path, img, PRODUCT) == pytest.approx(0.923106, abs=1e-6)

    def test_single_vertex(self, corner_image):
        assert path_connectivity([(0, 0)], corner_image) == 1.0

    def test_non_adjacent_step(self, corner_image):
        with pytest.raises(InvalidPathError):
            path_connectivity([(0, 0), (1, 1)], corner_image)


class TestConnectednessDegree:
    def test_reflexive(self, corner_image):
        assert connectedness_degree(corner_image, (1, 1), (1, 1)) == 1.0

    def test_forced_zero_path(self):
        img = ImageGrid.from_array([[0, 255, 0]])
        assert connectedness_degree(img, (0, 0), (2, 0)) == 0.0

    def test_corner_example(self, corner_image):
        got = connectedness_degree(corner_image, (0, 0), (1, 1))
        assert got == pytest.approx(0.2549019607843137, abs=1e-9)

    @pytest.mark.parametrize("composition", ["min", "product"])
    @pytest.mark.parametrize("adjacency", [4, 8])
    def test_matches_exhaustive_enumeration(self, composition, adjacency):
        rng = np.random.default_rng(11)
        cfg = ConnectivityConfig(adjacency=adjacency, composition=composition)
        for _ in range(6):
            img = random_image(rng, 3, 3)
            brute = brute_connectedness(img, adjacency, composition)
            for (a, b), expect in brute.items():
                ax, ay = a % 3, a // 3
                bx, by = b % 3, b // 3
                got = connectedness_degree(img, (ax, ay), (bx, by), cfg)
                assert got == pytest.approx(expect, abs=1e-12)

    def test_symmetry(self):
        rng = np.random.default_rng(5)
        img = random_image(rng, 4, 3)
        for _ in range(20):
            a = (int(rng.integers(4)), int(rng.integers(3)))
            b = (int(rng.integers(4)), int(rng.integers(3)))
            assert connectedness_degree(img, a, b) == connectedness_degree(img, b, a)


class TestSegment:
    def test_constant_full_tolerance(self, constant_image):
        lm = segment(constant_image, 1.0)
        assert lm.component_count == 1
        assert np.all(lm.labels == 1)

    def test_corner_split(self, corner_image):
        lm = segment(corner_image, 0.5)
        assert lm.labels.tolist() == [[1, 1], [1, 2]]
        assert lm.component_count == 2

    def test_zero_tolerance_single_component(self, corner_image):
        assert segment(corner_image, 0.0).component_count == 1

    def test_zero_tolerance_spans_contrast(self):
        img = ImageGrid.from_array([[0, 255, 0]])
        assert segment(img, 0.0).component_count == 1

    def test_threshold_is_inclusive(self, corner_image):
        edge = similarity(10, 200, 255)
        assert segment(corner_image, edge).component_count == 1
        assert segment(corner_image, math.nextafter(edge, 1.0)).component_count == 2

    def test_product_unsupported(self, corner_image):
        with pytest.raises(UnsupportedCompositionError):
            segment(corner_image, 0.5, PRODUCT)

    def test_tolerance_range_checked(self, corner_image):
        with pytest.raises(ValueError):
            segment(corner_image, 1.5)

    def test_background_mask_excluded(self, corner_image):
        bg = np.array([[True, False], [False, False]])
        lm = segment(corner_image, 0.0, background=bg)
        assert lm.labels[0, 0] == 0
        # remaining pixels are mutually reachable at tolerance 0
        assert lm.component_count == 1

    def test_masked_pixels_break_paths(self):
        img = ImageGrid.from_array([[5, 5, 5]])
        bg = np.array([[False, True, False]])
        lm = segment(img, 0.0, background=bg)
        assert lm.labels.tolist() == [[1, 0, 2]]
        assert lm.component_count == 2

    def test_oracle_equivalence_small_random(self):
        rng = np.random.default_rng(23)
        for _ in range(12):
            w, h = int(rng.integers(2, 5)), int(rng.integers(2, 5))
            img = random_image(rng, w, h)
            for lam in (0.1, 0.5, 0.75, 0.9):
                lm = segment(img, lam)
                assert canonical_labels(lm.labels) == brute_partition(img, lam)

    def test_oracle_equivalence_eight_adjacency(self):
        rng = np.random.default_rng(29)
        for _ in range(6):
            img = random_image(rng, 3, 3)
            for lam in (0.3, 0.75):
                lm = segment(img, lam, EIGHT)
                assert canonical_labels(lm.labels) == brute_partition(img, lam, adjacency=8)

    def test_refinement_monotone(self):
        rng = np.random.default_rng(31)
        grid = [k / 10 for k in range(11)]
        for _ in range(5):
            img = random_image(rng, 6, 6)
            prev = None
            for lam in grid:
                lm = segment(img, lam)
                if prev is not None:
                    assert lm.component_count >= prev.component_count
                    pairs = {
                        (int(l2), int(l1))
                        for l2, l1 in zip(lm.labels.ravel(), prev.labels.ravel())
                    }
                    # each finer component maps into exactly one coarser one
                    assert len({p[0] for p in pairs}) == len(pairs)
                prev = lm

    def test_full_tolerance_components_constant(self):
        rng = np.random.default_rng(37)
        img = random_image(rng, 5, 5)
        lm = segment(img, 1.0)
        for label in range(1, lm.component_count + 1):
            vals = img.pixels[lm.labels == label]
            assert np.all(vals == vals[0])

    def test_colabeling_transitive_via_connectedness(self):
        # pairwise thresholded connectedness agrees with shared labels,
        # so co-labeling is an equivalence relation
        rng = np.random.default_rng(41)
        img = random_image(rng, 3, 3)
        for lam in (0.2, 0.6, 0.9):
            lm = segment(img, lam)
            brute = brute_connectedness(img, 4, "min")
            for a in range(9):
                for b in range(a + 1, 9):
                    colabeled = lm.labels.ravel()[a] == lm.labels.ravel()[b]
                    assert colabeled == (brute[(a, b)] >= lam)

    def test_first_encounter_numbering(self):
        # 4-adjacency: diagonal equal pixels are not adjacent, so every
        # pixel is its own component, numbered in raster order
        img = ImageGrid.from_array([[0, 255], [255, 0]])
        lm = segment(img, 0.9)
        assert lm.labels.tolist() == [[1, 2], [3, 4]]


class TestLabelSerialization:
    def test_label_pgm_round_trip(self, tmp_path, corner_image):
        lm = segment(corner_image, 0.5)
        path = tmp_path / "labels.pgm"
        write_label_pgm(lm, path)
        img = read_pgm(path)
        assert img.maxval == 65535
        assert img.pixels.tolist() == lm.labels.tolist()

    def test_label_csv(self, tmp_path, corner_image):
        lm = segment(corner_image, 0.5)
        path = tmp_path / "labels.csv"
        write_label_csv(lm, path)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "x,y,label"
        assert lines[1:] == ["0,0,1", "1,0,1", "0,1,1", "1,1,2"]
