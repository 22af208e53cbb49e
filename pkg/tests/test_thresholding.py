import numpy as np
import pytest

from lambdaseg import (
    DegenerateHistogramError,
    Histogram,
    ImageGrid,
    kapur_threshold,
    otsu_threshold,
    peak_fraction_threshold,
    write_criterion_csv,
)
from oracles import kapur_oracle, otsu_oracle


def hist_from(counts_map, maxval=255):
    counts = np.zeros(maxval + 1, dtype=np.int64)
    for value, count in counts_map.items():
        counts[value] = count
    return Histogram(counts=counts, total=int(counts.sum()))


class TestKapur:
    def test_two_level_tie_breaks_low(self):
        res = kapur_threshold(hist_from({10: 2, 200: 2}))
        assert res.threshold == 10
        assert res.criterion_value == 0.0

    def test_four_values(self):
        res = kapur_threshold(hist_from({0: 1, 1: 1, 254: 1, 255: 1}))
        assert res.threshold == 1
        assert res.criterion_value == pytest.approx(2 * np.log(2), rel=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateHistogramError):
            kapur_threshold(hist_from({7: 100}))

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            counts = rng.integers(0, 50, 64)
            if np.count_nonzero(counts) < 2:
                continue
            h = Histogram(counts=counts, total=int(counts.sum()))
            res = kapur_threshold(h)
            o_t, o_v, o_curve = kapur_oracle(counts.tolist())
            assert res.criterion_value == pytest.approx(o_v, rel=1e-12, abs=1e-12)
            oracle_at_t = dict(o_curve)[res.threshold]
            assert oracle_at_t == pytest.approx(o_v, rel=1e-12, abs=1e-12)

    def test_curve_covers_valid_range(self):
        res = kapur_threshold(hist_from({10: 2, 200: 2}))
        ts = [t for t, _ in res.curve]
        assert ts == list(range(10, 200))

    def test_invariant_to_empty_bins(self):
        a = kapur_threshold(hist_from({5: 3, 40: 4}, maxval=63))
        b = kapur_threshold(hist_from({5: 3, 40: 4}, maxval=255))
        assert a.threshold == b.threshold
        assert a.criterion_value == b.criterion_value


class TestOtsu:
    def test_two_level_tie_breaks_low(self):
        assert otsu_threshold(hist_from({10: 2, 200: 2})).threshold == 10

    def test_lopsided(self):
        assert otsu_threshold(hist_from({0: 99, 255: 1})).threshold == 0

    def test_degenerate(self):
        with pytest.raises(DegenerateHistogramError):
            otsu_threshold(hist_from({0: 5}))

    def test_matches_exhaustive_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            counts = rng.integers(0, 50, 64)
            if np.count_nonzero(counts) < 2:
                continue
            h = Histogram(counts=counts, total=int(counts.sum()))
            res = otsu_threshold(h)
            o_t, o_v, o_curve = otsu_oracle(counts.tolist())
            assert res.criterion_value == pytest.approx(o_v, rel=1e-12)
            assert dict(o_curve)[res.threshold] == pytest.approx(o_v, rel=1e-12)

    def test_invariant_to_empty_bins(self):
        a = otsu_threshold(hist_from({5: 3, 40: 4}, maxval=63))
        b = otsu_threshold(hist_from({5: 3, 40: 4}, maxval=255))
        assert a.threshold == b.threshold
        assert a.criterion_value == pytest.approx(b.criterion_value, rel=1e-12)


class TestBimodalAgreement:
    def test_both_methods_pick_low_mode(self):
        for a, b in [(0, 200), (17, 230), (50, 255), (3, 212)]:
            h = hist_from({a: 5, b: 5})
            assert kapur_threshold(h).threshold == a
            assert otsu_threshold(h).threshold == a


class TestPeakFraction:
    def test_fraction_of_max(self):
        img = ImageGrid.from_array([[0, 100, 200]])
        assert peak_fraction_threshold(img, 0.45) == 90

    def test_full_fraction(self):
        img = ImageGrid.from_array([[12, 99]])
        assert peak_fraction_threshold(img, 1.0) == 99

    def test_rounding_half_up(self):
        img = ImageGrid.from_array(np.full((2, 2), 7))
        assert peak_fraction_threshold(img, 0.45) == 3

    def test_mode_source(self):
        img = ImageGrid.from_array([[10, 10, 10, 200]])
        assert peak_fraction_threshold(img, 1.0, source="mode") == 10
        assert peak_fraction_threshold(img, 0.5, source="mode") == 5

    def test_fraction_validated(self):
        img = ImageGrid.from_array([[1]])
        with pytest.raises(ValueError):
            peak_fraction_threshold(img, 0.0)
        with pytest.raises(ValueError):
            peak_fraction_threshold(img, 0.5, source="median")


class TestCriterionCsv:
    def test_reproducible_bytes(self, tmp_path):
        h = hist_from({0: 1, 1: 1, 254: 1, 255: 1})
        res = kapur_threshold(h)
        p1, p2 = tmp_path / "c1.csv", tmp_path / "c2.csv"
        write_criterion_csv(res, p1)
        write_criterion_csv(kapur_threshold(h), p2)
        assert p1.read_bytes() == p2.read_bytes()
        lines = p1.read_text().strip().splitlines()
        assert lines[0] == "t,criterion"
        assert len(lines) == len(res.curve) + 1
