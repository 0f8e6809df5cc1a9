"""Fit metrics, error CDF, separation parameter, box stats, bin analysis."""

import numpy as np
import pytest

from colmp.errors import (
    EmptyBin,
    InsufficientRows,
    LengthMismatch,
    ZeroRange,
    ZeroVariance,
)
from colmp.evaluation import (
    BinSpec,
    bin_analysis,
    box_stats,
    default_bins,
    error_cdf,
    fit_metrics,
    misclass_error_table,
    separation_param,
)
from colmp.dataset import dataset_stats
from colmp.fixtures import generate_fixture
from colmp.types import (
    ColumnFeatures,
    ColumnRecord,
    Dataset,
    DatasetStats,
    FailureMode,
    SectionShape,
)

FC, FSC, SC = FailureMode.FC, FailureMode.FSC, FailureMode.SC


class TestFitMetrics:
    def test_perfect(self):
        m = fit_metrics([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert m.r2 == 1.0 and m.mse == 0.0 and m.std_err == 0.0

    def test_mean_prediction_zero_r2(self):
        actual = [1.0, 2.0, 3.0]
        m = fit_metrics([2.0, 2.0, 2.0], actual)
        assert m.r2 == pytest.approx(0.0, abs=1e-15)

    def test_hand_arithmetic(self):
        m = fit_metrics([1.0, 2.0, 2.0], [1.0, 2.0, 3.0])
        assert m.mse == pytest.approx(1.0 / 3.0, abs=1e-15)
        assert m.r2 == pytest.approx(0.5, abs=1e-15)
        # population std of errors (0, 0, 1): sqrt(2/9)
        assert m.std_err == pytest.approx((2.0 / 9.0) ** 0.5, abs=1e-12)

    def test_r2_identity(self):
        rng = np.random.default_rng(0)
        actual = rng.normal(size=50)
        est = actual + 0.3 * rng.normal(size=50)
        m = fit_metrics(est, actual)
        ss_tot = float(np.sum((actual - actual.mean()) ** 2))
        assert m.r2 == pytest.approx(1.0 - m.mse * len(actual) / ss_tot,
                                     abs=1e-12)

    def test_errors(self):
        with pytest.raises(LengthMismatch):
            fit_metrics([1.0], [1.0, 2.0])
        with pytest.raises(ZeroVariance):
            fit_metrics([1.0, 2.0], [3.0, 3.0])


class TestErrorCdf:
    def test_three_points(self):
        pts = error_cdf([-1.0, 0.0, 2.0])
        assert pts == ((-1.0, pytest.approx(1 / 3)),
                       (0.0, pytest.approx(2 / 3)), (2.0, 1.0))

    def test_single(self):
        assert error_cdf([0.5]) == ((0.5, 1.0),)

    def test_ties_collapse_to_highest_fraction(self):
        pts = error_cdf([1.0, 1.0, 2.0])
        assert pts == ((1.0, pytest.approx(2 / 3)), (2.0, 1.0))

    def test_last_fraction_exactly_one(self):
        rng = np.random.default_rng(1)
        pts = error_cdf(rng.normal(size=101))
        assert pts[-1][1] == 1.0
        xs = [p[0] for p in pts]
        fs = [p[1] for p in pts]
        assert xs == sorted(xs)
        assert fs == sorted(fs)

    def test_unconservative_share_identity(self):
        rng = np.random.default_rng(2)
        errors = rng.normal(size=200)
        share = float(np.mean(errors < 0.0))
        pts = error_cdf(errors)
        below = max((f for x, f in pts if x < 0.0), default=0.0)
        assert below == pytest.approx(share, abs=1e-12)


def stats_for(mean, rng_width, shape=SectionShape.RECTANGULAR):
    mean = np.asarray(mean, dtype=float)
    width = np.asarray(rng_width, dtype=float)
    return DatasetStats(
        shape=shape, n=10, mean=mean, minimum=mean - width / 2,
        maximum=mean + width / 2, value_range=width,
        std=np.ones(6),
        zero_range_features=tuple(
            n for n, w in zip(
                ("a_over_d", "axial_ratio", "rho_l", "rho_t", "s_over_d",
                 "vy_over_vo"), width) if w == 0.0),
    )


class TestSeparation:
    def test_zero_at_mean(self):
        mean = np.array([3.0, 0.2, 0.02, 0.01, 0.5, 0.8])
        stats = stats_for(mean, np.ones(6))
        f = ColumnFeatures.from_array(mean)
        assert separation_param(f, stats) == 0.0

    def test_one_at_endpoints(self):
        mean = np.array([3.0, 0.2, 0.02, 0.01, 0.5, 0.8])
        width = np.array([2.0, 0.2, 0.02, 0.01, 0.4, 0.8])
        stats = stats_for(mean, width)
        f = ColumnFeatures.from_array(mean + width / 2)  # all d_i = +0.5
        assert separation_param(f, stats) == pytest.approx(1.0, abs=1e-12)

    def test_single_offset_feature(self):
        mean = np.array([3.0, 0.2, 0.02, 0.01, 0.5, 0.8])
        width = np.ones(6)
        stats = stats_for(mean, width)
        v = mean.copy()
        v[0] += 0.5
        f = ColumnFeatures.from_array(v)
        assert separation_param(f, stats) == pytest.approx(
            0.5 / (0.5 * np.sqrt(6.0)), abs=1e-12)

    def test_zero_range_raises(self):
        mean = np.array([3.0, 0.2, 0.02, 0.01, 0.5, 0.8])
        width = np.array([1.0, 0.0, 1.0, 1.0, 1.0, 1.0])
        stats = stats_for(mean, width)
        with pytest.raises(ZeroRange):
            separation_param(ColumnFeatures.from_array(mean), stats)

    def test_affine_rescaling_invariance(self):
        """Scaling any feature, its mean and its range together leaves the
        separation unchanged."""
        ds = generate_fixture(seed=21, n_rect=30, n_circ=0)
        stats = dataset_stats(ds, SectionShape.RECTANGULAR)
        f = ds.records[0].features
        base = separation_param(f, stats)

        scale = np.array([2.0, 3.0, 10.0, 0.5, 4.0, 1.5])
        scaled_stats = DatasetStats(
            shape=stats.shape, n=stats.n, mean=stats.mean * scale,
            minimum=stats.minimum * scale, maximum=stats.maximum * scale,
            value_range=stats.value_range * scale, std=stats.std * scale,
        )
        scaled_f = ColumnFeatures.from_array(f.as_array() * scale)
        assert separation_param(scaled_f, scaled_stats) == pytest.approx(
            base, rel=1e-12)


class TestBoxStats:
    def test_one_to_five(self):
        b = box_stats([1.0, 2.0, 3.0, 4.0, 5.0])
        assert (b.minimum, b.q1, b.median, b.q3, b.maximum) == \
            (1.0, 2.0, 3.0, 4.0, 5.0)
        assert b.outliers == ()

    def test_constant(self):
        b = box_stats([2.0, 2.0, 2.0])
        assert b.minimum == b.q1 == b.median == b.q3 == b.maximum == 2.0

    def test_outlier_fence(self):
        b = box_stats([1.0, 2.0, 3.0, 4.0, 100.0])
        # q3 + 1.5 IQR = 4 + 3 = 7 < 100
        assert b.outliers == (100.0,)

    def test_ordering_invariant(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            b = box_stats(rng.normal(size=rng.integers(1, 40)))
            assert b.minimum <= b.q1 <= b.median <= b.q3 <= b.maximum


def _records_with_rule(n=120, seed=4):
    """Short columns (a/d < 3) follow a different response rule, so a
    bin-local calibration must beat the global one on that bin."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(n):
        ad = rng.uniform(1.0, 8.0)
        axial = rng.uniform(0.0, 0.7)
        f = ColumnFeatures(span_depth=ad, axial_ratio=axial,
                           rho_l=rng.uniform(0.005, 0.04),
                           rho_t=rng.uniform(0.0005, 0.02),
                           spacing_depth=rng.uniform(0.1, 1.0),
                           shear_ratio=rng.uniform(0.2, 1.5))
        if ad < 3.0:
            mp_a = 0.06 - 0.05 * axial + 0.002 * ad
        else:
            mp_a = 0.02 + 0.03 * axial - 0.001 * ad
        mp_a += rng.normal(0.0, 0.001)
        mp_a = max(mp_a, 0.0)
        rows.append(ColumnRecord(
            id=f"S{i}", shape=SectionShape.RECTANGULAR, features=f,
            mp_a=mp_a, mp_b=mp_a + 0.01, mode=FailureMode.FC))
    return Dataset(rows)


class TestBinAnalysis:
    def test_whole_set_bin_coincides(self):
        ds = _records_with_rule()
        everything = BinSpec("all", lambda r: True)
        (report,) = bin_analysis(ds, [everything], target="a", k=3)
        assert report.r2_full == pytest.approx(report.r2_bin, abs=1e-12)
        assert report.mse_full == pytest.approx(report.mse_bin, abs=1e-12)
        assert report.n == len(ds)

    def test_bin_fit_beats_global_fit_on_structured_bin(self):
        ds = _records_with_rule()
        short = BinSpec("a/d<3", lambda r: r.features.span_depth < 3.0)
        (report,) = bin_analysis(ds, [short], target="a", k=3)
        assert report.r2_bin >= report.r2_full

    def test_tiny_bin_rejected(self):
        ds = _records_with_rule(n=60)
        tiny = BinSpec("3rows", lambda r: r.id in ("S0", "S1", "S2"))
        with pytest.raises(InsufficientRows):
            bin_analysis(ds, [tiny], target="a", k=3)

    def test_empty_bin_rejected(self):
        ds = _records_with_rule(n=60)
        empty = BinSpec("none", lambda r: False)
        with pytest.raises(EmptyBin):
            bin_analysis(ds, [empty], target="a", k=3)

    def test_default_bins_cover_fixture(self, fixture_ds):
        shaped = Dataset(fixture_ds.by_shape(SectionShape.RECTANGULAR))
        names = [b.name for b in default_bins()]
        assert len(names) == len(set(names)) == 9


class TestMisclassTable:
    def _features(self):
        return ColumnFeatures(3.0, 0.2, 0.02, 0.01, 0.5, 0.8)

    def _record(self, i, mode):
        return ColumnRecord(id=f"r{i}", shape=SectionShape.RECTANGULAR,
                            features=self._features(), mp_a=0.02,
                            mp_b=0.03, mode=mode)

    def test_all_correct_off_diagonal_empty(self):
        records = [self._record(i, FC) for i in range(3)]
        cells = misclass_error_table(records, [FC, FC, FC], [0.1, 0.2, 0.3])
        for cell in cells:
            if cell.observed is not cell.predicted:
                assert cell.n == 0
                assert cell.mean_error is None

    def test_singleton_cell(self):
        records = [self._record(0, FSC)]
        cells = misclass_error_table(records, [FC], [0.0044])
        cell = next(c for c in cells
                    if c.observed is FSC and c.predicted is FC)
        assert cell.n == 1
        assert cell.min_error == cell.max_error == cell.mean_error == \
            cell.median_error == 0.0044
        assert cell.unconservative  # FC prediction for FSC column

    def test_counts_partition_total(self):
        rng = np.random.default_rng(5)
        modes = [FC, FSC, SC]
        records = [self._record(i, modes[rng.integers(0, 3)])
                   for i in range(50)]
        predicted = [modes[i] for i in rng.integers(0, 3, size=50)]
        errors = rng.normal(size=50)
        cells = misclass_error_table(records, predicted, errors)
        assert sum(c.n for c in cells) == 50
        assert len(cells) == 9

    def test_length_mismatch(self):
        records = [self._record(0, FC)]
        with pytest.raises(LengthMismatch):
            misclass_error_table(records, [FC, FSC], [0.1])
