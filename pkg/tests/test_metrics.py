import numpy as np
import pytest

from autolabel import (
    PolygonAnnotation,
    UndefinedMetricError,
    mean_frame_time,
    object_error,
    pixel_error,
    rasterize_mask,
    repeatability_stats,
)
from autolabel.metrics import LabelingReport, format_report_table


def rect(u, v, w, h, class_id=1):
    return PolygonAnnotation(class_id, [[u, v], [u + w, v], [u + w, v + h], [u, v + h]])


def object_grid(count=20, class_id=1):
    polys = []
    for k in range(count):
        u = 30 + (k % 5) * 110
        v = 30 + (k // 5) * 100
        polys.append(rect(u, v, 80, 50, class_id))
    return polys


class TestMeanFrameTime:
    def test_amortized_initial_annotation(self):
        t = mean_frame_time(119.0, 400, machine_time_sec=0.0)
        assert t == 119.0 / 400
        assert round(t, 2) == 0.30

    def test_zero_initial_time(self):
        assert mean_frame_time(0.0, 50, machine_time_sec=5.0) == 0.1

    def test_single_frame(self):
        assert mean_frame_time(119.0, 1, machine_time_sec=2.5) == 121.5

    def test_invalid_counts(self):
        with pytest.raises(ValueError):
            mean_frame_time(10.0, 0)
        with pytest.raises(ValueError):
            mean_frame_time(-1.0, 10)


class TestObjectError:
    def test_identical_annotations_zero(self):
        truth = object_grid()
        assert object_error(truth, truth, 640, 480) == 0.0

    def test_one_missing_of_twenty_is_five_percent(self):
        truth = object_grid(20)
        predicted = truth[:-1]
        assert object_error(predicted, truth, 640, 480) == pytest.approx(0.05)

    def test_spurious_prediction_counts(self):
        truth = object_grid(20)
        predicted = truth + [rect(500, 400, 60, 40)]
        assert object_error(predicted, truth, 640, 480) == pytest.approx(0.05)

    def test_seventy_five_percent_rule(self):
        truth = [rect(100, 100, 100, 40)]
        # 80% of the truth area covered: correct
        mostly = [rect(120, 100, 80, 40)]
        assert object_error(mostly, truth, 640, 480) == 0.0
        # 70% covered: incorrect, and the prediction was matched (not spurious)
        under = [rect(130, 100, 70, 40)]
        assert object_error(under, truth, 640, 480) == 1.0

    def test_empty_truth_undefined(self):
        with pytest.raises(UndefinedMetricError):
            object_error([rect(0, 0, 10, 10)], [], 640, 480)

    def test_class_mismatch_never_matches(self):
        truth = [rect(100, 100, 100, 40, class_id=1)]
        predicted = [rect(100, 100, 100, 40, class_id=2)]
        assert object_error(predicted, truth, 640, 480) == pytest.approx(2.0)

    def test_removing_correct_object_never_decreases_error(self, rng):
        truth = object_grid(10)
        predicted = list(truth)
        previous = object_error(predicted, truth, 640, 480)
        while predicted:
            predicted = predicted[:-1]
            current = object_error(predicted, truth, 640, 480)
            assert current >= previous
            previous = current


class TestPixelError:
    def test_identical_masks_zero(self):
        mask = rasterize_mask([rect(10, 10, 50, 50).vertices], 200, 200)
        assert pixel_error(mask, mask) == 0.0

    def test_one_pixel_shift_counts_two_strips(self):
        a = rasterize_mask([rect(100, 100, 80, 50).vertices], 640, 480)
        b = rasterize_mask([rect(101, 100, 80, 50).vertices], 640, 480)
        assert pixel_error(a, b) == 100.0  # two 1x50 strips

    def test_per_object_averaging(self):
        a = rasterize_mask([rect(100, 100, 80, 50).vertices], 640, 480)
        b = rasterize_mask([rect(101, 100, 80, 50).vertices], 640, 480)
        assert pixel_error(a, b, n_objects=4) == 25.0

    def test_symmetry(self, rng):
        a = (rng.uniform(size=(60, 80)) > 0.5).astype(np.uint8) * 255
        b = (rng.uniform(size=(60, 80)) > 0.5).astype(np.uint8) * 255
        assert pixel_error(a, b) == pixel_error(b, a)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            pixel_error(np.zeros((10, 10)), np.zeros((10, 12)))


class TestRepeatabilityStats:
    def test_all_zero_trials(self):
        stats = repeatability_stats(np.zeros((5, 6)))
        assert stats.translation_max == (0.0, 0.0, 0.0)
        assert stats.rotation_max == (0.0, 0.0, 0.0)

    def test_single_trial_absolute_values(self):
        stats = repeatability_stats([[-1e-3, 2e-3, -3e-3, 0.1, -0.2, 0.3]])
        assert stats.translation_max == (1e-3, 2e-3, 3e-3)
        assert stats.rotation_max == (0.1, 0.2, 0.3)
        assert stats.rotation_max_overall == 0.3

    def test_componentwise_maxima(self, rng):
        devs = rng.normal(0, 1e-4, (300, 6))
        stats = repeatability_stats(devs)
        expected = np.max(np.abs(devs), axis=0)
        assert np.allclose(stats.translation_max, expected[:3])
        assert np.allclose(stats.rotation_max, expected[3:])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            repeatability_stats(np.zeros((0, 6)))


class TestReportFormatting:
    def test_table_mirrors_method_columns(self):
        reports = [
            LabelingReport("odometry", 400, 0.30, 0.0, 3.3),
            LabelingReport("fiducial", 400, 0.31, 0.0, 52.1),
        ]
        table = format_report_table(reports)
        lines = table.splitlines()
        assert "odometry" in lines[0] and "fiducial" in lines[0]
        assert any(line.startswith("Mean frame time, sec") for line in lines)
        assert any(line.startswith("Mean object error, %") for line in lines)
        assert any(line.startswith("Mean pixel error, pixels") for line in lines)
        pixel_line = next(l for l in lines if "pixel error" in l)
        assert "3.30" in pixel_line and "52.10" in pixel_line
