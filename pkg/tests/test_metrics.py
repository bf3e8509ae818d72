import math

import numpy as np
import pytest

from tofcs.errors import DimensionError, UndefinedMetricsError
from tofcs.metrics import compute_metrics, evaluate


def test_identical_images():
    d = np.array([[1.0, 2.0], [0.5, 1.5]])
    m = compute_metrics(d, d.copy())
    assert m["mae"] == 0.0
    assert m["rmae"] == 0.0
    assert math.isinf(m["psnr"]) and m["psnr"] > 0


def test_known_values():
    d = np.array([[2.0, 2.0], [2.0, 2.0]])
    d_rec = np.array([[2.0, 2.0], [2.0, 1.0]])
    m = compute_metrics(d, d_rec)
    assert m["mae"] == pytest.approx(0.25)
    assert m["rmae"] == pytest.approx(12.5)
    # 10·log10(4 · 4 / 1)
    assert m["psnr"] == pytest.approx(10 * np.log10(16.0))


def test_argument_order_matters():
    a = np.array([1.0, 2.0, 4.0])
    b = np.array([1.0, 2.0, 3.0])
    assert compute_metrics(a, b)["psnr"] != pytest.approx(compute_metrics(b, a)["psnr"])


def test_mask_excludes_pixels():
    d = np.array([1.0, 1.0, 1.0])
    d_rec = np.array([1.0, 1.0, 100.0])
    m = compute_metrics(d, d_rec, mask=np.array([False, False, True]))
    assert m["mae"] == 0.0
    assert m["excluded"] == 1


def test_undefined_metrics():
    with pytest.raises(UndefinedMetricsError):
        compute_metrics(np.zeros(4), np.ones(4))
    with pytest.raises(UndefinedMetricsError):
        compute_metrics(np.ones(2), np.ones(2), mask=np.array([True, True]))


def test_shape_mismatch():
    with pytest.raises(DimensionError):
        compute_metrics(np.ones(3), np.ones(4))


def test_evaluate_builds_report():
    d = np.full((2, 2), 1.0)
    rep = evaluate(d, d * 0.9, scene="s0", method="tv-block", cr=2, iters=7, wall_s=0.1)
    row = rep.to_row()
    assert list(row) == ["scene", "method", "cr", "mae_m", "rmae_pct", "psnr_db", "iters", "wall_s"]
    assert row["rmae_pct"] == pytest.approx(10.0)
    assert row["cr"] == 2.0
    assert rep.iters == 7
