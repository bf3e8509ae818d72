from __future__ import annotations

"""
metrics.py

MAE / RMAE / PSNR ระหว่าง depth อ้างอิง d กับ depth ที่ reconstruct ได้

- MAE  = mean |d − d_rec|                         (เมตร)
- RMAE = MAE / max|d| · 100                        (%)
- PSNR = 10·log10(N · max(d²) / Σ(d − d_rec)²)     (dB, +inf ถ้าเหมือนกันทุก pixel)

pixel ที่ mask = True (phase indeterminate) ไม่ถูกนับ
"""

from typing import Dict, Optional

import numpy as np

from .errors import DimensionError, UndefinedMetricsError
from .schema import EvaluationReport


def compute_metrics(
    d: np.ndarray,
    d_rec: np.ndarray,
    mask: Optional[np.ndarray] = None,
) -> Dict[str, float]:
    """argument มีลำดับ: PSNR normalize ด้วย d (reference)"""
    d = np.asarray(d, dtype=np.float64)
    d_rec = np.asarray(d_rec, dtype=np.float64)
    if d.shape != d_rec.shape:
        raise DimensionError(f"reference shape {d.shape} != reconstruction shape {d_rec.shape}")

    valid = np.ones(d.shape, dtype=bool) if mask is None else ~np.asarray(mask, dtype=bool)
    if valid.shape != d.shape:
        raise DimensionError(f"mask shape {valid.shape} != {d.shape}")
    count = int(np.count_nonzero(valid))
    if count == 0:
        raise UndefinedMetricsError("every pixel is masked; metrics are undefined")

    ref = d[valid]
    err = ref - d_rec[valid]
    peak = float(np.max(np.abs(ref)))
    if peak == 0.0:
        raise UndefinedMetricsError("reference depth is identically zero")

    mae = float(np.mean(np.abs(err)))
    sse = float(err @ err)
    psnr = float("inf") if sse == 0.0 else float(10.0 * np.log10(count * peak ** 2 / sse))
    return {
        "mae": mae,
        "rmae": mae / peak * 100.0,
        "psnr": psnr,
        "excluded": d.size - count,
    }


def evaluate(
    d: np.ndarray,
    d_rec: np.ndarray,
    scene: str,
    method: str,
    cr: float,
    mask: Optional[np.ndarray] = None,
    iters: int = 0,
    wall_s: float = 0.0,
) -> EvaluationReport:
    m = compute_metrics(d, d_rec, mask)
    return EvaluationReport(
        scene=scene,
        method=method,
        cr=float(cr),
        mae=m["mae"],
        rmae=m["rmae"],
        psnr=m["psnr"],
        iters=iters,
        wall_s=wall_s,
        excluded=int(m["excluded"]),
    )
