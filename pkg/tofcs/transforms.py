from __future__ import annotations

"""
transforms.py

sparsifying transform ของ solver:

- 2D Haar แบบ orthonormal หลายระดับ (Mallat layout, recurse ที่ block ซ้ายบน)
- discrete gradient แบบ forward difference (Neumann: difference สุดท้ายเป็น 0)
- divergence = −Dᵀ
"""

from typing import Tuple

import numpy as np

from .errors import DimensionError
from .schema import GradientField, HaarPlan


SQRT2 = np.sqrt(2.0)


def _check_plan(plan: HaarPlan, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (plan.rows, plan.cols):
        if x.size == plan.rows * plan.cols and x.ndim == 1:
            return x.reshape(plan.rows, plan.cols)
        raise DimensionError(f"Haar plan {plan.rows}x{plan.cols} got array of shape {x.shape}")
    return x


# --------------------------------------------------------
# Haar
# --------------------------------------------------------


def haar_forward(plan: HaarPlan, x: np.ndarray) -> np.ndarray:
    coeffs = _check_plan(plan, x).copy()
    rows, cols = plan.rows, plan.cols
    for _ in range(plan.levels):
        blk = coeffs[:rows, :cols]
        # แนวนอน
        lo = (blk[:, 0::2] + blk[:, 1::2]) / SQRT2
        hi = (blk[:, 0::2] - blk[:, 1::2]) / SQRT2
        blk = np.hstack([lo, hi])
        # แนวตั้ง
        lo = (blk[0::2] + blk[1::2]) / SQRT2
        hi = (blk[0::2] - blk[1::2]) / SQRT2
        coeffs[:rows, :cols] = np.vstack([lo, hi])
        rows //= 2
        cols //= 2
    return coeffs


def haar_inverse(plan: HaarPlan, coeffs: np.ndarray) -> np.ndarray:
    x = _check_plan(plan, coeffs).copy()
    for level in reversed(range(plan.levels)):
        rows, cols = plan.rows >> level, plan.cols >> level
        hr, hc = rows // 2, cols // 2
        blk = x[:rows, :cols].copy()

        lo, hi = blk[:hr].copy(), blk[hr:].copy()
        blk[0::2] = (lo + hi) / SQRT2
        blk[1::2] = (lo - hi) / SQRT2

        lo, hi = blk[:, :hc].copy(), blk[:, hc:].copy()
        blk[:, 0::2] = (lo + hi) / SQRT2
        blk[:, 1::2] = (lo - hi) / SQRT2
        x[:rows, :cols] = blk
    return x


# --------------------------------------------------------
# gradient / divergence
# --------------------------------------------------------


def gradient(x: np.ndarray) -> GradientField:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"gradient expects a 2D image, got shape {x.shape}")
    gx = np.zeros_like(x)
    gy = np.zeros_like(x)
    gx[:, :-1] = x[:, 1:] - x[:, :-1]
    gy[:-1, :] = x[1:, :] - x[:-1, :]
    return GradientField(gx=gx, gy=gy)


def divergence(g: GradientField) -> np.ndarray:
    """div = −Dᵀ ดังนั้น ⟨∇x, g⟩ = −⟨x, div g⟩"""
    gx = np.asarray(g.gx, dtype=np.float64)
    gy = np.asarray(g.gy, dtype=np.float64)
    if gx.shape != gy.shape or gx.ndim != 2:
        raise DimensionError(f"gradient field components disagree: {gx.shape} vs {gy.shape}")

    div = np.zeros_like(gx)
    # ค่าที่ column / row สุดท้ายไม่ถูกใช้ (difference ตรงนั้นเป็น 0 เสมอ)
    div[:, :-1] += gx[:, :-1]
    div[:, 1:] -= gx[:, :-1]
    div[:-1, :] += gy[:-1, :]
    div[1:, :] -= gy[:-1, :]
    return div


def gradient_norm_sq(shape: Tuple[int, int]) -> float:
    """‖D‖² แบบ exact: eigenvalue สูงสุดของ Neumann Laplacian"""
    n1, n2 = shape
    return float(sum(2.0 - 2.0 * np.cos(np.pi * (k - 1) / k) for k in (n1, n2) if k > 1))


def tv_norm(x: np.ndarray, isotropic: bool = False) -> float:
    g = gradient(x)
    if isotropic:
        return float(np.sum(np.hypot(g.gx, g.gy)))
    return float(np.sum(np.abs(g.gx)) + np.sum(np.abs(g.gy)))
