from __future__ import annotations

"""
selection.py

เลือก sensing block จาก pool ของ candidate:

1) ใช้ candidate แต่ละตัวเป็นทุก block ของ matrix (tiled)
2) บีบอัด / reconstruct ชุด test image แล้ววัด residual ของ û, v̂ ทีละ row segment
3) แต่ละตำแหน่ง block เลือก candidate ที่ error เฉลี่ยต่ำสุด
   (เสมอกัน → seed ต่ำสุด, ไม่มี seed → เทียบค่า generator ไม่ขึ้นกับลำดับใน pool)
"""

from typing import List, Optional, Sequence

import numpy as np

from .errors import ConfigError, DimensionError
from .models import SolverSettings
from .schema import CandidatePool, CirculantBlockSpec, DifferencePair, SensingMatrix
from .seeding import child_seeds
from .sensing import random_block, tiled_sensing_matrix
from .pipeline import compress, recover_depth


def candidate_pool(
    count: int,
    w: int,
    r: int,
    p_zero: float = 1.0 / 3.0,
    seed: int = 0,
    a: float = 1.0,
) -> CandidatePool:
    """candidate count ตัว แต่ละตัวมี seed ของตัวเองจาก stream "pool" """
    if count < 1:
        raise ConfigError(f"candidate count must be >= 1, got {count}")
    seeds = child_seeds(seed, "pool", count)
    return CandidatePool(candidates=[random_block(w, r, p_zero, s, a) for s in seeds])


def _canonical(pool: CandidatePool) -> CandidatePool:
    order = pool.canonical_order()
    errors = None if pool.errors is None else np.asarray(pool.errors)[order]
    image_errors = None if pool.image_errors is None else np.asarray(pool.image_errors)[order]
    return CandidatePool(
        candidates=[pool.candidates[i] for i in order],
        errors=errors,
        image_count=pool.image_count,
        image_errors=image_errors,
    )


def segment_errors(pair: DifferencePair, estimate: DifferencePair, w: int) -> np.ndarray:
    """Σ (u − û)² + (v − v̂)² ของแต่ละ row segment ยาว w (เรียงแบบ row-major)"""
    sq = (np.asarray(pair.u) - estimate.u) ** 2 + (np.asarray(pair.v) - estimate.v) ** 2
    n1, n2 = sq.shape
    return sq.reshape(n1 * (n2 // w), w).sum(axis=1)


def evaluate_pool(
    pool: CandidatePool,
    test_images: Sequence[DifferencePair],
    method: str = "tv-block",
    settings: Optional[SolverSettings] = None,
) -> CandidatePool:
    """
    คำนวณ image_errors (C, I, K) ของทุก candidate บนทุก test image
    และ errors (C, K) = ค่าเฉลี่ยบนแกน image

    :return: pool ใหม่ที่เรียง candidate แบบ canonical แล้ว
    """
    if not pool.candidates:
        raise ConfigError("candidate pool is empty")
    if not test_images:
        raise ConfigError("selection needs at least one test image")

    shapes = {img.shape for img in test_images}
    if len(shapes) != 1:
        raise DimensionError(f"test images must share one shape, got {sorted(shapes)}")
    n1, n2 = shapes.pop()

    widths = {c.w for c in pool.candidates}
    if len(widths) != 1:
        raise DimensionError(f"candidates must share one width, got {sorted(widths)}")
    w = widths.pop()

    ordered = _canonical(pool)
    image_errors = np.zeros((len(ordered.candidates), len(test_images), n1 * (n2 // w)))
    for ci, cand in enumerate(ordered.candidates):
        M = tiled_sensing_matrix(cand, n1, n2)
        for ii, pair in enumerate(test_images):
            y_u, y_v = compress(pair, M)
            rec = recover_depth(y_u, y_v, M, method, settings, threads=1)
            image_errors[ci, ii] = segment_errors(pair, DifferencePair(rec.u, rec.v), w)

    print(f"[selection] evaluated {len(ordered.candidates)} candidates on {len(test_images)} image(s)")
    return CandidatePool(
        candidates=ordered.candidates,
        errors=image_errors.mean(axis=1),
        image_count=len(test_images),
        image_errors=image_errors,
    )


def select_candidates(
    pool: CandidatePool,
    test_images: Sequence[DifferencePair],
    method: str = "tv-block",
    settings: Optional[SolverSettings] = None,
) -> SensingMatrix:
    """ทุกตำแหน่ง block เลือก candidate ที่ error เฉลี่ยต่ำสุด"""
    if pool.errors is None:
        pool = evaluate_pool(pool, test_images, method, settings)
    else:
        pool = _canonical(pool)
    if not test_images:
        raise ConfigError("selection needs at least one test image")

    n1, n2 = test_images[0].shape
    # argmin คืนตัวแรกเมื่อเสมอ และ candidate เรียงแบบ canonical แล้ว
    winners = np.argmin(pool.errors, axis=0)
    blocks: List[CirculantBlockSpec] = [pool.candidates[i] for i in winners]
    w = blocks[0].w
    return SensingMatrix(blocks=tuple(blocks), n1=n1, n2=n2, w=w)
