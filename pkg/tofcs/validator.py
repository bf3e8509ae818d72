from __future__ import annotations

"""
validator.py

ชุดฟังก์ชันตรวจความถูกต้องของ input ก่อนรัน pipeline:

- validate_scene: ตรวจ Scene (ขนาด map, A ≥ 0, ω > 0, depth ≥ 0)
- validate_matrix: ตรวจ SensingMatrix เทียบกับขนาดภาพ
- validate_geometry: ตรวจ n1, n2, w, r, b ก่อนสร้าง matrix / partition
- validate_all: รวมทุกอย่างแล้วคืน issues เป็น list[dict]

ใช้สำหรับ:
- กันไม่ให้ solver รันกับข้อมูลที่พัง
- log ปัญหาไว้ใน validation.json ข้าง output
"""

from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .errors import GeometryError
from .schema import Scene, SensingMatrix


def _issue(
    level: str,
    code: str,
    message: str,
    context: Dict[str, Any] | None = None,
) -> Dict[str, Any]:
    return {
        "level": level,   # "info" | "warning" | "error"
        "code": code,
        "message": message,
        "context": context or {},
    }


def validate_scene(scene: Scene) -> List[Dict[str, Any]]:
    issues: List[Dict[str, Any]] = []

    depth = np.asarray(scene.depth)
    amplitude = np.asarray(scene.amplitude)
    offset = np.asarray(scene.offset)

    if depth.ndim != 2 or depth.size == 0:
        issues.append(_issue("error", "BAD_DEPTH_SHAPE", f"depth must be a non-empty 2D map, got shape {depth.shape}"))
        return issues

    for name, arr in (("amplitude", amplitude), ("offset", offset)):
        if arr.ndim != 0 and arr.shape != depth.shape:
            issues.append(
                _issue(
                    "error",
                    "SHAPE_MISMATCH",
                    f"{name} shape {arr.shape} != depth shape {depth.shape}",
                    {"map": name},
                )
            )

    if np.any(~np.isfinite(depth)):
        issues.append(_issue("error", "NONFINITE_DEPTH", "depth contains NaN/inf"))
    elif np.any(depth < 0):
        issues.append(_issue("error", "NEGATIVE_DEPTH", "depth must be >= 0 everywhere"))

    if np.any(amplitude < 0):
        issues.append(_issue("error", "NEGATIVE_AMPLITUDE", "amplitude A must be >= 0 everywhere"))

    if not scene.omega > 0:
        issues.append(_issue("error", "BAD_OMEGA", f"omega must be > 0, got {scene.omega}"))
    elif np.any(np.isfinite(depth)) and float(np.max(depth)) >= scene.d_max:
        # ไม่ใช่ error: ระยะเกิน d_max จะ wrap ตามฟิสิกส์จริง
        issues.append(
            _issue(
                "warning",
                "DEPTH_WRAPS",
                f"max depth {float(np.max(depth)):.4f} m >= d_max {scene.d_max:.4f} m; depth will wrap",
                {"d_max": scene.d_max},
            )
        )

    if not scene.emitted_amplitude > 0:
        issues.append(_issue("error", "BAD_EMITTED_AMPLITUDE", "emitted amplitude C must be > 0"))

    if np.any(amplitude == 0):
        issues.append(
            _issue(
                "info",
                "ZERO_AMPLITUDE_PIXELS",
                "scene has zero-amplitude pixels; their phase is indeterminate",
                {"count": int(np.count_nonzero(amplitude == 0))},
            )
        )

    return issues


def validate_geometry(
    n1: int,
    n2: int,
    w: int,
    r: Optional[int] = None,
    b: Optional[int] = None,
) -> List[Dict[str, Any]]:
    issues: List[Dict[str, Any]] = []
    ctx = {"n1": n1, "n2": n2, "w": w, "r": r, "b": b}

    if n1 < 1 or n2 < 1:
        issues.append(_issue("error", "BAD_IMAGE_SIZE", f"image size must be positive, got {n1}x{n2}", ctx))
        return issues
    if w < 1 or n2 % w != 0:
        issues.append(_issue("error", "SEGMENT_WIDTH", f"w={w} must divide n2={n2}", ctx))
    if r is not None and not 1 <= r <= max(w, 1):
        issues.append(_issue("error", "BAD_ROW_COUNT", f"need 1 <= r <= w, got r={r}, w={w}", ctx))
    if b is not None:
        if w >= 1 and b % w != 0:
            issues.append(_issue("error", "BLOCK_NOT_MULTIPLE", f"block size b={b} must be a multiple of w={w}", ctx))
        if b > min(n1, n2):
            issues.append(_issue("error", "BLOCK_TOO_LARGE", f"block size b={b} exceeds image {n1}x{n2}", ctx))

    return issues


def validate_matrix(M: SensingMatrix, image_shape: Optional[Tuple[int, int]] = None) -> List[Dict[str, Any]]:
    issues: List[Dict[str, Any]] = []

    if image_shape is not None and tuple(image_shape) != (M.n1, M.n2):
        issues.append(
            _issue(
                "error",
                "MATRIX_IMAGE_MISMATCH",
                f"matrix layout {M.n1}x{M.n2} != image {image_shape[0]}x{image_shape[1]}",
            )
        )

    # block ที่มีคอลัมน์เป็นศูนย์ทั้งคอลัมน์จะมองไม่เห็น pixel นั้นเลย
    zero_cols = [k for k, blk in enumerate(M.blocks) if np.any(np.all(blk.dense == 0, axis=0))]
    if zero_cols:
        issues.append(
            _issue(
                "warning",
                "BLOCK_ZERO_COLUMN",
                f"{len(zero_cols)} block(s) have an all-zero column",
                {"blocks": zero_cols[:20]},
            )
        )

    return issues


def validate_all(
    scene: Optional[Scene] = None,
    matrix: Optional[SensingMatrix] = None,
) -> List[Dict[str, Any]]:
    issues: List[Dict[str, Any]] = []
    if scene is not None:
        issues.extend(validate_scene(scene))
    if matrix is not None:
        issues.extend(validate_matrix(matrix, scene.shape if scene is not None else None))
    return issues


def raise_on_errors(issues: List[Dict[str, Any]], exc_type: type = GeometryError) -> None:
    """ถ้ามี issue ระดับ error → raise พร้อมข้อความรวม"""
    errors = [i for i in issues if i["level"] == "error"]
    if errors:
        raise exc_type("; ".join(f"{i['code']}: {i['message']}" for i in errors))
