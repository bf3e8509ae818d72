from __future__ import annotations

"""
image_io.py

หน้าที่:
- อ่าน / เขียน float image เป็น PFM (Pf, float32) ผ่าน OpenCV
- เขียน preview 16-bit PGM (OpenCV) พร้อม sidecar `<file>.txt` เก็บ "min max" ไว้ de-quantize
- เซฟ / โหลด Scene เป็นโฟลเดอร์: depth.pfm, amplitude.pfm, offset.pfm, metadata.json
- เซฟ / โหลด measurement vector เป็น text (float64, 17 หลัก)
"""

import json
from pathlib import Path
from typing import Tuple

import cv2
import numpy as np

from .errors import DataFormatError
from .schema import Scene


SCENE_FILES = ("depth", "amplitude", "offset")


# --------------------------------------------------------
# PFM
# --------------------------------------------------------


def write_pfm(path: str | Path, image: np.ndarray) -> Path:
    """เขียน float32 ผ่าน OpenCV (PFM ต้องใช้นามสกุล .pfm)"""
    path = Path(path)
    img = np.asarray(image, dtype=np.float32)
    if img.ndim != 2:
        raise DataFormatError(f"PFM writer expects a 2D image, got shape {img.shape}")
    if path.suffix.lower() != ".pfm":
        raise DataFormatError(f"PFM path must end with .pfm, got {path.name}")
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        ok = cv2.imwrite(str(path), np.ascontiguousarray(img))
    except cv2.error as e:
        raise DataFormatError(f"OpenCV could not write {path}: {e}") from e
    if not ok:
        raise DataFormatError(f"OpenCV could not write {path}")
    return path


def read_pfm(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"PFM file not found: {path}")
    try:
        img = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    except cv2.error as e:
        raise DataFormatError(f"{path}: OpenCV could not decode PFM: {e}") from e
    if img is None:
        raise DataFormatError(f"{path}: OpenCV could not decode PFM")
    if img.dtype != np.float32 or img.ndim != 2:
        raise DataFormatError(f"{path}: only greyscale 'Pf' PFM is supported, got {img.dtype} {img.shape}")
    return img.astype(np.float64)


# --------------------------------------------------------
# 16-bit PGM
# --------------------------------------------------------


def write_pgm16(path: str | Path, image: np.ndarray) -> Tuple[float, float]:
    """quantize แบบ affine เป็น uint16 แล้วเขียน min/max ลง sidecar"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    img = np.asarray(image, dtype=np.float64)
    lo, hi = float(np.min(img)), float(np.max(img))
    span = hi - lo
    if span > 0:
        q = np.round((img - lo) / span * 65535.0)
    else:
        q = np.zeros_like(img)
    if not cv2.imwrite(str(path), q.astype(np.uint16)):
        raise DataFormatError(f"OpenCV could not write {path}")
    Path(str(path) + ".txt").write_text(f"{lo!r} {hi!r}\n", encoding="utf-8")
    return lo, hi


def read_pgm16(path: str | Path) -> np.ndarray:
    path = Path(path)
    sidecar = Path(str(path) + ".txt")
    if not path.exists():
        raise FileNotFoundError(f"PGM file not found: {path}")
    q = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if q is None:
        raise DataFormatError(f"OpenCV could not read {path}")
    if not sidecar.exists():
        raise DataFormatError(f"missing quantization sidecar {sidecar}")
    try:
        lo, hi = (float(t) for t in sidecar.read_text(encoding="utf-8").split())
    except ValueError as e:
        raise DataFormatError(f"bad sidecar {sidecar}") from e
    return lo + q.astype(np.float64) / 65535.0 * (hi - lo)


# --------------------------------------------------------
# Scene / measurement
# --------------------------------------------------------


def save_scene(scene: Scene, out_dir: str | Path, preview: bool = True) -> Path:
    """
    เซฟ scene ลงโฟลเดอร์:

    - depth.pfm / amplitude.pfm / offset.pfm
    - metadata.json (ω, C, c, kind, seed)
    - depth.pgm (+ depth.pgm.txt) ถ้า preview=True
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    write_pfm(out_dir / "depth.pfm", scene.depth)
    write_pfm(out_dir / "amplitude.pfm", scene.amplitude)
    write_pfm(out_dir / "offset.pfm", np.broadcast_to(scene.offset, scene.shape))

    with (out_dir / "metadata.json").open("w", encoding="utf-8") as f:
        json.dump(scene.metadata(), f, ensure_ascii=False, indent=2, sort_keys=True)

    if preview:
        write_pgm16(out_dir / "depth.pgm", scene.depth)
    return out_dir


def load_scene(scene_dir: str | Path) -> Scene:
    scene_dir = Path(scene_dir)
    meta_path = scene_dir / "metadata.json"
    if not meta_path.exists():
        raise FileNotFoundError(f"metadata.json not found in {scene_dir}")
    try:
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataFormatError(f"bad metadata.json in {scene_dir}") from e

    maps = {name: read_pfm(scene_dir / f"{name}.pfm") for name in SCENE_FILES}
    return Scene(
        depth=maps["depth"],
        amplitude=maps["amplitude"],
        offset=maps["offset"],
        emitted_amplitude=float(meta.get("emitted_amplitude", 1.0)),
        omega=float(meta["omega"]),
        c=float(meta.get("c", Scene.c)),
        kind=meta.get("kind"),
        seed=meta.get("seed"),
    )


def save_vector(path: str | Path, y: np.ndarray) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, np.asarray(y, dtype=np.float64).ravel(), fmt="%.17g")
    return path


def load_vector(path: str | Path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"measurement file not found: {path}")
    try:
        return np.atleast_1d(np.loadtxt(path, dtype=np.float64))
    except ValueError as e:
        raise DataFormatError(f"bad measurement file {path}: {e}") from e
