from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Tuple

import math

import numpy as np
from scipy.linalg import circulant

from .config import DEFAULT_OMEGA, SPEED_OF_LIGHT
from .errors import DimensionError, GeometryError


# พิกัด block ในภาพ: (row0, row1, col0, col1) แบบ half-open
Region = Tuple[int, int, int, int]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


# --------------------------------------------------------
# Sensing
# --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CirculantBlockSpec:
    """partial circulant block 1 ก้อน: scale · R_Ω C_v ขนาด r × w"""
    generator: np.ndarray            # v ยาว w มีค่าใน {−a, 0, +a}
    selection: np.ndarray            # Ω เรียงจากน้อยไปมาก, |Ω| = r
    scale: float                     # default 1/√r
    seed: Optional[int] = None       # seed ที่ใช้สุ่ม (ถ้ามี) ใช้ตัดสินเสมอตอนเลือก candidate
    p_zero: Optional[float] = None

    def __post_init__(self) -> None:
        gen = np.array(self.generator, dtype=np.float64).ravel()
        sel = np.array(self.selection, dtype=np.int64).ravel()

        if gen.size < 1:
            raise DimensionError("generator must have length w >= 1")
        if sel.size < 1 or sel.size > gen.size:
            raise DimensionError(f"selection size r={sel.size} must satisfy 1 <= r <= w={gen.size}")
        if np.unique(sel).size != sel.size:
            raise DimensionError("selection indices must be distinct")
        if sel.min() < 0 or sel.max() >= gen.size:
            raise DimensionError(f"selection indices must lie in [0, {gen.size})")
        if not (self.scale > 0):
            raise DimensionError(f"scale must be positive, got {self.scale}")

        nonzero = np.abs(gen[gen != 0])
        if nonzero.size and not np.all(nonzero == nonzero[0]):
            raise DimensionError("generator entries must be in {-a, 0, +a} for a single a > 0")

        object.__setattr__(self, "generator", _readonly(gen))
        object.__setattr__(self, "selection", _readonly(np.sort(sel)))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def w(self) -> int:
        return int(self.generator.size)

    @property
    def r(self) -> int:
        return int(self.selection.size)

    @property
    def a(self) -> float:
        nonzero = np.abs(self.generator[self.generator != 0])
        return float(nonzero[0]) if nonzero.size else 1.0

    @cached_property
    def dense(self) -> np.ndarray:
        # circulant(v)[i, j] = v[(i − j) mod w]
        return _readonly(self.scale * circulant(self.generator)[self.selection])

    def same_as(self, other: "CirculantBlockSpec") -> bool:
        return (
            np.array_equal(self.generator, other.generator)
            and np.array_equal(self.selection, other.selection)
            and self.scale == other.scale
        )


@dataclass(frozen=True, eq=False)
class SensingMatrix:
    """
    block-diagonal measurement matrix M = diag(M_1, ..., M_K)

    block k ทำงานบน row segment ที่ k (เรียงแบบ row-major):
    แถว k // (n2 / w), คอลัมน์ (k % (n2 / w)) · w ถึง +w
    """
    blocks: Tuple[CirculantBlockSpec, ...]
    n1: int
    n2: int
    w: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if self.n1 < 1 or self.n2 < 1 or self.w < 1:
            raise GeometryError(f"invalid layout n1={self.n1}, n2={self.n2}, w={self.w}")
        if self.n2 % self.w != 0:
            raise GeometryError(f"segment width w={self.w} must divide n2={self.n2}")
        expected = self.n1 * (self.n2 // self.w)
        if len(self.blocks) != expected:
            raise GeometryError(f"expected K={expected} blocks, got {len(self.blocks)}")
        for k, blk in enumerate(self.blocks):
            if blk.w != self.w:
                raise GeometryError(f"block {k} has width {blk.w}, layout width is {self.w}")

    @property
    def n(self) -> int:
        return self.n1 * self.n2

    @property
    def K(self) -> int:
        return len(self.blocks)

    @property
    def segments_per_row(self) -> int:
        return self.n2 // self.w

    @cached_property
    def block_rows(self) -> np.ndarray:
        return _readonly(np.array([blk.r for blk in self.blocks], dtype=np.int64))

    @cached_property
    def offsets(self) -> np.ndarray:
        """offset ของ measurement ของแต่ละ block (ยาว K + 1)"""
        return _readonly(np.concatenate([[0], np.cumsum(self.block_rows)]).astype(np.int64))

    @property
    def m(self) -> int:
        return int(self.offsets[-1])

    @property
    def compression_ratio(self) -> float:
        return self.n / self.m

    @cached_property
    def stack(self) -> np.ndarray:
        """dense block ทั้งหมดเป็น array (K, r_max, w) เติมแถวศูนย์ให้ block ที่ r น้อยกว่า"""
        r_max = int(self.block_rows.max())
        out = np.zeros((self.K, r_max, self.w))
        for k, blk in enumerate(self.blocks):
            out[k, : blk.r] = blk.dense
        return _readonly(out)

    @cached_property
    def row_mask(self) -> np.ndarray:
        r_max = int(self.block_rows.max())
        return _readonly(np.arange(r_max)[None, :] < self.block_rows[:, None])

    def segment_region(self, k: int) -> Region:
        row, seg = divmod(k, self.segments_per_row)
        return (row, row + 1, seg * self.w, (seg + 1) * self.w)


@dataclass
class RipEstimate:
    sparsity: int
    delta: float
    method: str                  # "exhaustive" | "sampled"
    supports_checked: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sparsity": self.sparsity,
            "delta": self.delta,
            "method": self.method,
            "supports_checked": self.supports_checked,
        }


# --------------------------------------------------------
# ToF model
# --------------------------------------------------------


@dataclass
class Scene:
    """ground truth สังเคราะห์ 1 ฉาก"""
    depth: np.ndarray                 # d (เมตร)
    amplitude: np.ndarray             # A ≥ 0
    offset: np.ndarray                # K (ambient / noise constant)
    emitted_amplitude: float = 1.0    # C
    omega: float = DEFAULT_OMEGA      # rad/s
    c: float = SPEED_OF_LIGHT
    kind: Optional[str] = None        # ชนิด phantom เช่น "books"
    seed: Optional[int] = None

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(np.shape(self.depth))

    @property
    def d_max(self) -> float:
        return math.pi * self.c / self.omega

    def metadata(self) -> Dict[str, Any]:
        return {
            "omega": self.omega,
            "emitted_amplitude": self.emitted_amplitude,
            "c": self.c,
            "kind": self.kind,
            "seed": self.seed,
            "n1": self.shape[0],
            "n2": self.shape[1],
        }


@dataclass
class PhaseImageSet:
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    p4: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(np.shape(self.p1))

    def as_tuple(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return (self.p1, self.p2, self.p3, self.p4)


@dataclass
class DifferencePair:
    u: np.ndarray    # p1 − p3
    v: np.ndarray    # p4 − p2

    @property
    def shape(self) -> Tuple[int, int]:
        return tuple(np.shape(self.u))


# --------------------------------------------------------
# Transforms
# --------------------------------------------------------


@dataclass(frozen=True)
class HaarPlan:
    """2D Haar แบบ orthonormal หลายระดับ บน block ขนาด rows × cols"""
    rows: int
    cols: int
    levels: int

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise DimensionError(f"invalid Haar block {self.rows}x{self.cols}")
        if self.levels < 0:
            raise DimensionError("levels must be >= 0")
        step = 2 ** self.levels
        if self.rows % step or self.cols % step:
            raise DimensionError(
                f"block {self.rows}x{self.cols} is not divisible by 2^{self.levels}"
            )

    @classmethod
    def square(cls, b: int, levels: int) -> "HaarPlan":
        if levels < 1:
            raise DimensionError("square Haar plans need levels >= 1")
        return cls(b, b, levels)

    @classmethod
    def for_shape(cls, rows: int, cols: int, max_levels: Optional[int] = None) -> "HaarPlan":
        """ใช้จำนวนระดับมากที่สุดที่ 2^L หารทั้งสองด้านลงตัว (28 → L = 2)"""
        levels = 0
        while rows % (2 ** (levels + 1)) == 0 and cols % (2 ** (levels + 1)) == 0:
            levels += 1
        if max_levels is not None:
            levels = min(levels, max_levels)
        return cls(rows, cols, levels)


@dataclass
class GradientField:
    gx: np.ndarray   # forward difference ตามคอลัมน์ (แนวนอน)
    gy: np.ndarray   # forward difference ตามแถว (แนวตั้ง)


# --------------------------------------------------------
# Solvers / pipeline
# --------------------------------------------------------


@dataclass(frozen=True)
class BlockPartition:
    n1: int
    n2: int
    b: int
    w: int
    blocks: Tuple[Region, ...]


@dataclass
class EvaluationReport:
    scene: str
    method: str
    cr: float
    mae: float           # เมตร
    rmae: float          # เปอร์เซ็นต์
    psnr: float          # dB (inf ถ้าภาพเหมือนกันทุก pixel)
    iters: int = 0
    wall_s: float = 0.0
    excluded: int = 0    # จำนวน pixel indeterminate ที่ตัดออก

    def to_row(self) -> Dict[str, Any]:
        """แถวของ CSV report"""
        return {
            "scene": self.scene,
            "method": self.method,
            "cr": self.cr,
            "mae_m": self.mae,
            "rmae_pct": self.rmae,
            "psnr_db": self.psnr,
            "iters": self.iters,
            "wall_s": self.wall_s,
        }


@dataclass
class CandidatePool:
    """candidate ของ sensing block และ error ต่อ (candidate, block position)"""
    candidates: List[CirculantBlockSpec] = field(default_factory=list)
    errors: Optional[np.ndarray] = None        # shape (C, K) เฉลี่ยทุก test image
    image_count: int = 0
    image_errors: Optional[np.ndarray] = None  # shape (C, I, K) ก่อนเฉลี่ย

    @property
    def seeds(self) -> List[Optional[int]]:
        return [c.seed for c in self.candidates]

    def canonical_order(self) -> List[int]:
        """เรียงตาม seed (ตัวที่ไม่มี seed อยู่ท้าย) แล้วตาม generator / selection / scale"""

        def key(i: int):
            c = self.candidates[i]
            return (
                c.seed is None,
                c.seed if c.seed is not None else 0,
                tuple(c.generator.tolist()),
                tuple(c.selection.tolist()),
                c.scale,
            )

        return sorted(range(len(self.candidates)), key=key)
