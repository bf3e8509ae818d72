from __future__ import annotations

"""
sensing.py

หน้าที่:
- สร้าง partial circulant block (generator แบบ ternary {−a, 0, +a} + row selection Ω)
- ประกอบเป็น block-diagonal SensingMatrix (1 block ต่อ 1 row segment กว้าง w)
- apply forward / adjoint แบบ vectorized ทั้งภาพ
- ประมาณ RIP constant แบบ exhaustive / sampled สำหรับ block เล็ก ๆ
- ประมาณ operator norm ด้วย power iteration (ใช้ตั้ง step size ของ solver)
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Optional, Tuple

import numpy as np
from scipy import fft as sp_fft
from scipy.linalg import block_diag, circulant
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from .config import BLOCK_SPECTRUM_SPREAD, RIP_SUPPORT_CAP
from .errors import ConfigError, DimensionError, GeometryError, RipCapExceededError
from .schema import CirculantBlockSpec, Region, RipEstimate, SensingMatrix
from .seeding import child_seeds, rng_for


# --------------------------------------------------------
# circulant algebra
# --------------------------------------------------------


def circular_convolve(v: np.ndarray, x: np.ndarray, method: str = "fft") -> np.ndarray:
    """
    (v ∗ x)_j = Σ_i v[(j − i) mod w] · x_i  (index เริ่มที่ 0)

    method="fft" ใช้ convolution theorem, method="direct" คูณ circulant matrix ตรง ๆ
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    x = np.asarray(x, dtype=np.float64).ravel()
    if v.size != x.size:
        raise DimensionError(f"length mismatch: len(v)={v.size}, len(x)={x.size}")
    if v.size < 1:
        raise DimensionError("circular convolution needs w >= 1")

    if method == "direct":
        return circulant(v) @ x
    if method != "fft":
        raise ValueError(f"unknown convolution method: {method}")

    w = v.size
    return sp_fft.irfft(sp_fft.rfft(v) * sp_fft.rfft(x), n=w)


def apply_block(spec: CirculantBlockSpec, x: np.ndarray) -> np.ndarray:
    """scale · R_Ω (v ∗ x)"""
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != spec.w:
        raise DimensionError(f"block expects length {spec.w}, got {x.size}")
    return spec.scale * circular_convolve(spec.generator, x)[spec.selection]


def apply_forward(M: SensingMatrix, x: np.ndarray) -> np.ndarray:
    """y = M x โดย x คือภาพ n1 × n2 ที่ flatten แบบ row-major"""
    x = np.asarray(x, dtype=np.float64)
    if x.size != M.n:
        raise DimensionError(f"forward expects n={M.n} values, got {x.size}")
    segments = x.reshape(M.K, M.w)
    out = np.einsum("krw,kw->kr", M.stack, segments)
    return out[M.row_mask]


def apply_adjoint(M: SensingMatrix, y: np.ndarray) -> np.ndarray:
    """x = Mᵀ y (ยาว n)"""
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size != M.m:
        raise DimensionError(f"adjoint expects m={M.m} values, got {y.size}")
    padded = np.zeros(M.row_mask.shape)
    padded[M.row_mask] = y
    return np.einsum("krw,kr->kw", M.stack, padded).ravel()


def as_operator(M: SensingMatrix) -> LinearOperator:
    return LinearOperator(
        shape=(M.m, M.n),
        matvec=lambda x: apply_forward(M, x),
        rmatvec=lambda y: apply_adjoint(M, y),
        dtype=np.float64,
    )


def dense_matrix(M: SensingMatrix) -> np.ndarray:
    """ประกอบ block-diagonal matrix แบบ dense (ใช้เป็น oracle ใน test)"""
    return block_diag(*[blk.dense for blk in M.blocks])


# --------------------------------------------------------
# random construction
# --------------------------------------------------------


def sample_generator(
    w: int,
    p_zero: float = 1.0 / 3.0,
    a: float = 1.0,
    seed: int | np.random.SeedSequence | np.random.Generator | None = 0,
) -> np.ndarray:
    """แต่ละตัวเป็น 0 ด้วยความน่าจะเป็น p_zero ไม่งั้น ±a เท่า ๆ กัน"""
    if not 0.0 <= p_zero <= 1.0:
        raise ConfigError(f"p_zero must be in [0, 1], got {p_zero}")
    if w < 1:
        raise DimensionError("generator length w must be >= 1")
    if not a > 0:
        raise ConfigError(f"weight a must be positive, got {a}")
    rng = np.random.default_rng(seed)
    zero = rng.random(w) < p_zero
    signs = rng.integers(0, 2, size=w) * 2 - 1
    return np.where(zero, 0.0, a * signs.astype(np.float64))


def sample_selection(
    w: int,
    r: int,
    seed: int | np.random.SeedSequence | np.random.Generator | None = 0,
) -> np.ndarray:
    if r > w:
        raise ConfigError(f"cannot select r={r} rows out of w={w}")
    if r < 1:
        raise ConfigError(f"r must be >= 1, got {r}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(w, size=r, replace=False)).astype(np.int64)


def spectrum_in_band(v: np.ndarray, p_zero: float, a: float = 1.0, spread: float = BLOCK_SPECTRUM_SPREAD) -> bool:
    """
    |DFT(v)| ทุกตัวอยู่ใน [ref / spread, ref · spread], ref = a·√(max(w·(1 − p_zero), 1))

    eigenvalue ของ circulant = DFT ของ generator จึงได้ condition number ≤ spread²
    และ singular value ของทุก block อยู่ในช่วงเดียวกัน
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    mags = np.abs(np.fft.fft(v))
    ref = a * np.sqrt(max(v.size * (1.0 - p_zero), 1.0))
    return bool(mags.min() >= ref / spread and mags.max() <= ref * spread)


def random_block(
    w: int,
    r: int,
    p_zero: float = 1.0 / 3.0,
    seed: int = 0,
    a: float = 1.0,
    scale: Optional[float] = None,
) -> CirculantBlockSpec:
    """
    สุ่ม block 1 ก้อนจาก seed เดียว (generator ก่อน selection)

    ถ้า r = w จะสุ่ม generator ใหม่จาก stream เดิมจนกว่า spectrum_in_band
    """
    rng = np.random.default_rng(seed)
    generator = sample_generator(w, p_zero, a, rng)
    if r == w:
        tries = 0
        while not spectrum_in_band(generator, p_zero, a):
            tries += 1
            if tries > 100_000 or p_zero >= 1.0:
                raise ConfigError(f"no well-conditioned generator found for w={w}, p_zero={p_zero}")
            generator = sample_generator(w, p_zero, a, rng)
    selection = np.arange(w) if r == w else sample_selection(w, r, rng)
    return CirculantBlockSpec(
        generator=generator,
        selection=selection,
        scale=scale if scale is not None else 1.0 / np.sqrt(r),
        seed=int(seed),
        p_zero=p_zero,
    )


def random_sensing_matrix(
    n1: int,
    n2: int,
    w: int,
    r: int,
    p_zero: float = 1.0 / 3.0,
    seed: int = 0,
    a: float = 1.0,
    scale: Optional[float] = None,
) -> SensingMatrix:
    """1 block อิสระต่อ row segment แต่ละ block ได้ seed ของตัวเองจาก stream "matrix" """
    if w < 1 or n2 % w != 0:
        raise GeometryError(f"segment width w={w} must divide n2={n2}")
    if not 1 <= r <= w:
        raise GeometryError(f"need 1 <= r <= w, got r={r}, w={w}")
    K = n1 * (n2 // w)
    seeds = child_seeds(seed, "matrix", K)
    blocks = [random_block(w, r, p_zero, s, a, scale) for s in seeds]
    return SensingMatrix(blocks=tuple(blocks), n1=n1, n2=n2, w=w)


def identity_block(w: int) -> CirculantBlockSpec:
    generator = np.zeros(w)
    generator[0] = 1.0
    return CirculantBlockSpec(generator=generator, selection=np.arange(w), scale=1.0)


def identity_sensing_matrix(n1: int, n2: int, w: int) -> SensingMatrix:
    blk = identity_block(w)
    return SensingMatrix(blocks=(blk,) * (n1 * (n2 // w)), n1=n1, n2=n2, w=w)


def tiled_sensing_matrix(spec: CirculantBlockSpec, n1: int, n2: int) -> SensingMatrix:
    """ใช้ block เดียวกันทุกตำแหน่ง (ใช้ตอนประเมิน candidate)"""
    return SensingMatrix(blocks=(spec,) * (n1 * (n2 // spec.w)), n1=n1, n2=n2, w=spec.w)


def restrict(M: SensingMatrix, region: Region) -> Tuple[SensingMatrix, np.ndarray]:
    """
    sub-matrix ที่ทำงานบนพื้นที่สี่เหลี่ยม region = (row0, row1, col0, col1)

    คอลัมน์ต้องตรงกับขอบ row segment
    :return: (sub-matrix, index ของ measurement ของพื้นที่นั้นใน y เต็ม)
    """
    row0, row1, col0, col1 = region
    if not (0 <= row0 < row1 <= M.n1 and 0 <= col0 < col1 <= M.n2):
        raise GeometryError(f"region {region} outside image {M.n1}x{M.n2}")
    if col0 % M.w or col1 % M.w:
        raise GeometryError(f"region columns {col0}:{col1} do not align with segment width w={M.w}")

    spr = M.segments_per_row
    rows = np.arange(row0, row1)
    segs = np.arange(col0 // M.w, col1 // M.w)
    ks = (rows[:, None] * spr + segs[None, :]).ravel()

    sub = SensingMatrix(
        blocks=tuple(M.blocks[k] for k in ks),
        n1=row1 - row0,
        n2=col1 - col0,
        w=M.w,
    )
    offsets = M.offsets
    index = np.concatenate([np.arange(offsets[k], offsets[k + 1]) for k in ks])
    return sub, index


def zero_fraction(M: SensingMatrix) -> float:
    total = sum(blk.w for blk in M.blocks)
    zeros = sum(int(np.count_nonzero(blk.generator == 0)) for blk in M.blocks)
    return zeros / total if total else 0.0


# --------------------------------------------------------
# RIP / operator norm
# --------------------------------------------------------


def _support_delta(A: np.ndarray, support: Tuple[int, ...]) -> float:
    sub = A[:, list(support)]
    sv = np.linalg.svd(sub, compute_uv=False)
    s_max = float(sv[0]) if sv.size else 0.0
    # ถ้า s > r จะมี singular value เป็นศูนย์อย่างน้อย 1 ตัว
    s_min = float(sv[-1]) if sub.shape[0] >= sub.shape[1] else 0.0
    return max(1.0 - s_min ** 2, s_max ** 2 - 1.0)


def estimate_rip(
    spec: CirculantBlockSpec,
    s: int,
    method: str = "exhaustive",
    cap: int = RIP_SUPPORT_CAP,
    n_samples: int = 1000,
    seed: int = 0,
) -> RipEstimate:
    """
    δ_s โดยประมาณ = max ของ max(1 − σ_min², σ_max² − 1) บนทุก support ขนาด s

    exhaustive ตรวจครบ C(w, s) support, sampled สุ่ม support แบบ uniform
    """
    w = spec.w
    if not 1 <= s <= w:
        raise ConfigError(f"sparsity s={s} must satisfy 1 <= s <= w={w}")
    A = spec.dense

    if method == "exhaustive":
        total = comb(w, s)
        if total > cap:
            raise RipCapExceededError(
                f"C({w}, {s}) = {total} supports exceeds cap {cap}; use method='sampled'"
            )
        delta = max(_support_delta(A, supp) for supp in combinations(range(w), s))
        return RipEstimate(sparsity=s, delta=max(delta, 0.0), method="exhaustive", supports_checked=total)

    if method == "sampled":
        rng = rng_for(seed, "support")
        delta = 0.0
        for _ in range(n_samples):
            supp = tuple(np.sort(rng.choice(w, size=s, replace=False)))
            delta = max(delta, _support_delta(A, supp))
        return RipEstimate(sparsity=s, delta=delta, method="sampled", supports_checked=n_samples)

    raise ConfigError(f"unknown RIP method: {method}")


@dataclass
class NormEstimate:
    value: float
    converged: bool
    iterations: int


def operator_norm(
    op,
    max_iters: int = 1000,
    tol: float = 1e-12,
    seed: int = 0,
) -> NormEstimate:
    """
    ‖op‖₂ ด้วย power iteration บน opᵀop

    ไม่ converge ภายใน max_iters → คืนค่าที่ดีที่สุดพร้อม converged=False
    """
    op = aslinearoperator(op)
    n = op.shape[1]
    x = np.random.default_rng(seed).standard_normal(n)
    x /= np.linalg.norm(x)

    lam = 0.0
    for it in range(1, max_iters + 1):
        ax = op.matvec(x)
        lam_new = float(ax @ ax)        # Rayleigh quotient ของ opᵀop
        z = op.rmatvec(ax)
        z_norm = float(np.linalg.norm(z))
        if z_norm == 0.0:
            return NormEstimate(value=0.0, converged=True, iterations=it)
        x = z / z_norm
        if abs(lam_new - lam) <= tol * lam_new:
            return NormEstimate(value=float(np.sqrt(lam_new)), converged=True, iterations=it)
        lam = lam_new

    print(f"[sensing] operator_norm did not converge in {max_iters} iterations")
    return NormEstimate(value=float(np.sqrt(lam)), converged=False, iterations=max_iters)


def spectral_norm(M: SensingMatrix) -> float:
    """‖M‖₂ แบบ exact = max ของ ‖block‖₂ (block-diagonal)"""
    seen = {}
    for blk in M.blocks:
        if id(blk) not in seen:
            seen[id(blk)] = float(np.linalg.norm(blk.dense, 2))
    return max(seen.values()) if seen else 0.0
