from __future__ import annotations

"""
solvers.py

sparse recovery สำหรับ difference image ที่ถูกบีบอัด:

- fista_solve       : λ‖z‖₁ + ‖B̃z − y‖² (z = Haar coefficient, B̃ = BΨ*)
- proximal_gradient : ตัวเดียวกันแต่ไม่มี momentum (baseline)
- chambolle_pock_tv : μ‖Dz‖₁ + ‖Bz − y‖² ด้วย primal-dual
- make_partition / reconstruct_blockwise / reconstruct_global

ทุก solver เริ่มที่ 0 และ deterministic (ไม่มี random ใน loop)
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional, Tuple, Union

import numpy as np
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from .errors import ConfigError, GeometryError, SolverError
from .models import FistaConfig, TvConfig
from .schema import BlockPartition, GradientField, HaarPlan, Region, SensingMatrix
from .sensing import as_operator, operator_norm, restrict, spectral_norm
from .transforms import divergence, gradient, gradient_norm_sq, haar_forward, haar_inverse, tv_norm
from .validator import raise_on_errors, validate_geometry


SolverKind = Literal["fista", "tv"]


@dataclass
class SolveResult:
    x: np.ndarray
    iterations: int
    objective: List[float] = field(default_factory=list)
    converged: bool = False     # True เมื่อหยุดด้วย stop_tol


@dataclass
class Reconstruction:
    image: np.ndarray
    iterations: int             # รวมทุก block
    blocks: int = 1


# --------------------------------------------------------
# prox
# --------------------------------------------------------


def soft_threshold(x: np.ndarray, t: float) -> np.ndarray:
    """prox ของ t‖·‖₁: sign(x)·max(|x| − t, 0)"""
    if t < 0:
        raise ConfigError(f"threshold must be >= 0, got {t}")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def project_linf(p: np.ndarray, radius: float) -> np.ndarray:
    return np.clip(p, -radius, radius)


def project_isotropic(px: np.ndarray, py: np.ndarray, radius: float) -> Tuple[np.ndarray, np.ndarray]:
    """project (px, py) ทีละ pixel ลงวงกลมรัศมี radius"""
    if radius <= 0:
        return np.zeros_like(px), np.zeros_like(py)
    scale = np.maximum(1.0, np.hypot(px, py) / radius)
    return px / scale, py / scale


# --------------------------------------------------------
# FISTA / ISTA
# --------------------------------------------------------


def _l1_objective(op: LinearOperator, z: np.ndarray, y: np.ndarray, lam: float) -> float:
    r = op.matvec(z) - y
    return float(lam * np.sum(np.abs(z)) + r @ r)


def _relative_change(new: np.ndarray, old: np.ndarray) -> float:
    denom = max(float(np.linalg.norm(new)), 1e-30)
    return float(np.linalg.norm(new - old)) / denom


def _resolve_norm(op: LinearOperator, op_norm: Optional[float]) -> float:
    if op_norm is not None:
        return float(op_norm)
    return operator_norm(op).value


def fista_solve(
    op,
    y: np.ndarray,
    cfg: FistaConfig,
    op_norm: Optional[float] = None,
) -> SolveResult:
    """
    FISTA สำหรับ λ‖z‖₁ + ‖op z − y‖²

    cfg.restart → reset momentum (t = 1) เมื่อ step ล่าสุดสวนทางกับ momentum
    (gradient-based adaptive restart) ทำให้ลู่เข้าแบบ linear เมื่อ op มี
    singular value ต่ำสุด > 0

    :param op_norm: ‖op‖₂ ถ้ารู้อยู่แล้ว (ไม่งั้นประมาณด้วย power iteration)
    """
    op = aslinearoperator(op)
    y = np.asarray(y, dtype=np.float64).ravel()
    step = cfg.resolve_step(_resolve_norm(op, op_norm))
    thresh = step * cfg.lam

    z = np.zeros(op.shape[1])
    v = z.copy()
    t = 1.0
    history: List[float] = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        grad = 2.0 * op.rmatvec(op.matvec(v) - y)
        z_new = soft_threshold(v - step * grad, thresh)
        if cfg.restart and float((v - z_new) @ (z_new - z)) > 0.0:
            t = 1.0
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        v = z_new + ((t - 1.0) / t_new) * (z_new - z)
        change = _relative_change(z_new, z)
        z, t = z_new, t_new
        if cfg.record_objective:
            history.append(_l1_objective(op, z, y, cfg.lam))
        if cfg.stop_tol is not None and change <= cfg.stop_tol:
            converged = True
            break

    if not np.all(np.isfinite(z)):
        raise SolverError("FISTA diverged (non-finite iterate)")
    return SolveResult(x=z, iterations=it, objective=history, converged=converged)


def proximal_gradient_solve(
    op,
    y: np.ndarray,
    cfg: FistaConfig,
    op_norm: Optional[float] = None,
) -> SolveResult:
    """ISTA: objective เดียวกับ fista_solve แต่ไม่มี momentum"""
    op = aslinearoperator(op)
    y = np.asarray(y, dtype=np.float64).ravel()
    step = cfg.resolve_step(_resolve_norm(op, op_norm))

    z = np.zeros(op.shape[1])
    history: List[float] = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        z_new = soft_threshold(z - step * 2.0 * op.rmatvec(op.matvec(z) - y), step * cfg.lam)
        change = _relative_change(z_new, z)
        z = z_new
        if cfg.record_objective:
            history.append(_l1_objective(op, z, y, cfg.lam))
        if cfg.stop_tol is not None and change <= cfg.stop_tol:
            converged = True
            break
    return SolveResult(x=z, iterations=it, objective=history, converged=converged)


# --------------------------------------------------------
# TV primal-dual
# --------------------------------------------------------


def tv_objective(op, z: np.ndarray, y: np.ndarray, mu: float, shape: Tuple[int, int], isotropic: bool = False) -> float:
    op = aslinearoperator(op)
    r = op.matvec(np.ravel(z)) - y
    return float(mu * tv_norm(np.reshape(z, shape), isotropic) + r @ r)


def stacked_norm(shape: Tuple[int, int], b_norm: float, mu: float) -> float:
    """ขอบบนของ ‖[D; B]‖ (แถวของ D ไม่มีผลเมื่อ μ = 0)"""
    if mu == 0:
        return float(b_norm)
    return float(np.sqrt(gradient_norm_sq(shape) + b_norm ** 2))


def chambolle_pock_tv(
    op,
    y: np.ndarray,
    shape: Tuple[int, int],
    cfg: TvConfig,
    op_norm: Optional[float] = None,
) -> SolveResult:
    """
    primal-dual สำหรับ μ‖Dz‖₁ + ‖Bz − y‖², K = [D; B]

    dual ของ μ‖·‖₁ → project ลง ℓ∞ ball (หรือ disc ถ้า isotropic)
    dual ของ ‖· − y‖² → q ← (q + σBz̄ − σy) / (1 + σ/2)
    primal prox = identity

    ‖K‖ ใช้ขอบบน √(‖D‖² + ‖B‖²) ซึ่ง ‖D‖² คำนวณได้ exact
    μ = 0 → dual ของ TV ถูก project เป็น 0 ทุก iteration จึงเหลือ K = B
    """
    op = aslinearoperator(op)
    y = np.asarray(y, dtype=np.float64).ravel()
    n1, n2 = shape
    if op.shape[1] != n1 * n2:
        raise GeometryError(f"operator acts on {op.shape[1]} pixels, image is {n1}x{n2}")

    b_norm = _resolve_norm(op, op_norm)
    k_norm = stacked_norm(shape, b_norm, cfg.mu)
    sigma, tau = cfg.resolve_steps(k_norm)
    mu, theta = cfg.mu, cfg.theta

    z = np.zeros(shape)
    z_bar = z.copy()
    px = np.zeros(shape)
    py = np.zeros(shape)
    q = np.zeros_like(y)
    history: List[float] = []
    converged = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        g = gradient(z_bar)
        px, py = px + sigma * g.gx, py + sigma * g.gy
        if cfg.isotropic:
            px, py = project_isotropic(px, py, mu)
        else:
            px, py = project_linf(px, mu), project_linf(py, mu)
        q = (q + sigma * op.matvec(z_bar.ravel()) - sigma * y) / (1.0 + 0.5 * sigma)

        z_old = z
        z = z + tau * divergence(GradientField(px, py)) - tau * op.rmatvec(q).reshape(shape)
        z_bar = z + theta * (z - z_old)

        if cfg.record_objective:
            history.append(tv_objective(op, z, y, mu, shape, cfg.isotropic))
        if cfg.stop_tol is not None and _relative_change(z, z_old) <= cfg.stop_tol:
            converged = True
            break

    if not np.all(np.isfinite(z)):
        raise SolverError("primal-dual TV solver diverged (non-finite iterate)")
    return SolveResult(x=z, iterations=it, objective=history, converged=converged)


# --------------------------------------------------------
# partition / drivers
# --------------------------------------------------------


def make_partition(n1: int, n2: int, b: int, w: int) -> BlockPartition:
    """tiling แบบ row-major, block ที่ขอบภาพถูกตัดให้พอดี"""
    raise_on_errors(validate_geometry(n1, n2, w, b=b), GeometryError)
    blocks = tuple(
        (r0, min(r0 + b, n1), c0, min(c0 + b, n2))
        for r0 in range(0, n1, b)
        for c0 in range(0, n2, b)
    )
    return BlockPartition(n1=n1, n2=n2, b=b, w=w, blocks=blocks)


def single_block_partition(M: SensingMatrix) -> BlockPartition:
    return BlockPartition(n1=M.n1, n2=M.n2, b=max(M.n1, M.n2), w=M.w, blocks=((0, M.n1, 0, M.n2),))


def _synthesis_operator(B: LinearOperator, plan: HaarPlan) -> LinearOperator:
    """B̃ = BΨ*: Haar coefficient → measurement"""
    return LinearOperator(
        shape=B.shape,
        matvec=lambda z: B.matvec(haar_inverse(plan, np.ravel(z)).ravel()),
        rmatvec=lambda r: haar_forward(plan, B.rmatvec(r)).ravel(),
        dtype=np.float64,
    )


def solve_region(
    method: SolverKind,
    M: SensingMatrix,
    y: np.ndarray,
    region: Region,
    cfg: Union[FistaConfig, TvConfig],
) -> Tuple[np.ndarray, int]:
    """แก้ปัญหาย่อยบนพื้นที่ region หนึ่ง คืน (ภาพของ region, จำนวน iteration)"""
    sub, index = restrict(M, region)
    y_sub = np.asarray(y, dtype=np.float64)[index]
    B = as_operator(sub)
    shape = (sub.n1, sub.n2)
    # Ψ unitary → ‖BΨ*‖ = ‖B‖
    b_norm = spectral_norm(sub)

    if method == "fista":
        if not isinstance(cfg, FistaConfig):
            raise ConfigError("fista needs a FistaConfig")
        plan = HaarPlan.for_shape(*shape)
        res = fista_solve(_synthesis_operator(B, plan), y_sub, cfg, op_norm=b_norm)
        return haar_inverse(plan, res.x), res.iterations

    if method == "tv":
        if not isinstance(cfg, TvConfig):
            raise ConfigError("tv needs a TvConfig")
        res = chambolle_pock_tv(B, y_sub, shape, cfg, op_norm=b_norm)
        return res.x, res.iterations

    raise ConfigError(f"unknown solver method: {method}")


def reconstruct_blockwise(
    method: SolverKind,
    M: SensingMatrix,
    y: np.ndarray,
    part: BlockPartition,
    cfg: Union[FistaConfig, TvConfig],
    threads: int = 1,
) -> Reconstruction:
    """
    แก้ทีละ block แล้วประกอบกลับเป็นภาพเต็ม

    block ไม่ทับกัน → เขียนผลแยก region ได้โดยไม่ขึ้นกับลำดับ
    """
    if (part.n1, part.n2) != (M.n1, M.n2):
        raise GeometryError(f"partition {part.n1}x{part.n2} != sensing layout {M.n1}x{M.n2}")
    y = np.asarray(y, dtype=np.float64).ravel()
    if y.size != M.m:
        raise GeometryError(f"expected {M.m} measurements, got {y.size}")

    work: Callable[[Region], Tuple[np.ndarray, int]] = lambda region: solve_region(method, M, y, region, cfg)
    if threads > 1 and len(part.blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, part.blocks))
    else:
        results = [work(region) for region in part.blocks]

    image = np.zeros((M.n1, M.n2))
    total = 0
    for (r0, r1, c0, c1), (block, iters) in zip(part.blocks, results):
        image[r0:r1, c0:c1] = block
        total += iters
    return Reconstruction(image=image, iterations=total, blocks=len(part.blocks))


def reconstruct_global(
    method: SolverKind,
    M: SensingMatrix,
    y: np.ndarray,
    cfg: Union[FistaConfig, TvConfig],
) -> Reconstruction:
    """ปัญหาเดียวทั้งภาพ (Haar plan ครอบทั้งภาพสำหรับ fista)"""
    return reconstruct_blockwise(method, M, y, single_block_partition(M), cfg, threads=1)
