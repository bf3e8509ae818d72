from __future__ import annotations

"""
pipeline.py

ประกอบทุกขั้นตอนเข้าด้วยกัน:

  difference pair → compress (M·u, M·v) → reconstruct û, v̂ → phase → depth → metrics

- recover_depth            : recovery แบบสองขั้น (default)
- recover_depth_four_phase : บีบอัด / reconstruct p1..p4 แยกกัน แล้วค่อยหา difference
- sweep                    : วนทุก (scene, ratio, method) แล้วคืน report เรียงลำดับแล้ว
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from .config import DEFAULT_OMEGA, DEFAULT_SEGMENT_WIDTH, SPEED_OF_LIGHT
from .errors import ConfigError, DimensionError, TofcsError
from .metrics import evaluate
from .models import SolverSettings
from .schema import DifferencePair, EvaluationReport, PhaseImageSet, Scene, SensingMatrix
from .seeding import child_seeds
from .sensing import apply_forward, random_sensing_matrix
from .solvers import Reconstruction, make_partition, reconstruct_blockwise, reconstruct_global
from .tof_model import add_noise, depth_from_differences, phase_differences, simulate_phase_images


METHODS = ("fista-block", "fista-global", "tv-block", "tv-global")

REPORT_COLUMNS = ["scene", "method", "cr", "mae_m", "rmae_pct", "psnr_db", "iters", "wall_s"]


def parse_method(method: str) -> Tuple[str, str]:
    """'tv-global' → ('tv', 'global')"""
    if method not in METHODS:
        raise ConfigError(f"unknown method '{method}' (choose from {', '.join(METHODS)})")
    kind, mode = method.split("-")
    return kind, mode


# --------------------------------------------------------
# compress / reconstruct
# --------------------------------------------------------


def compress(pair: DifferencePair, M: SensingMatrix) -> Tuple[np.ndarray, np.ndarray]:
    if pair.shape != (M.n1, M.n2):
        raise DimensionError(f"difference images {pair.shape} != matrix layout {M.n1}x{M.n2}")
    return apply_forward(M, pair.u), apply_forward(M, pair.v)


def reconstruct_image(
    y: np.ndarray,
    M: SensingMatrix,
    method: str,
    settings: Optional[SolverSettings] = None,
    threads: Optional[int] = None,
) -> Reconstruction:
    """reconstruct ภาพเดียว (u, v หรือ phase image) ด้วย method ที่เลือก"""
    settings = settings or SolverSettings()
    kind, mode = parse_method(method)
    cfg = settings.fista_config(mode) if kind == "fista" else settings.tv_config(mode)
    if mode == "global":
        return reconstruct_global(kind, M, y, cfg)
    part = make_partition(M.n1, M.n2, settings.block_size, M.w)
    return reconstruct_blockwise(kind, M, y, part, cfg, threads=threads or settings.threads)


@dataclass
class DepthRecovery:
    depth: np.ndarray
    mask: np.ndarray            # True = phase indeterminate
    u: np.ndarray
    v: np.ndarray
    iterations: int = 0
    wall_s: float = 0.0


def recover_depth(
    y_u: np.ndarray,
    y_v: np.ndarray,
    M: SensingMatrix,
    method: str,
    settings: Optional[SolverSettings] = None,
    omega: float = DEFAULT_OMEGA,
    c: float = SPEED_OF_LIGHT,
    threads: Optional[int] = None,
    min_amplitude: float = 0.0,
) -> DepthRecovery:
    """สองขั้น: reconstruct û, v̂ ก่อน แล้วค่อยแปลงเป็น phase / depth"""
    start = time.perf_counter()
    rec_u = reconstruct_image(y_u, M, method, settings, threads)
    rec_v = reconstruct_image(y_v, M, method, settings, threads)
    pair = DifferencePair(u=rec_u.image, v=rec_v.image)
    depth, mask = depth_from_differences(pair, omega, c, min_amplitude=min_amplitude)
    return DepthRecovery(
        depth=depth,
        mask=mask,
        u=pair.u,
        v=pair.v,
        iterations=rec_u.iterations + rec_v.iterations,
        wall_s=time.perf_counter() - start,
    )


def recover_depth_from_phase_measurements(
    ys: Sequence[np.ndarray],
    M: SensingMatrix,
    method: str,
    settings: Optional[SolverSettings] = None,
    omega: float = DEFAULT_OMEGA,
    c: float = SPEED_OF_LIGHT,
    threads: Optional[int] = None,
) -> DepthRecovery:
    """reconstruct p1..p4 จาก measurement ทีละภาพ แล้วค่อยหา u, v"""
    if len(ys) != 4:
        raise DimensionError(f"four-phase recovery needs 4 measurement vectors, got {len(ys)}")
    start = time.perf_counter()
    recs = [reconstruct_image(y, M, method, settings, threads) for y in ys]
    pair = phase_differences(PhaseImageSet(*(r.image for r in recs)))
    depth, mask = depth_from_differences(pair, omega, c)
    return DepthRecovery(
        depth=depth,
        mask=mask,
        u=pair.u,
        v=pair.v,
        iterations=sum(r.iterations for r in recs),
        wall_s=time.perf_counter() - start,
    )


def recover_depth_four_phase(
    phases: PhaseImageSet,
    M: SensingMatrix,
    method: str,
    settings: Optional[SolverSettings] = None,
    omega: float = DEFAULT_OMEGA,
    c: float = SPEED_OF_LIGHT,
    threads: Optional[int] = None,
) -> DepthRecovery:
    """บีบอัด p1..p4 แยกกัน แล้ว reconstruct ทีละภาพ"""
    ys = [apply_forward(M, p) for p in phases.as_tuple()]
    return recover_depth_from_phase_measurements(ys, M, method, settings, omega, c, threads)


# --------------------------------------------------------
# sweep
# --------------------------------------------------------


def rows_for_ratio(w: int, ratio: float) -> int:
    """r = round(w / ratio), ต้องอยู่ใน [1, w]"""
    if not ratio > 0:
        raise ConfigError(f"compression ratio must be > 0, got {ratio}")
    r = int(round(w / ratio))
    if not 1 <= r <= w:
        raise ConfigError(f"ratio {ratio} is infeasible for w={w} (r={r})")
    return r


@dataclass
class SweepResult:
    reports: List[EvaluationReport] = field(default_factory=list)
    skipped: List[Dict[str, object]] = field(default_factory=list)


def sweep(
    scenes: Sequence[Tuple[str, Scene]],
    ratios: Sequence[float],
    methods: Sequence[str],
    w: int = DEFAULT_SEGMENT_WIDTH,
    p_zero: float = 1.0 / 3.0,
    seed: int = 0,
    settings: Optional[SolverSettings] = None,
    noise_sigma: float = 0.0,
    threads: int = 1,
    skip_infeasible: bool = False,
    four_phase: bool = False,
    progress: bool = False,
) -> SweepResult:
    """
    1 report ต่อ (scene, ratio, method)

    matrix ของแต่ละ ratio ใช้ seed เดียวกันทุก scene ที่ขนาดเท่ากัน
    task แต่ละตัวอิสระต่อกัน จึงรันขนานได้แล้วค่อยเรียงผลทีหลัง
    """
    settings = settings or SolverSettings()
    for m in methods:
        parse_method(m)

    result = SweepResult()
    if not methods or not ratios or not scenes:
        return result

    feasible: List[Tuple[float, int]] = []
    for ratio in ratios:
        try:
            feasible.append((ratio, rows_for_ratio(w, ratio)))
        except ConfigError as e:
            if not skip_infeasible:
                raise
            _skip(result, None, ratio, None, e)

    noise_seeds = child_seeds(seed, "noise", len(scenes))
    matrices: Dict[Tuple[int, int, int], SensingMatrix] = {}
    tasks = []
    for (name, scene), noise_seed in zip(scenes, noise_seeds):
        phases = simulate_phase_images(scene)
        if noise_sigma > 0:
            phases = add_noise(phases, noise_sigma, noise_seed)
        pair = phase_differences(phases)
        for ratio, r in feasible:
            key = (scene.shape[0], scene.shape[1], r)
            if key not in matrices:
                try:
                    matrices[key] = random_sensing_matrix(key[0], key[1], w, r, p_zero=p_zero, seed=seed)
                except TofcsError as e:
                    if not skip_infeasible:
                        raise
                    _skip(result, name, ratio, None, e)
                    continue
            for method in methods:
                tasks.append((name, ratio, scene, phases, pair, matrices[key], method))

    def run(task) -> Optional[EvaluationReport]:
        name, ratio, scene, phases, pair, M, method = task
        try:
            return _evaluate_task(name, scene, phases, pair, M, method)
        except TofcsError as e:
            if not skip_infeasible:
                raise
            _skip(result, name, ratio, method, e)
            return None

    def _evaluate_task(name, scene, phases, pair, M, method) -> EvaluationReport:
        if four_phase:
            rec = recover_depth_four_phase(phases, M, method, settings, scene.omega, scene.c, threads=1)
        else:
            y_u, y_v = compress(pair, M)
            rec = recover_depth(y_u, y_v, M, method, settings, scene.omega, scene.c, threads=1)
        return evaluate(
            scene.depth,
            rec.depth,
            scene=name,
            method=method,
            cr=M.w / M.blocks[0].r,
            mask=rec.mask,
            iters=rec.iterations,
            wall_s=rec.wall_s,
        )

    bar = tqdm(total=len(tasks), desc="sweep", disable=not progress)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            reports = []
            for rep in pool.map(run, tasks):
                reports.append(rep)
                bar.update(1)
    else:
        reports = []
        for task in tasks:
            reports.append(run(task))
            bar.update(1)
    bar.close()

    result.reports = sorted(
        (rep for rep in reports if rep is not None),
        key=lambda rep: (rep.scene, rep.method, rep.cr),
    )
    result.skipped.sort(key=lambda row: (str(row["scene"]), float(row["ratio"]), str(row["method"])))
    return result


def _skip(
    result: SweepResult,
    scene: Optional[str],
    ratio: float,
    method: Optional[str],
    error: Exception,
) -> None:
    print(f"[pipeline] skip scene={scene or '*'} ratio={ratio} method={method or '*'}: {error}")
    result.skipped.append(
        {"scene": scene or "", "ratio": ratio, "method": method or "", "reason": str(error)}
    )


# --------------------------------------------------------
# reports
# --------------------------------------------------------


def reports_to_frame(reports: Sequence[EvaluationReport]) -> pd.DataFrame:
    return pd.DataFrame([rep.to_row() for rep in reports], columns=REPORT_COLUMNS)


def summarize_reports(df: pd.DataFrame) -> pd.DataFrame:
    """ค่าเฉลี่ย RMAE / PSNR ต่อ (method, cr) ทั้งชุด scene"""
    if df.empty:
        return pd.DataFrame(columns=["method", "cr", "scenes", "mae_m", "rmae_pct", "psnr_db"])
    grouped = df.groupby(["method", "cr"], sort=True)
    out = grouped[["mae_m", "rmae_pct", "psnr_db"]].mean()
    out.insert(0, "scenes", grouped.size())
    return out.reset_index()


def method_series(df: pd.DataFrame) -> Dict[str, pd.DataFrame]:
    """ตาราง cr → ค่าเฉลี่ยแยกตาม method สำหรับไปพล็อตต่อ"""
    summary = summarize_reports(df)
    return {
        method: grp.drop(columns="method").sort_values("cr").reset_index(drop=True)
        for method, grp in summary.groupby("method", sort=True)
    }
