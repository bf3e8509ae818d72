from __future__ import annotations

"""
run_sweep.py

วัด error ของทุก (scene, compression ratio, method) แล้วเขียนตาราง:

- <out>/sweep.csv             แถวละ 1 (scene, method, cr)
- <out>/summary.csv           ค่าเฉลี่ยต่อ (method, cr)
- <out>/series_<method>.csv   cr → ค่าเฉลี่ย สำหรับเอาไปพล็อต
- <out>/skipped.csv           (scene, ratio, method) ที่ทำไม่ได้ พร้อมเหตุผล (run ไม่หยุด)

scene มาจาก --scenes (โฟลเดอร์ scene) หรือสร้าง phantom suite ใหม่ (--kind, --count)
ค่าทั้งหมดอ่านจาก --manifest ได้ เช่น:

    command = sweep
    seed = 3
    kind = books
    count = 8
    ratios = 1 2 4.6667
    methods = fista-block fista-global tv-block tv-global

วิธีรันตัวอย่าง:

    python -m scripts.run_sweep --manifest sweeps/books.txt --out runs/sweep_books
"""

import sys
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import pandas as pd

from tofcs.config import DEFAULT_SEGMENT_WIDTH
from tofcs.image_io import load_scene
from tofcs.logger import append_log
from tofcs.models import SolverSettings
from tofcs.phantoms import PHANTOM_KINDS, phantom_suite
from tofcs.pipeline import METHODS, SweepResult, method_series, reports_to_frame, summarize_reports, sweep
from tofcs.schema import Scene
from tofcs.validator import validate_scene

from scripts.common import (
    add_solver_args,
    base_parser,
    guarded,
    parse_args,
    require,
    solver_settings,
    write_manifest,
    write_validation,
)


TAG = "run_sweep"


def collect_scenes(
    scene_dirs: Sequence[str],
    kind: str,
    count: int,
    n1: int,
    n2: int,
    seed: int,
) -> List[Tuple[str, Scene]]:
    if scene_dirs:
        return [(Path(d).name, load_scene(d)) for d in scene_dirs]
    scenes = phantom_suite(kind, count, n1, n2, seed=seed)
    return [(f"{kind}_{i:02d}", s) for i, s in enumerate(scenes)]


def run_sweep(
    scenes: Sequence[Tuple[str, Scene]],
    ratios: Sequence[float],
    methods: Sequence[str],
    out_dir: str | Path,
    w: int = DEFAULT_SEGMENT_WIDTH,
    p_zero: float = 1.0 / 3.0,
    seed: int = 0,
    settings: Optional[SolverSettings] = None,
    sigma: float = 0.0,
    threads: int = 1,
    four_phase: bool = False,
) -> SweepResult:
    out_dir = Path(out_dir)
    issues = []
    for name, scene in scenes:
        for issue in validate_scene(scene):
            issue["context"]["scene"] = name
            issues.append(issue)
    write_validation(out_dir, issues, TAG)

    print(f"[{TAG}] {len(scenes)} scene(s) × {len(ratios)} ratio(s) × {len(methods)} method(s)")
    result = sweep(
        scenes,
        ratios,
        methods,
        w=w,
        p_zero=p_zero,
        seed=seed,
        settings=settings,
        noise_sigma=sigma,
        threads=threads,
        skip_infeasible=True,
        four_phase=four_phase,
        progress=True,
    )

    df = reports_to_frame(result.reports)
    df.to_csv(out_dir / "sweep.csv", index=False)
    summarize_reports(df).to_csv(out_dir / "summary.csv", index=False)
    for method, series in method_series(df).items():
        series.to_csv(out_dir / f"series_{method}.csv", index=False)

    if result.skipped:
        pd.DataFrame(result.skipped, columns=["scene", "ratio", "method", "reason"]).to_csv(out_dir / "skipped.csv", index=False)
        for row in result.skipped:
            append_log({"event": "skipped", **row}, out_dir)

    for rep in result.reports:
        append_log({"event": "sweep_row", **rep.to_row()}, out_dir)
    print(f"[{TAG}] {len(result.reports)} row(s), {len(result.skipped)} skipped")
    print(f"[{TAG}] Saved sweep to: {out_dir}")
    return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = base_parser("Sweep compression ratios and methods over a set of scenes.")
    parser.add_argument("--scenes", nargs="*", default=[], help="Scene directories (default: phantom suite)")
    parser.add_argument("--kind", default="books", choices=PHANTOM_KINDS, help="Phantom kind for the suite")
    parser.add_argument("--count", type=int, default=8, help="Number of phantoms in the suite")
    parser.add_argument("--n1", type=int, default=168, help="Phantom rows")
    parser.add_argument("--n2", type=int, default=224, help="Phantom columns")
    parser.add_argument("--ratios", nargs="*", type=float, default=[1.0, 2.0, 14.0 / 3.0], help="Compression ratios")
    parser.add_argument("--methods", nargs="*", default=list(METHODS), help="Methods to compare")
    parser.add_argument("--w", type=int, default=DEFAULT_SEGMENT_WIDTH, help="Row segment width")
    parser.add_argument("--p-zero", type=float, default=1.0 / 3.0, help="Probability of a zero generator entry")
    parser.add_argument("--sigma", type=float, default=0.0, help="Gaussian noise σ on phase images")
    parser.add_argument("--four-phase", action="store_true", help="Recover p1..p4 separately")
    add_solver_args(parser)
    args = parse_args(parser, argv)
    require(parser, args, "out")

    def _run() -> None:
        settings = solver_settings(args)
        scenes = collect_scenes(args.scenes, args.kind, args.count, args.n1, args.n2, args.seed)
        run_sweep(
            scenes,
            args.ratios,
            args.methods,
            args.out,
            w=args.w,
            p_zero=args.p_zero,
            seed=args.seed,
            settings=settings,
            sigma=args.sigma,
            threads=settings.threads,
            four_phase=args.four_phase,
        )
        write_manifest(Path(args.out), "sweep", args)

    return guarded(TAG, _run)


if __name__ == "__main__":
    sys.exit(main())
