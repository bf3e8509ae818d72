from __future__ import annotations

"""
run_select.py

เลือก sensing block จาก pool ของ candidate ด้วยชุด test image:

1) สุ่ม candidate --candidates ตัว (stream "pool")
2) สร้าง test image จาก phantom (stream "test_images") หรือโหลดจาก --scenes
3) วัด residual ของ û, v̂ ต่อ row segment แล้วเลือกตัวที่ดีที่สุดทุกตำแหน่ง
4) เขียน <out>/matrix.txt, <out>/pool_errors.csv และ <out>/pool_image_errors.csv (error รวมต่อ candidate × test image)

วิธีรันตัวอย่าง:

    python -m scripts.run_select --n1 56 --n2 56 --w 14 --r 7 --candidates 20 --test-count 4 --out runs/sel
"""

import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from tofcs.config import DEFAULT_SEGMENT_WIDTH
from tofcs.errors import ConfigError
from tofcs.image_io import load_scene
from tofcs.logger import append_log
from tofcs.matrix_io import save_matrix
from tofcs.models import SolverSettings
from tofcs.phantoms import PHANTOM_KINDS, phantom_suite
from tofcs.pipeline import METHODS
from tofcs.schema import DifferencePair, Scene, SensingMatrix
from tofcs.seeding import substream
from tofcs.selection import candidate_pool, evaluate_pool, select_candidates
from tofcs.tof_model import phase_differences, simulate_phase_images
from tofcs.validator import raise_on_errors, validate_geometry

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


TAG = "run_select"


def difference_pairs(scenes: Sequence[Scene]) -> List[DifferencePair]:
    return [phase_differences(simulate_phase_images(s)) for s in scenes]


def run_select(
    w: int,
    r: int,
    candidates: int,
    scenes: Sequence[Scene],
    out_dir: str | Path,
    p_zero: float = 1.0 / 3.0,
    seed: int = 0,
    method: str = "tv-block",
    settings: Optional[SolverSettings] = None,
    compact: bool = False,
) -> SensingMatrix:
    out_dir = Path(out_dir)
    if not scenes:
        raise ConfigError("selection needs at least one test image")
    n1, n2 = scenes[0].shape
    issues = validate_geometry(n1, n2, w, r=r)
    write_validation(out_dir, issues, TAG)
    raise_on_errors(issues, ConfigError)

    pool = candidate_pool(candidates, w, r, p_zero=p_zero, seed=seed)
    print(f"[{TAG}] {candidates} candidate(s), {len(scenes)} test image(s), method={method}")
    pairs = difference_pairs(scenes)
    pool = evaluate_pool(pool, pairs, method, settings)
    M = select_candidates(pool, pairs, method, settings)

    path = save_matrix(M, out_dir / "matrix.txt", compact=compact)

    winners = np.argmin(pool.errors, axis=0)
    table = pd.DataFrame(
        {
            "seed": pool.seeds,
            "mean_error": pool.errors.mean(axis=1),
            "positions_won": np.bincount(winners, minlength=len(pool.candidates)),
        }
    )
    table.to_csv(out_dir / "pool_errors.csv", index=False)
    per_image = pd.DataFrame(
        [
            {"candidate": ci, "seed": pool.seeds[ci], "image": ii, "error": float(pool.image_errors[ci, ii].sum())}
            for ci in range(len(pool.candidates))
            for ii in range(pool.image_count)
        ],
        columns=["candidate", "seed", "image", "error"],
    )
    per_image.to_csv(out_dir / "pool_image_errors.csv", index=False)

    append_log(
        {
            "event": "select",
            "candidates": candidates,
            "test_images": len(scenes),
            "method": method,
            "distinct_blocks": int(np.count_nonzero(table["positions_won"])),
        },
        out_dir,
    )
    print(f"[{TAG}] {int(np.count_nonzero(table['positions_won']))} distinct candidate(s) selected")
    print(f"[{TAG}] Saved matrix to: {path}")
    return M


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = base_parser("Select sensing blocks from a candidate pool using test images.")
    parser.add_argument("--n1", type=int, default=56, help="Test image rows")
    parser.add_argument("--n2", type=int, default=56, help="Test image columns")
    parser.add_argument("--w", type=int, default=DEFAULT_SEGMENT_WIDTH, help="Row segment width")
    parser.add_argument("--r", type=int, default=None, help="Measurements per block")
    parser.add_argument("--p-zero", type=float, default=1.0 / 3.0, help="Probability of a zero generator entry")
    parser.add_argument("--candidates", type=int, default=20, help="Pool size")
    parser.add_argument("--scenes", nargs="*", default=[], help="Test scene directories (default: phantoms)")
    parser.add_argument("--kind", default="books", choices=PHANTOM_KINDS, help="Phantom kind for test images")
    parser.add_argument("--test-count", type=int, default=4, help="Number of phantom test images")
    parser.add_argument("--method", default="tv-block", choices=METHODS, help="Method used to score candidates")
    parser.add_argument("--compact", action="store_true", help="Write the seed-based compact form")
    add_solver_args(parser)
    args = parse_args(parser, argv)
    require(parser, args, "out", "r")

    def _run() -> None:
        if args.scenes:
            scenes = [load_scene(d) for d in args.scenes]
        else:
            test_seed = int(substream(args.seed, "test_images").generate_state(1)[0])
            scenes = phantom_suite(args.kind, args.test_count, args.n1, args.n2, seed=test_seed)
        settings = solver_settings(args, args.method)
        run_select(
            args.w, args.r, args.candidates, scenes, args.out,
            p_zero=args.p_zero, seed=args.seed, method=args.method, settings=settings, compact=args.compact,
        )
        write_manifest(Path(args.out), "select", args)

    return guarded(TAG, _run)


if __name__ == "__main__":
    sys.exit(main())
