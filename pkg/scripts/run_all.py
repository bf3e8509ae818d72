from __future__ import annotations

"""
run_all.py

Runner ตัวเดียวสำหรับรันทั้ง pipeline บน phantom 1 ฉาก:

1) Phantom      (scripts.run_phantom.run_phantom)
2) Matrix       (scripts.run_genmatrix.run_genmatrix)
3) Compress     (scripts.run_compress.run_compress)
4) Reconstruct  (scripts.run_reconstruct.run_reconstruct) ทุก method ที่เลือก

วิธีใช้ตัวอย่าง:

    python -m scripts.run_all --kind books --r 7 --seed 7 --out runs/demo

output:
    <out>/scene, <out>/matrix, <out>/measurements, <out>/<method>/ (+ <out>/report.csv รวมทุก method)
"""

import sys
from pathlib import Path
from typing import List, Optional, Sequence

from tofcs.config import DEFAULT_OMEGA, DEFAULT_SEGMENT_WIDTH
from tofcs.models import SolverSettings
from tofcs.phantoms import PHANTOM_KINDS
from tofcs.pipeline import METHODS, reports_to_frame
from tofcs.schema import EvaluationReport

from scripts.common import add_solver_args, base_parser, guarded, parse_args, require, solver_settings, write_manifest
from scripts.run_compress import run_compress
from scripts.run_genmatrix import run_genmatrix
from scripts.run_phantom import run_phantom
from scripts.run_reconstruct import run_reconstruct


def run_all(
    out_root: str | Path,
    kind: str = "books",
    n1: int = 168,
    n2: int = 224,
    w: int = DEFAULT_SEGMENT_WIDTH,
    r: int = 7,
    p_zero: float = 1.0 / 3.0,
    sigma: float = 0.0,
    seed: int = 0,
    methods: Sequence[str] = METHODS,
    settings: Optional[SolverSettings] = None,
) -> List[EvaluationReport]:
    out_root = Path(out_root)
    scene_dir = out_root / "scene"
    matrix_dir = out_root / "matrix"
    meas_dir = out_root / "measurements"

    print("==== [1/4] Phantom ====")
    run_phantom(kind, n1, n2, seed, scene_dir, omega=DEFAULT_OMEGA)

    print("\n==== [2/4] Sensing matrix ====")
    run_genmatrix(n1, n2, w, r, p_zero, seed, matrix_dir)

    print("\n==== [3/4] Compress ====")
    run_compress(scene_dir, matrix_dir / "matrix.txt", meas_dir, sigma=sigma, seed=seed)

    print("\n==== [4/4] Reconstruct ====")
    reports: List[EvaluationReport] = []
    for method in methods:
        _, report = run_reconstruct(
            meas_dir,
            matrix_dir / "matrix.txt",
            method,
            out_root / method,
            settings=settings,
            reference=scene_dir,
        )
        if report is not None:
            reports.append(report)

    reports_to_frame(reports).to_csv(out_root / "report.csv", index=False)

    print("\n✅ Done: full pipeline finished.")
    print(f"   - out = {out_root}")
    for rep in reports:
        print(f"   - {rep.method:<13} RMAE {rep.rmae:6.3f}%  PSNR {rep.psnr:6.2f} dB")
    return reports


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = base_parser("Run phantom → matrix → compress → reconstruct in one go.")
    parser.add_argument("--kind", default="books", choices=PHANTOM_KINDS, help="Phantom kind")
    parser.add_argument("--n1", type=int, default=168, help="Image rows")
    parser.add_argument("--n2", type=int, default=224, help="Image columns")
    parser.add_argument("--w", type=int, default=DEFAULT_SEGMENT_WIDTH, help="Row segment width")
    parser.add_argument("--r", type=int, default=7, help="Measurements per block")
    parser.add_argument("--p-zero", type=float, default=1.0 / 3.0, help="Probability of a zero generator entry")
    parser.add_argument("--sigma", type=float, default=0.0, help="Gaussian noise σ on phase images")
    parser.add_argument("--methods", nargs="*", default=list(METHODS), help="Methods to run")
    add_solver_args(parser)
    args = parse_args(parser, argv)
    require(parser, args, "out")

    def _run() -> None:
        run_all(
            args.out,
            kind=args.kind,
            n1=args.n1,
            n2=args.n2,
            w=args.w,
            r=args.r,
            p_zero=args.p_zero,
            sigma=args.sigma,
            seed=args.seed,
            methods=args.methods,
            settings=solver_settings(args),
        )
        write_manifest(Path(args.out), "all", args)

    return guarded("run_all", _run)


if __name__ == "__main__":
    sys.exit(main())
