from __future__ import annotations

"""
run_reconstruct.py

measurement → û, v̂ → depth

output ใน <out>/:
- u.pfm, v.pfm       difference image ที่ reconstruct ได้
- depth.pfm (+ depth.pgm สำหรับดู)
- mask.pfm           1 = phase indeterminate
- report.csv         เฉพาะเมื่อส่ง --reference (scene ต้นฉบับ)

วิธีรันตัวอย่าง:

    python -m scripts.run_reconstruct --measurements runs/y47 --matrix runs/m47/matrix.txt \
        --method tv-global --reference runs/scene_books --out runs/rec_tv_global
"""

import json
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from tofcs.config import DEFAULT_OMEGA, SPEED_OF_LIGHT
from tofcs.errors import ConfigError, DataFormatError
from tofcs.image_io import load_scene, load_vector, write_pfm, write_pgm16
from tofcs.logger import append_log
from tofcs.matrix_io import load_matrix
from tofcs.metrics import evaluate
from tofcs.models import SolverSettings
from tofcs.pipeline import (
    METHODS,
    DepthRecovery,
    recover_depth,
    recover_depth_from_phase_measurements,
    reports_to_frame,
)
from tofcs.schema import EvaluationReport
from tofcs.validator import raise_on_errors, validate_geometry, validate_matrix

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


TAG = "run_reconstruct"


def _read_meta(meas_dir: Path) -> dict:
    path = meas_dir / "meta.json"
    if not path.exists():
        return {}
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataFormatError(f"bad meta.json in {meas_dir}") from e


def run_reconstruct(
    meas_dir: str | Path,
    matrix_path: str | Path,
    method: str,
    out_dir: str | Path,
    settings: Optional[SolverSettings] = None,
    reference: Optional[str | Path] = None,
    four_phase: bool = False,
    omega: Optional[float] = None,
) -> tuple[DepthRecovery, Optional[EvaluationReport]]:
    meas_dir = Path(meas_dir)
    out_dir = Path(out_dir)
    settings = settings or SolverSettings()

    M = load_matrix(matrix_path)
    meta = _read_meta(meas_dir)
    omega = omega or float(meta.get("omega", DEFAULT_OMEGA))
    c = float(meta.get("c", SPEED_OF_LIGHT))

    issues = validate_matrix(M)
    if method.endswith("block"):
        issues += validate_geometry(M.n1, M.n2, M.w, b=settings.block_size)
    write_validation(out_dir, issues, TAG)
    raise_on_errors(issues, ConfigError)

    print(f"[{TAG}] method={method}, matrix {M.n1}x{M.n2} (CR {M.compression_ratio:.2f})")
    if four_phase:
        ys = [load_vector(meas_dir / f"y{i}.txt") for i in range(1, 5)]
        rec = recover_depth_from_phase_measurements(ys, M, method, settings, omega, c)
    else:
        y_u = load_vector(meas_dir / "y_u.txt")
        y_v = load_vector(meas_dir / "y_v.txt")
        rec = recover_depth(y_u, y_v, M, method, settings, omega, c)

    out_dir.mkdir(parents=True, exist_ok=True)
    write_pfm(out_dir / "u.pfm", rec.u)
    write_pfm(out_dir / "v.pfm", rec.v)
    write_pfm(out_dir / "depth.pfm", rec.depth)
    write_pgm16(out_dir / "depth.pgm", rec.depth)
    write_pfm(out_dir / "mask.pfm", rec.mask.astype(np.float32))

    report: Optional[EvaluationReport] = None
    if reference is not None:
        ref = load_scene(reference)
        report = evaluate(
            ref.depth,
            rec.depth,
            scene=Path(reference).name,
            method=method,
            cr=M.compression_ratio,
            mask=rec.mask,
            iters=rec.iterations,
            wall_s=rec.wall_s,
        )
        reports_to_frame([report]).to_csv(out_dir / "report.csv", index=False)
        print(
            f"[{TAG}] MAE = {report.mae * 100:.3f} cm, RMAE = {report.rmae:.3f}%, "
            f"PSNR = {report.psnr:.2f} dB (excluded {report.excluded} px)"
        )

    append_log(
        {
            "event": "reconstruct",
            "method": method,
            "four_phase": four_phase,
            "iters": rec.iterations,
            "wall_s": rec.wall_s,
            "masked": int(rec.mask.sum()),
            "report": report.to_row() if report else None,
        },
        out_dir,
    )
    print(f"[{TAG}] {rec.iterations} iterations in {rec.wall_s:.2f} s")
    print(f"[{TAG}] Saved reconstruction to: {out_dir}")
    return rec, report


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = base_parser("Reconstruct depth from compressed phase-difference measurements.")
    parser.add_argument("--measurements", default=None, help="Measurement directory (from run_compress)")
    parser.add_argument("--matrix", default=None, help="Matrix spec file")
    parser.add_argument("--method", default="tv-global", choices=METHODS, help="Reconstruction method")
    parser.add_argument("--reference", default=None, help="Reference scene directory for metrics")
    parser.add_argument("--four-phase", action="store_true", help="Reconstruct p1..p4 separately (needs --raw)")
    parser.add_argument("--omega", type=float, default=None, help="Override ω (default: from meta.json)")
    add_solver_args(parser)
    args = parse_args(parser, argv)
    require(parser, args, "measurements", "matrix", "out")

    def _run() -> None:
        settings = solver_settings(args, args.method)
        run_reconstruct(
            args.measurements,
            args.matrix,
            args.method,
            args.out,
            settings=settings,
            reference=args.reference,
            four_phase=args.four_phase,
            omega=args.omega,
        )
        write_manifest(Path(args.out), "reconstruct", args)

    return guarded(TAG, _run)


if __name__ == "__main__":
    sys.exit(main())
