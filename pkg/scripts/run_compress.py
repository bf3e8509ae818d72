from __future__ import annotations

"""
run_compress.py

scene + sensing matrix → measurement:

1) โหลด scene (depth / amplitude / offset) และ matrix
2) simulate phase image p1..p4 (+ Gaussian noise ถ้า --sigma > 0)
   แล้วลบ dark level ของ sensor ถ้าให้ --reference-level
3) u = p1 − p3, v = p4 − p2 แล้วบีบอัด y_u = M u, y_v = M v
4) เซฟ y_u.txt, y_v.txt (+ y1..y4.txt ถ้า --raw) และ meta.json

วิธีรันตัวอย่าง:

    python -m scripts.run_compress --scene runs/scene_books --matrix runs/m47/matrix.txt --out runs/y47
"""

import json
import sys
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from tofcs.image_io import load_scene, save_vector
from tofcs.logger import append_log
from tofcs.matrix_io import load_matrix
from tofcs.pipeline import compress
from tofcs.seeding import rng_for
from tofcs.sensing import apply_forward
from tofcs.tof_model import add_noise, phase_differences, simulate_phase_images, subtract_reference
from tofcs.validator import raise_on_errors, validate_all

from scripts.common import base_parser, guarded, parse_args, require, write_manifest, write_validation


TAG = "run_compress"


def run_compress(
    scene_dir: str | Path,
    matrix_path: str | Path,
    out_dir: str | Path,
    sigma: float = 0.0,
    seed: int = 0,
    raw: bool = False,
    reference_level: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    out_dir = Path(out_dir)
    print(f"[{TAG}] Loading scene from: {scene_dir}")
    scene = load_scene(scene_dir)
    M = load_matrix(matrix_path)

    issues = validate_all(scene, M)
    write_validation(out_dir, issues, TAG)
    raise_on_errors(issues)

    phases = simulate_phase_images(scene)
    if sigma > 0:
        phases = add_noise(phases, sigma, rng_for(seed, "noise"))
    if reference_level is not None:
        phases = subtract_reference(phases, reference_level)
    y_u, y_v = compress(phase_differences(phases), M)

    save_vector(out_dir / "y_u.txt", y_u)
    save_vector(out_dir / "y_v.txt", y_v)
    if raw:
        for i, p in enumerate(phases.as_tuple(), start=1):
            save_vector(out_dir / f"y{i}.txt", apply_forward(M, p))

    meta = {
        "scene": str(scene_dir),
        "matrix": str(matrix_path),
        "n1": M.n1,
        "n2": M.n2,
        "m": M.m,
        "cr": M.compression_ratio,
        "omega": scene.omega,
        "c": scene.c,
        "sigma": sigma,
        "raw": raw,
        "reference_level": reference_level,
    }
    with (out_dir / "meta.json").open("w", encoding="utf-8") as f:
        json.dump(meta, f, ensure_ascii=False, indent=2, sort_keys=True)

    append_log({"event": "compress", **meta}, out_dir)
    print(f"[{TAG}] {M.n} pixels → {M.m} measurements per difference image (CR {M.compression_ratio:.2f})")
    print(f"[{TAG}] Saved measurements to: {out_dir}")
    return y_u, y_v


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = base_parser("Compress the phase-difference images of a scene.")
    parser.add_argument("--scene", default=None, help="Scene directory (from run_phantom)")
    parser.add_argument("--matrix", default=None, help="Matrix spec file")
    parser.add_argument("--sigma", type=float, default=0.0, help="Gaussian noise σ added to each phase image")
    parser.add_argument("--raw", action="store_true", help="Also write compressed p1..p4 (four-phase mode)")
    parser.add_argument(
        "--reference-level",
        type=float,
        default=None,
        help="Constant level subtracted from every phase image before compression",
    )
    args = parse_args(parser, argv)
    require(parser, args, "scene", "matrix", "out")

    def _run() -> None:
        run_compress(
            args.scene,
            args.matrix,
            args.out,
            sigma=args.sigma,
            seed=args.seed,
            raw=args.raw,
            reference_level=args.reference_level,
        )
        write_manifest(Path(args.out), "compress", args)

    return guarded(TAG, _run)


if __name__ == "__main__":
    sys.exit(main())
