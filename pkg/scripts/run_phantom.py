from __future__ import annotations

"""
run_phantom.py

สร้างฉากสังเคราะห์ 1 ฉาก แล้วเซฟเป็นโฟลเดอร์ scene:

- <out>/depth.pfm, amplitude.pfm, offset.pfm
- <out>/metadata.json
- <out>/depth.pgm (+ .txt) สำหรับดูภาพ
- <out>/validation.json, manifest.txt, run_log.jsonl

วิธีรันตัวอย่าง:

    python -m scripts.run_phantom --kind books --n1 168 --n2 224 --seed 7 --out runs/scene_books
"""

import sys
from pathlib import Path
from typing import Optional, Sequence

from tofcs.config import DEFAULT_EMITTED_AMPLITUDE, DEFAULT_OMEGA
from tofcs.errors import DomainError
from tofcs.image_io import save_scene
from tofcs.logger import append_log
from tofcs.phantoms import PHANTOM_KINDS, make_phantom
from tofcs.schema import Scene
from tofcs.validator import raise_on_errors, validate_scene

from scripts.common import base_parser, guarded, parse_args, require, write_manifest, write_validation


TAG = "run_phantom"


def run_phantom(
    kind: str,
    n1: int,
    n2: int,
    seed: int,
    out_dir: str | Path,
    omega: float = DEFAULT_OMEGA,
    emitted_amplitude: float = DEFAULT_EMITTED_AMPLITUDE,
) -> Scene:
    out_dir = Path(out_dir)
    print(f"[{TAG}] Building '{kind}' phantom {n1}x{n2} (seed={seed})")
    scene = make_phantom(kind, n1, n2, seed=seed, omega=omega, emitted_amplitude=emitted_amplitude)

    issues = validate_scene(scene)
    write_validation(out_dir, issues, TAG)
    raise_on_errors(issues, DomainError)

    save_scene(scene, out_dir)
    append_log(
        {
            "event": "phantom",
            "kind": kind,
            "shape": [n1, n2],
            "seed": seed,
            "depth_min": float(scene.depth.min()),
            "depth_max": float(scene.depth.max()),
        },
        out_dir,
    )
    print(f"[{TAG}] depth range: {scene.depth.min():.3f} .. {scene.depth.max():.3f} m")
    print(f"[{TAG}] Saved scene to: {out_dir}")
    return scene


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = base_parser("Generate a synthetic ToF scene (depth / amplitude / offset).")
    parser.add_argument("--kind", default="books", choices=PHANTOM_KINDS, help="Phantom kind")
    parser.add_argument("--n1", type=int, default=168, help="Image rows")
    parser.add_argument("--n2", type=int, default=224, help="Image columns")
    parser.add_argument("--omega", type=float, default=DEFAULT_OMEGA, help="Modulation frequency ω (rad/s)")
    parser.add_argument(
        "--emitted-amplitude",
        type=float,
        default=DEFAULT_EMITTED_AMPLITUDE,
        help="Emitted amplitude C",
    )
    args = parse_args(parser, argv)
    require(parser, args, "out")

    def _run() -> None:
        run_phantom(args.kind, args.n1, args.n2, args.seed, args.out, args.omega, args.emitted_amplitude)
        write_manifest(Path(args.out), "phantom", args)

    return guarded(TAG, _run)


if __name__ == "__main__":
    sys.exit(main())
