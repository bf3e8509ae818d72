from __future__ import annotations

"""
run_genmatrix.py

สุ่ม block-diagonal partial circulant sensing matrix แล้วเขียนเป็น <out>/matrix.txt

วิธีรันตัวอย่าง:

    python -m scripts.run_genmatrix --n1 168 --n2 224 --w 14 --r 3 --p-zero 0.6667 --seed 1 --out runs/m47
"""

import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from tofcs.config import DEFAULT_SEGMENT_WIDTH
from tofcs.errors import ConfigError, RipCapExceededError
from tofcs.logger import append_log
from tofcs.matrix_io import save_matrix
from tofcs.schema import RipEstimate, SensingMatrix
from tofcs.sensing import estimate_rip, random_sensing_matrix, zero_fraction
from tofcs.validator import raise_on_errors, validate_geometry, validate_matrix

from scripts.common import base_parser, guarded, parse_args, require, write_manifest, write_validation


TAG = "run_genmatrix"


def _worst_rip(M: SensingMatrix, s: int, seed: int) -> RipEstimate:
    """δ_s ที่แย่ที่สุดในทุก block (exhaustive ถ้าไม่เกิน cap ไม่งั้น sampled)"""
    worst: Optional[RipEstimate] = None
    for blk in M.blocks:
        try:
            est = estimate_rip(blk, s)
        except RipCapExceededError:
            est = estimate_rip(blk, s, method="sampled", seed=seed)
        if worst is None or est.delta > worst.delta:
            worst = est
    return worst


def run_genmatrix(
    n1: int,
    n2: int,
    w: int,
    r: int,
    p_zero: float,
    seed: int,
    out_dir: str | Path,
    a: float = 1.0,
    scale: Optional[float] = None,
    compact: bool = False,
    rip_s: Optional[int] = None,
) -> SensingMatrix:
    out_dir = Path(out_dir)
    # geometry ผิด = argument ผิด
    geometry = validate_geometry(n1, n2, w, r=r)
    raise_on_errors(geometry, ConfigError)

    M = random_sensing_matrix(n1, n2, w, r, p_zero=p_zero, seed=seed, a=a, scale=scale)
    issues = geometry + validate_matrix(M, (n1, n2))
    write_validation(out_dir, issues, TAG)

    path = save_matrix(M, out_dir / "matrix.txt", compact=compact)
    zf = zero_fraction(M)
    cr = w / r
    append_log(
        {
            "event": "genmatrix",
            "shape": [n1, n2],
            "w": w,
            "r": r,
            "cr": cr,
            "p_zero": p_zero,
            "zero_fraction": zf,
            "blocks": M.K,
        },
        out_dir,
    )
    print(f"[{TAG}] CR = {cr:.2f} (w={w}, r={r}), blocks = {M.K}, measurements = {M.m}")
    print(f"[{TAG}] zero fraction = {zf * 100:.1f}%")
    if rip_s is not None:
        rip = _worst_rip(M, rip_s, seed)
        with (out_dir / "rip.json").open("w", encoding="utf-8") as f:
            json.dump(rip.to_dict(), f, ensure_ascii=False, indent=2)
        append_log({"event": "rip", **rip.to_dict()}, out_dir)
        print(f"[{TAG}] worst δ_{rip_s} = {rip.delta:.4f} ({rip.method}, {rip.supports_checked} supports per block)")
    print(f"[{TAG}] Saved matrix to: {path}")
    return M


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = base_parser("Generate a block-diagonal partial circulant sensing matrix.")
    parser.add_argument("--n1", type=int, default=168, help="Image rows")
    parser.add_argument("--n2", type=int, default=224, help="Image columns")
    parser.add_argument("--w", type=int, default=DEFAULT_SEGMENT_WIDTH, help="Row segment width")
    parser.add_argument("--r", type=int, default=None, help="Measurements per block (1 <= r <= w)")
    parser.add_argument("--p-zero", type=float, default=1.0 / 3.0, help="Probability of a zero generator entry")
    parser.add_argument("--a", type=float, default=1.0, help="Generator magnitude a")
    parser.add_argument("--scale", type=float, default=None, help="Block scale (default 1/sqrt(r))")
    parser.add_argument("--compact", action="store_true", help="Write the seed-based compact form")
    parser.add_argument("--rip-s", type=int, default=None, help="Also estimate the worst RIP constant δ_s over all blocks")
    args = parse_args(parser, argv)
    require(parser, args, "out", "r")

    def _run() -> None:
        run_genmatrix(
            args.n1, args.n2, args.w, args.r, args.p_zero, args.seed, args.out,
            a=args.a, scale=args.scale, compact=args.compact, rip_s=args.rip_s,
        )
        write_manifest(Path(args.out), "genmatrix", args)

    return guarded(TAG, _run)


if __name__ == "__main__":
    sys.exit(main())
