from __future__ import annotations

"""
common.py

ของที่ทุก run_*.py ใช้ร่วมกัน:

- argument กลาง (--seed, --config, --threads, --manifest, --out)
- โหลด manifest.txt ของ run เก่ามาเป็น default ของ parser (รันซ้ำแบบ bit-exact)
- เขียน validation.json / manifest.txt / run_log.jsonl ข้าง output
- guarded(): map exception → exit code แล้วพิมพ์ ERROR
"""

import argparse
import json
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from tofcs.config import DEFAULT_BLOCK_SIZE, DEFAULT_SEED
from tofcs.errors import exit_code_for
from tofcs.logger import append_log
from tofcs.models import RunManifest, SolverSettings
from tofcs.pipeline import METHODS


_SKIP_PARAMS = {"manifest", "seed", "config"}


def base_parser(description: str) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Master seed (default: TOFCS_SEED or 0)")
    parser.add_argument("--out", default=None, help="Output directory")
    parser.add_argument(
        "--manifest",
        default=None,
        help="Re-run with the parameters stored in a manifest.txt (flags still override)",
    )
    return parser


def add_solver_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", default=None, help="Solver config file (key = value lines)")
    parser.add_argument("--lambda", dest="lam", type=float, default=None, help="ℓ1 weight λ (default 0.05)")
    parser.add_argument("--mu", type=float, default=None, help="TV weight μ (default 0.1)")
    parser.add_argument("--iters", type=int, default=None, help="Iteration budget for the chosen method (every method when none is chosen)")
    parser.add_argument("--block-size", type=int, default=None, help=f"Block side b (default {DEFAULT_BLOCK_SIZE})")
    parser.add_argument("--threads", type=int, default=None, help="Worker threads for block-wise solves")
    parser.add_argument("--isotropic", action="store_true", help="Use isotropic TV instead of anisotropic")


def _convert(action: argparse.Action, raw: str) -> Any:
    if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
        return raw.strip().lower() in ("1", "true", "yes")
    conv = action.type or str
    if action.nargs in ("+", "*"):
        return [conv(tok) for tok in raw.split()]
    return conv(raw)


def parse_args(parser: argparse.ArgumentParser, argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """
    parse argv โดยใช้ค่าจาก --manifest เป็น default ก่อน

    ลำดับความสำคัญ: default ของ parser < manifest < flag ที่ส่งมาจริง
    """
    pre, _ = parser.parse_known_args(argv)
    if pre.manifest:
        manifest = RunManifest.load(pre.manifest)
        actions = {a.dest: a for a in parser._actions}
        defaults: Dict[str, Any] = {"seed": manifest.seed}
        if manifest.config_path and "config" in actions:
            defaults["config"] = manifest.config_path
        for key, raw in manifest.params.items():
            if key in actions and key not in _SKIP_PARAMS:
                defaults[key] = _convert(actions[key], raw)
        parser.set_defaults(**defaults)
    return parser.parse_args(argv)


def require(parser: argparse.ArgumentParser, args: argparse.Namespace, *names: str) -> None:
    missing = [n for n in names if getattr(args, n, None) in (None, "")]
    if missing:
        parser.error("missing required argument(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def solver_settings(args: argparse.Namespace, method: Optional[str] = None) -> SolverSettings:
    """config file < flag; --iters ใช้กับ method ที่เลือก หรือทุก method ถ้าไม่ระบุ"""
    overrides: Dict[str, Any] = {
        "lam": getattr(args, "lam", None),
        "mu": getattr(args, "mu", None),
        "threads": getattr(args, "threads", None),
        "block_size": getattr(args, "block_size", None),
        "isotropic": True if getattr(args, "isotropic", False) else None,
    }
    iters = getattr(args, "iters", None)
    if iters is not None:
        for name in [method] if method else METHODS:
            overrides[name.replace("-", "_") + "_iters"] = iters
    return SolverSettings.from_file(getattr(args, "config", None), **overrides)


def write_validation(out_dir: Path, issues: List[Dict[str, Any]], tag: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "validation.json"
    with path.open("w", encoding="utf-8") as f:
        json.dump(issues, f, ensure_ascii=False, indent=2)
    print(f"[{tag}] Validation issues: {len(issues)} (saved to {path})")
    return path


def write_manifest(out_dir: Path, command: str, args: argparse.Namespace) -> Path:
    params = {k: v for k, v in vars(args).items() if k not in _SKIP_PARAMS and v is not None}
    manifest = RunManifest(
        command=command,
        seed=args.seed,
        config_path=getattr(args, "config", None),
        params=params,
    )
    path = manifest.write(out_dir)
    append_log({"event": "manifest", "command": command, "path": path}, out_dir)
    return path


def guarded(tag: str, fn: Callable[[], Any]) -> int:
    """รัน fn แล้วแปลง exception เป็น exit code (0 = สำเร็จ)"""
    try:
        fn()
    except Exception as e:
        print(f"[{tag}] ERROR: {type(e).__name__}: {e}")
        return exit_code_for(e)
    return 0
