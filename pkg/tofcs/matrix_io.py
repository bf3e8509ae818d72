from __future__ import annotations

"""
matrix_io.py

อ่าน / เขียนไฟล์ matrix spec (text):

    tofcs-matrix v1
    n1 n2 w a
    k : scale : v_0 … v_{w−1} : ω_0 … ω_{r−1}      (explicit, canonical)
    k : seed p_zero r                               (compact, สุ่มใหม่จาก seed)

explicit form คือแบบ canonical เพราะ bit-exact
"""

from pathlib import Path
from typing import List

import numpy as np

from .errors import DataFormatError
from .schema import CirculantBlockSpec, SensingMatrix
from .sensing import random_block


HEADER = "tofcs-matrix v1"


def _fmt(value: float) -> str:
    value = float(value)
    if value.is_integer():
        return str(int(value))
    return repr(value)


def format_matrix(M: SensingMatrix, compact: bool = False) -> str:
    a = next((blk.a for blk in M.blocks if blk.generator.any()), 1.0)
    lines: List[str] = [HEADER, f"{M.n1} {M.n2} {M.w} {_fmt(a)}"]
    for k, blk in enumerate(M.blocks):
        if compact:
            if blk.seed is None or blk.p_zero is None:
                raise DataFormatError(f"block {k} has no seed/p_zero; compact form needs both")
            if not random_block(M.w, blk.r, blk.p_zero, blk.seed, a).same_as(blk):
                raise DataFormatError(f"block {k} cannot be regenerated from its seed (custom scale?)")
            lines.append(f"{k} : {blk.seed} {repr(float(blk.p_zero))} {blk.r}")
        else:
            gen = " ".join(_fmt(x) for x in blk.generator)
            sel = " ".join(str(int(i)) for i in blk.selection)
            lines.append(f"{k} : {repr(blk.scale)} : {gen} : {sel}")
    return "\n".join(lines) + "\n"


def save_matrix(M: SensingMatrix, path: str | Path, compact: bool = False) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_matrix(M, compact=compact), encoding="utf-8")
    return path


def parse_matrix(text: str) -> SensingMatrix:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if not lines or lines[0] != HEADER:
        raise DataFormatError(f"missing header line '{HEADER}'")
    if len(lines) < 2:
        raise DataFormatError("missing layout line 'n1 n2 w a'")

    try:
        n1_s, n2_s, w_s, a_s = lines[1].split()
        n1, n2, w, a = int(n1_s), int(n2_s), int(w_s), float(a_s)
    except ValueError as e:
        raise DataFormatError(f"bad layout line: {lines[1]!r}") from e
    if not a > 0:
        raise DataFormatError(f"generator weight a must be positive, got {a}")

    blocks: List[CirculantBlockSpec] = []
    for idx, line in enumerate(lines[2:]):
        fields = [f.strip() for f in line.split(":")]
        try:
            k = int(fields[0])
            if k != idx:
                raise DataFormatError(f"block index {k} out of order (expected {idx})")
            if len(fields) == 4:
                generator = np.array([float(x) for x in fields[2].split()])
                if not np.all(np.isin(generator, (0.0, a, -a))):
                    raise DataFormatError(f"block {k}: generator entries must be in {{0, ±{_fmt(a)}}}")
                blocks.append(
                    CirculantBlockSpec(
                        generator=generator,
                        selection=np.array([int(x) for x in fields[3].split()]),
                        scale=float(fields[1]),
                    )
                )
            elif len(fields) == 2:
                seed_s, p_zero_s, r_s = fields[1].split()
                blocks.append(random_block(w, int(r_s), float(p_zero_s), int(seed_s), a))
            else:
                raise DataFormatError(f"bad block line: {line!r}")
        except DataFormatError:
            raise
        except ValueError as e:
            raise DataFormatError(f"bad block line {idx}: {e}") from e

    try:
        return SensingMatrix(blocks=tuple(blocks), n1=n1, n2=n2, w=w)
    except ValueError as e:
        raise DataFormatError(f"inconsistent matrix file: {e}") from e


def load_matrix(path: str | Path) -> SensingMatrix:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"matrix file not found: {path}")
    return parse_matrix(path.read_text(encoding="utf-8"))
