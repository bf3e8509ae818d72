from __future__ import annotations

"""
phantoms.py

ฉากสังเคราะห์แทนข้อมูลดิบจากกล้อง ToF:

- books : กล่อง / หนังสือ / แฟ้มวางเรียงหน้ากำแพง (piecewise constant), ไกลสุด 1.2 m
- planes: ระนาบเอียงหลายแผ่น
- disks : จานกลมหลายใบที่ระยะคงที่ หน้าระนาบพื้นหลัง

ทุกฉาก seeded ผ่าน stream "phantom"
"""

from typing import List

import numpy as np

from .config import DEFAULT_EMITTED_AMPLITUDE, DEFAULT_OMEGA
from .errors import ConfigError
from .schema import Scene
from .seeding import child_seeds, rng_for


PHANTOM_KINDS = ("books", "planes", "disks")

BOOKS_MAX_DEPTH = 1.2


def _books(rng: np.random.Generator, n1: int, n2: int):
    wall = rng.uniform(1.1, BOOKS_MAX_DEPTH)
    depth = np.full((n1, n2), wall)
    amplitude = np.full((n1, n2), rng.uniform(0.5, 0.8))

    # ชั้นวาง: หนังสือตั้งเรียงบนแนวฐานเดียวกัน
    base = int(n1 * rng.uniform(0.75, 0.95))
    col = int(n2 * rng.uniform(0.02, 0.1))
    while col < n2:
        width = max(1, int(n2 * rng.uniform(0.03, 0.12)))
        height = max(1, int(n1 * rng.uniform(0.25, 0.65)))
        if rng.random() < 0.8:
            top = max(0, base - height)
            depth[top:base, col:col + width] = rng.uniform(0.6, 1.05)
            amplitude[top:base, col:col + width] = rng.uniform(0.4, 1.6)
        col += width + int(n2 * rng.uniform(0.0, 0.04))

    # แฟ้ม 1–2 อันวางด้านหน้า
    for _ in range(int(rng.integers(1, 3))):
        h = max(1, int(n1 * rng.uniform(0.2, 0.4)))
        w = max(1, int(n2 * rng.uniform(0.15, 0.3)))
        top = int(rng.integers(0, max(1, n1 - h)))
        left = int(rng.integers(0, max(1, n2 - w)))
        depth[top:top + h, left:left + w] = rng.uniform(0.4, 0.7)
        amplitude[top:top + h, left:left + w] = rng.uniform(0.8, 1.5)

    # พื้นโต๊ะใต้ฐานชั้น
    depth[base:, :] = rng.uniform(0.5, 0.9)
    amplitude[base:, :] = rng.uniform(0.6, 1.0)
    return depth, amplitude


def _planes(rng: np.random.Generator, n1: int, n2: int):
    ii, jj = np.mgrid[0:n1, 0:n2]
    depth = np.empty((n1, n2))
    amplitude = np.empty((n1, n2))
    cuts = np.sort(rng.choice(np.arange(1, n2), size=min(2, n2 - 1), replace=False)) if n2 > 2 else np.array([], dtype=int)
    edges = [0, *cuts.tolist(), n2]
    for left, right in zip(edges[:-1], edges[1:]):
        d0 = rng.uniform(0.5, 1.8)
        gx = rng.uniform(-0.5, 0.5) / max(n2, 1)
        gy = rng.uniform(-0.5, 0.5) / max(n1, 1)
        seg = np.s_[:, left:right]
        depth[seg] = d0 + gx * (jj[seg] - left) + gy * ii[seg]
        amplitude[seg] = rng.uniform(0.5, 1.5)
    return np.clip(depth, 0.2, 2.5), amplitude


def _disks(rng: np.random.Generator, n1: int, n2: int):
    ii, jj = np.mgrid[0:n1, 0:n2]
    depth = np.full((n1, n2), rng.uniform(1.5, 2.2))
    amplitude = np.full((n1, n2), rng.uniform(0.4, 0.8))
    for _ in range(int(rng.integers(3, 7))):
        radius = rng.uniform(0.08, 0.25) * min(n1, n2)
        ci, cj = rng.uniform(0, n1), rng.uniform(0, n2)
        inside = (ii - ci) ** 2 + (jj - cj) ** 2 <= radius ** 2
        depth[inside] = rng.uniform(0.4, 1.4)
        amplitude[inside] = rng.uniform(0.6, 1.6)
    return depth, amplitude


_BUILDERS = {"books": _books, "planes": _planes, "disks": _disks}


def make_phantom(
    kind: str,
    n1: int,
    n2: int,
    seed: int = 0,
    omega: float = DEFAULT_OMEGA,
    emitted_amplitude: float = DEFAULT_EMITTED_AMPLITUDE,
) -> Scene:
    if kind not in _BUILDERS:
        raise ConfigError(f"unknown phantom kind '{kind}' (choose from {', '.join(PHANTOM_KINDS)})")
    if n1 < 1 or n2 < 1:
        raise ConfigError(f"phantom size must be positive, got {n1}x{n2}")

    rng = rng_for(seed, "phantom")
    depth, amplitude = _BUILDERS[kind](rng, n1, n2)
    # K ไม่ขึ้นกับตำแหน่ง pixel
    offset = np.full((n1, n2), rng.uniform(0.1, 0.5))
    return Scene(
        depth=depth,
        amplitude=amplitude,
        offset=offset,
        emitted_amplitude=emitted_amplitude,
        omega=omega,
        kind=kind,
        seed=seed,
    )


def phantom_suite(kind: str, count: int, n1: int, n2: int, seed: int = 0, **kwargs) -> List[Scene]:
    """ฉาก count ฉาก แต่ละฉากได้ seed ของตัวเอง"""
    return [make_phantom(kind, n1, n2, s, **kwargs) for s in child_seeds(seed, "phantom", count)]
