from __future__ import annotations

"""
seeding.py

ทุก randomness มาจาก master seed ตัวเดียว แยกเป็น sub-stream ตามชื่อ
เปลี่ยน component หนึ่ง (เช่น noise) โดยไม่กระทบ stream อื่น
"""

from typing import List

import numpy as np


STREAM_IDS = {
    "matrix": 1,
    "phantom": 2,
    "noise": 3,
    "pool": 4,
    "support": 5,
    "test_images": 6,
}


def substream(seed: int, name: str) -> np.random.SeedSequence:
    if name not in STREAM_IDS:
        raise KeyError(f"unknown random stream: {name}")
    return np.random.SeedSequence(entropy=int(seed), spawn_key=(STREAM_IDS[name],))


def rng_for(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(substream(seed, name))


def child_seeds(seed: int, name: str, count: int) -> List[int]:
    """seed อิสระ count ตัว (เช่น 1 ตัวต่อ sensing block) เป็น int เพื่อเก็บลงไฟล์ได้"""
    children = substream(seed, name).spawn(count)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]
