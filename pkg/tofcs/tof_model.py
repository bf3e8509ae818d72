from __future__ import annotations

"""
tof_model.py

หน้าที่:
- depth → phase (wrap ที่ d_max = πc/ω)
- Scene → phase image 4 ภาพ (p1..p4) ตามสูตร correlation
- เติม Gaussian noise / calibrate ด้วย reference image
- phase images → difference pair (u, v) → phase → depth
"""

from typing import Tuple

import numpy as np

from .config import SPEED_OF_LIGHT
from .errors import ConfigError, DimensionError, DomainError
from .schema import DifferencePair, PhaseImageSet, Scene
from .validator import raise_on_errors, validate_scene


TWO_PI = 2.0 * np.pi


def _wrap_phase(phi: np.ndarray) -> np.ndarray:
    phi = np.mod(phi, TWO_PI)
    # mod ของค่าลบเล็กมาก ๆ อาจปัดเป็น 2π พอดี
    return np.where(phi >= TWO_PI, 0.0, phi)


def depth_to_phase(d, omega: float, c: float = SPEED_OF_LIGHT):
    """φ = (2ωd / c) mod 2π"""
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0):
        raise DomainError("depth must be non-negative")
    if not omega > 0:
        raise ConfigError(f"omega must be positive, got {omega}")
    phi = _wrap_phase(2.0 * omega * d / c)
    return float(phi) if phi.ndim == 0 else phi


def simulate_phase_images(scene: Scene) -> PhaseImageSet:
    """
    p1 = (AC/2)cosφ + K, p2 = −(AC/2)sinφ + K,
    p3 = −(AC/2)cosφ + K, p4 = (AC/2)sinφ + K
    """
    raise_on_errors(validate_scene(scene), DomainError)

    phi = depth_to_phase(scene.depth, scene.omega, scene.c)
    half = 0.5 * scene.amplitude * scene.emitted_amplitude
    cos_t = half * np.cos(phi)
    sin_t = half * np.sin(phi)
    K = np.broadcast_to(np.asarray(scene.offset, dtype=np.float64), scene.shape)
    return PhaseImageSet(
        p1=cos_t + K,
        p2=-sin_t + K,
        p3=-cos_t + K,
        p4=sin_t + K,
    )


def add_noise(p: PhaseImageSet, sigma: float, seed: int | np.random.Generator = 0) -> PhaseImageSet:
    """Gaussian noise อิสระทุก pixel ของทุกภาพ, sigma = 0 คืนภาพเดิม"""
    if sigma < 0:
        raise ConfigError(f"noise sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return PhaseImageSet(*(img.copy() for img in p.as_tuple()))
    rng = np.random.default_rng(seed)
    return PhaseImageSet(*(img + rng.normal(0.0, sigma, size=img.shape) for img in p.as_tuple()))


def subtract_reference(p: PhaseImageSet, reference: PhaseImageSet | float) -> PhaseImageSet:
    """calibrate: ลบ reference image (หรือค่าคงที่) ออกจากทุก phase image"""
    if isinstance(reference, PhaseImageSet):
        if reference.shape != p.shape:
            raise DimensionError(f"reference shape {reference.shape} != {p.shape}")
        return PhaseImageSet(*(a - b for a, b in zip(p.as_tuple(), reference.as_tuple())))
    level = float(reference)
    return PhaseImageSet(*(img - level for img in p.as_tuple()))


def phase_differences(p: PhaseImageSet) -> DifferencePair:
    shapes = {np.shape(img) for img in p.as_tuple()}
    if len(shapes) != 1:
        raise DimensionError(f"phase images have inconsistent shapes: {sorted(shapes)}")
    return DifferencePair(u=p.p1 - p.p3, v=p.p4 - p.p2)


def phase_from_differences(
    pair: DifferencePair,
    min_amplitude: float = 0.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    φ = arg(u + iv) ใน [0, 2π)

    :return: (phase, indeterminate mask) pixel ที่ √(u²+v²) ≤ min_amplitude (หรือ u = v = 0)
             ได้ phase = 0 และ mask = True
    """
    u = np.asarray(pair.u, dtype=np.float64)
    v = np.asarray(pair.v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimensionError(f"u shape {u.shape} != v shape {v.shape}")

    mask = (u == 0) & (v == 0)
    if min_amplitude > 0:
        mask |= amplitude_from_differences(DifferencePair(u=u, v=v)) <= min_amplitude
    phi = _wrap_phase(np.arctan2(v, u))
    phi = np.where(mask, 0.0, phi)
    return phi, mask


def amplitude_from_differences(pair: DifferencePair, emitted_amplitude: float = 1.0) -> np.ndarray:
    """A = √(u² + v²) / C"""
    return np.hypot(pair.u, pair.v) / emitted_amplitude


def depth_from_phase(phi, omega: float, c: float = SPEED_OF_LIGHT):
    """d = φc / (2ω) ∈ [0, d_max)"""
    phi = np.asarray(phi, dtype=np.float64)
    if np.any(phi < 0) or np.any(phi >= TWO_PI):
        raise DomainError("phase must lie in [0, 2π)")
    if not omega > 0:
        raise ConfigError(f"omega must be positive, got {omega}")
    d = phi * c / (2.0 * omega)
    return float(d) if d.ndim == 0 else d


def depth_from_differences(
    pair: DifferencePair,
    omega: float,
    c: float = SPEED_OF_LIGHT,
    min_amplitude: float = 0.0,
) -> Tuple[np.ndarray, np.ndarray]:
    phi, mask = phase_from_differences(pair, min_amplitude=min_amplitude)
    return depth_from_phase(phi, omega, c), mask

