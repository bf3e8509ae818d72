import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from tofcs.config import DEFAULT_OMEGA, SPEED_OF_LIGHT
from tofcs.errors import ConfigError, DomainError
from tofcs.schema import DifferencePair, PhaseImageSet, Scene
from tofcs.tof_model import (
    add_noise,
    amplitude_from_differences,
    depth_from_differences,
    depth_from_phase,
    depth_to_phase,
    phase_differences,
    phase_from_differences,
    simulate_phase_images,
    subtract_reference,
)


D_MAX = np.pi * SPEED_OF_LIGHT / DEFAULT_OMEGA


def _round_trip(scene):
    pair = phase_differences(simulate_phase_images(scene))
    return depth_from_differences(pair, scene.omega, scene.c)[0]


def _scene(rng, shape=(6, 8), d_hi=None):
    d_hi = D_MAX * 0.99 if d_hi is None else d_hi
    return Scene(
        depth=rng.uniform(0.05, d_hi, size=shape),
        amplitude=rng.uniform(0.2, 1.5, size=shape),
        offset=np.full(shape, 0.3),
        emitted_amplitude=2.0,
    )


def test_d_max_is_about_three_meters():
    assert depth_to_phase(D_MAX * 0.5, DEFAULT_OMEGA) == pytest.approx(np.pi)
    assert 2.99 < D_MAX < 3.0


def test_depth_to_phase_wraps():
    assert depth_to_phase(0.0, DEFAULT_OMEGA) == 0.0
    assert depth_to_phase(4.5, DEFAULT_OMEGA) == pytest.approx(3.1481, abs=1e-4)
    assert depth_to_phase(D_MAX, DEFAULT_OMEGA) == pytest.approx(0.0, abs=1e-9)


def test_depth_to_phase_rejects_bad_input():
    with pytest.raises(DomainError):
        depth_to_phase(-0.1, DEFAULT_OMEGA)
    with pytest.raises(ConfigError):
        depth_to_phase(1.0, 0.0)


def test_phase_images_follow_correlation_model(rng):
    scene = _scene(rng)
    p = simulate_phase_images(scene)
    phi = depth_to_phase(scene.depth, scene.omega)
    half = 0.5 * scene.amplitude * scene.emitted_amplitude
    assert_allclose(p.p1, half * np.cos(phi) + 0.3)
    assert_allclose(p.p2, -half * np.sin(phi) + 0.3)
    pair = phase_differences(p)
    assert_allclose(pair.u, 2 * half * np.cos(phi), atol=1e-12)
    assert_allclose(pair.v, 2 * half * np.sin(phi), atol=1e-12)
    assert_allclose(amplitude_from_differences(pair, scene.emitted_amplitude), scene.amplitude, atol=1e-12)


def test_noiseless_round_trip(rng):
    for _ in range(50):
        scene = _scene(rng)
        assert_allclose(_round_trip(scene), scene.depth, atol=1e-9)


def test_beyond_d_max_wraps(rng):
    scene = _scene(rng)
    scene.depth = scene.depth + D_MAX
    assert_allclose(_round_trip(scene), np.mod(scene.depth, D_MAX), atol=1e-8)


def test_zero_differences_are_indeterminate():
    pair = DifferencePair(u=np.zeros((2, 2)), v=np.array([[0.0, 1.0], [0.0, 0.0]]))
    phi, mask = phase_from_differences(pair)
    assert_array_equal(mask, [[True, False], [True, True]])
    assert phi[0, 1] == pytest.approx(np.pi / 2)
    assert phi[mask].tolist() == [0.0, 0.0, 0.0]


def test_min_amplitude_masks_weak_pixels():
    pair = DifferencePair(u=np.array([[1e-4, 1.0]]), v=np.zeros((1, 2)))
    _, mask = phase_from_differences(pair, min_amplitude=1e-3)
    assert_array_equal(mask, [[True, False]])


def test_phase_range():
    pair = DifferencePair(u=np.array([1.0, -1.0, 1.0]), v=np.array([-1e-18, 0.0, -1.0]))
    phi, _ = phase_from_differences(pair)
    assert np.all(phi >= 0) and np.all(phi < 2 * np.pi)


def test_depth_from_phase_rejects_out_of_range():
    with pytest.raises(DomainError):
        depth_from_phase(2 * np.pi, DEFAULT_OMEGA)
    assert depth_from_phase(np.pi, DEFAULT_OMEGA) == pytest.approx(D_MAX / 2)


def test_simulate_rejects_negative_amplitude(rng):
    scene = _scene(rng)
    scene.amplitude[0, 0] = -1.0
    with pytest.raises(DomainError):
        simulate_phase_images(scene)


def test_noise_is_seeded_and_zero_sigma_copies(rng):
    p = simulate_phase_images(_scene(rng))
    a = add_noise(p, 0.01, seed=3)
    b = add_noise(p, 0.01, seed=3)
    assert_array_equal(a.p1, b.p1)
    assert not np.array_equal(a.p1, p.p1)
    same = add_noise(p, 0.0)
    assert_array_equal(same.p4, p.p4)
    assert same.p4 is not p.p4
    with pytest.raises(ConfigError):
        add_noise(p, -1.0)


def test_reference_subtraction_removes_offset(rng):
    p = simulate_phase_images(_scene(rng))
    calibrated = subtract_reference(p, 0.3)
    assert_allclose(calibrated.p1 + calibrated.p3, 0.0, atol=1e-12)
    zeroed = subtract_reference(p, p)
    assert_allclose(zeroed.p2, 0.0)


def test_depth_from_differences_masks(rng):
    scene = _scene(rng)
    scene.amplitude[1, 1] = 0.0
    depth, mask = depth_from_differences(phase_differences(simulate_phase_images(scene)), scene.omega)
    assert mask[1, 1]
    assert depth[1, 1] == 0.0
    assert mask.sum() == 1


def test_noise_std_matches_sigma():
    shape = (250, 400)
    flat = PhaseImageSet(*(np.zeros(shape) for _ in range(4)))
    noisy = add_noise(flat, 0.1, seed=7)
    for img in noisy.as_tuple():
        assert abs(img.std() - 0.1) <= 0.002
        assert abs(img.mean()) <= 0.002
    # ภาพทั้ง 4 ได้ noise คนละชุด
    assert not np.array_equal(noisy.p1, noisy.p2)


def test_phase_ignores_offset_and_amplitude(rng):
    scene = _scene(rng)
    phi, _ = phase_from_differences(phase_differences(simulate_phase_images(scene)))
    for gain, offset in ((3.7, 0.0), (0.2, 5.0), (1.0, -0.4)):
        other = Scene(
            depth=scene.depth,
            amplitude=scene.amplitude * gain,
            offset=np.full(scene.shape, offset),
            emitted_amplitude=scene.emitted_amplitude,
        )
        phi2, mask = phase_from_differences(phase_differences(simulate_phase_images(other)))
        assert not mask.any()
        assert_allclose(phi2, phi, atol=1e-9)
