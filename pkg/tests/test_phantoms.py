import numpy as np
import pytest
from numpy.testing import assert_array_equal

from tofcs.errors import ConfigError
from tofcs.phantoms import BOOKS_MAX_DEPTH, PHANTOM_KINDS, make_phantom, phantom_suite
from tofcs.validator import validate_scene


@pytest.mark.parametrize("kind", PHANTOM_KINDS)
def test_phantoms_are_valid_scenes(kind):
    scene = make_phantom(kind, 56, 84, seed=3)
    assert scene.shape == (56, 84)
    assert scene.kind == kind
    assert np.all(scene.amplitude > 0)
    assert float(scene.depth.max()) < scene.d_max
    assert [i for i in validate_scene(scene) if i["level"] != "info"] == []


@pytest.mark.parametrize("kind", PHANTOM_KINDS)
def test_phantoms_are_seeded(kind):
    a = make_phantom(kind, 28, 28, seed=11)
    b = make_phantom(kind, 28, 28, seed=11)
    c = make_phantom(kind, 28, 28, seed=12)
    assert_array_equal(a.depth, b.depth)
    assert_array_equal(a.offset, b.offset)
    assert not np.array_equal(a.depth, c.depth)


def test_books_stay_within_shelf_depth():
    for seed in range(5):
        assert make_phantom("books", 40, 60, seed=seed).depth.max() <= BOOKS_MAX_DEPTH


def test_offset_is_constant():
    scene = make_phantom("disks", 20, 30, seed=1)
    assert np.unique(scene.offset).size == 1


def test_suite_gives_distinct_scenes():
    suite = phantom_suite("planes", 3, 16, 16, seed=4)
    assert len(suite) == 3
    assert len({s.seed for s in suite}) == 3
    assert not np.array_equal(suite[0].depth, suite[1].depth)


def test_bad_phantom_requests():
    with pytest.raises(ConfigError):
        make_phantom("teapot", 8, 8)
    with pytest.raises(ConfigError):
        make_phantom("books", 0, 8)
