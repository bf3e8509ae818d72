import numpy as np
import pytest

from tofcs.errors import ConfigError, GeometryError, exit_code_for, DimensionError, SolverError, TofcsError
from tofcs.schema import Scene
from tofcs.sensing import identity_sensing_matrix
from tofcs.validator import raise_on_errors, validate_all, validate_geometry, validate_matrix, validate_scene


def _codes(issues):
    return {i["code"] for i in issues}


def _scene(**kw):
    values = dict(depth=np.full((4, 4), 1.0), amplitude=np.ones((4, 4)), offset=np.zeros((4, 4)))
    values.update(kw)
    return Scene(**values)


def test_clean_scene_has_no_issues():
    assert validate_scene(_scene()) == []


def test_scene_problems():
    bad_amp = np.ones((4, 4))
    bad_amp[0, 0] = -1
    assert "NEGATIVE_AMPLITUDE" in _codes(validate_scene(_scene(amplitude=bad_amp)))
    assert "NEGATIVE_DEPTH" in _codes(validate_scene(_scene(depth=np.full((4, 4), -0.5))))
    assert "SHAPE_MISMATCH" in _codes(validate_scene(_scene(offset=np.zeros((2, 2)))))
    assert "BAD_OMEGA" in _codes(validate_scene(_scene(omega=0.0)))
    wraps = validate_scene(_scene(depth=np.full((4, 4), 10.0)))
    assert [i["level"] for i in wraps] == ["warning"]


def test_zero_amplitude_is_info():
    amp = np.ones((4, 4))
    amp[1, 2] = 0
    issues = validate_scene(_scene(amplitude=amp))
    assert issues[0]["code"] == "ZERO_AMPLITUDE_PIXELS"
    assert issues[0]["context"]["count"] == 1


@pytest.mark.parametrize(
    "args,code",
    [
        ((0, 28, 14), "BAD_IMAGE_SIZE"),
        ((28, 30, 14), "SEGMENT_WIDTH"),
        ((28, 28, 14, 15), "BAD_ROW_COUNT"),
        ((28, 28, 14, 0), "BAD_ROW_COUNT"),
    ],
)
def test_geometry_codes(args, code):
    assert code in _codes(validate_geometry(*args))


def test_block_geometry():
    assert _codes(validate_geometry(28, 28, 14, b=21)) == {"BLOCK_NOT_MULTIPLE"}
    assert _codes(validate_geometry(28, 28, 14, b=42)) == {"BLOCK_TOO_LARGE"}
    assert validate_geometry(168, 224, 14, r=7, b=28) == []


def test_matrix_checks():
    M = identity_sensing_matrix(4, 8, 4)
    assert validate_matrix(M, (4, 8)) == []
    assert "MATRIX_IMAGE_MISMATCH" in _codes(validate_all(_scene(), M))


def test_raise_on_errors_ignores_warnings():
    raise_on_errors([{"level": "warning", "code": "X", "message": "m", "context": {}}])
    with pytest.raises(ConfigError, match="SEGMENT_WIDTH"):
        raise_on_errors(validate_geometry(28, 30, 14), ConfigError)
    with pytest.raises(GeometryError):
        raise_on_errors(validate_geometry(28, 30, 14))


def test_exit_codes():
    assert exit_code_for(ConfigError("x")) == 2
    assert exit_code_for(DimensionError("x")) == 3
    assert exit_code_for(SolverError("x")) == 4
    assert exit_code_for(TofcsError("x")) == 4
    assert exit_code_for(FileNotFoundError("x")) == 3
    assert exit_code_for(PermissionError("x")) == 3
    assert exit_code_for(ValueError("x")) == 2
    assert exit_code_for(RuntimeError("x")) == 4
    assert exit_code_for(KeyError("x")) == 4
