import pytest

from tofcs.config import TOOL_VERSION
from tofcs.errors import ConfigError, DataFormatError
from tofcs.models import FistaConfig, RunManifest, SolverSettings, TvConfig


def test_settings_defaults():
    s = SolverSettings()
    assert (s.lam, s.mu) == (0.05, 0.1)
    assert s.fista_config("block") == FistaConfig(lam=0.05, max_iters=300)
    assert s.tv_config("global") == TvConfig(mu=0.1, max_iters=300)


def test_settings_from_file_and_overrides(tmp_path):
    path = tmp_path / "solver.conf"
    path.write_text("# solver\nlambda = 0.2\nmu = 0.3\ntv_block_iters = 7\n", encoding="utf-8")
    s = SolverSettings.from_file(path)
    assert (s.lam, s.mu, s.tv_block_iters) == (0.2, 0.3, 7)
    # flag ชนะไฟล์
    s = SolverSettings.from_file(path, lam=0.01, mu=None)
    assert (s.lam, s.mu) == (0.01, 0.3)


def test_settings_reject_unknown_and_invalid(tmp_path):
    path = tmp_path / "solver.conf"
    path.write_text("lamda = 0.2\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        SolverSettings.from_file(path)
    with pytest.raises(ConfigError):
        SolverSettings.from_file(None, mu=-1.0)
    with pytest.raises(FileNotFoundError):
        SolverSettings.from_file(tmp_path / "missing.conf")


def test_manifest_roundtrip(tmp_path):
    manifest = RunManifest(
        command="genmatrix",
        seed=42,
        params={"n1": 28, "ratios": [1, 2.0], "compact": False, "note": None},
    )
    path = manifest.write(tmp_path)
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[:3] == ["command = genmatrix", "seed = 42", f"tool_version = {TOOL_VERSION}"]
    assert "compact = false" in lines
    assert "ratios = 1 2.0" in lines
    assert not any(ln.startswith("note") for ln in lines)

    loaded = RunManifest.load(path)
    assert loaded.command == "genmatrix"
    assert loaded.seed == 42
    assert loaded.params["n1"] == "28"


def test_manifest_needs_command(tmp_path):
    path = tmp_path / "manifest.txt"
    path.write_text("seed = 1\n", encoding="utf-8")
    with pytest.raises(DataFormatError):
        RunManifest.load(path)
