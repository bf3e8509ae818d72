from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Literal, Optional, Type, TypeVar

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .config import DEFAULT_BLOCK_SIZE, DEFAULT_SEED, DEFAULT_THREADS, TOOL_VERSION
from .errors import ConfigError, DataFormatError


Mode = Literal["block", "global"]
ModelT = TypeVar("ModelT", bound=BaseModel)


def build_model(cls: Type[ModelT], values: Dict[str, Any]) -> ModelT:
    """สร้าง pydantic model แล้วแปลง ValidationError เป็น ConfigError"""
    try:
        return cls(**values)
    except ValidationError as e:
        raise ConfigError(f"invalid {cls.__name__}: {e}") from e


def read_key_value_file(path: str | Path) -> Dict[str, str]:
    """
    อ่านไฟล์ `key = value` (รองรับ comment ด้วย #)
    ใช้กับ solver config และ manifest
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    values = dotenv_values(path)
    return {k: v for k, v in values.items() if v is not None}


# --------------------------------------------------------
# Solver configs
# --------------------------------------------------------


class FistaConfig(BaseModel):
    """
    config ของ FISTA สำหรับ λ‖z‖₁ + ‖B̃z − y‖²

    step = None → คำนวณจาก 1 / (2·margin·‖B̃‖²) ตอน solve
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)

    lam: float = Field(0.05, alias="lambda", ge=0)
    max_iters: int = Field(300, ge=1)
    step: Optional[float] = Field(None, gt=0)
    stop_tol: Optional[float] = Field(None, gt=0)
    norm_margin: float = Field(1.05, ge=1.0)
    restart: bool = True
    record_objective: bool = False

    @classmethod
    def for_mode(cls, mode: Mode, **overrides: Any) -> "FistaConfig":
        values: Dict[str, Any] = {"max_iters": 300 if mode == "block" else 1000}
        values.update(overrides)
        return build_model(cls, values)

    def resolve_step(self, op_norm: float) -> float:
        limit = 1.0 / (2.0 * op_norm ** 2) if op_norm > 0 else float("inf")
        if self.step is None:
            return 1.0 / (2.0 * self.norm_margin * op_norm ** 2) if op_norm > 0 else 1.0
        if self.step > 1.01 * limit:
            raise ConfigError(
                f"FISTA step {self.step:.6g} exceeds 1/(2‖op‖²) = {limit:.6g}"
            )
        return self.step


class TvConfig(BaseModel):
    """
    config ของ primal-dual solver สำหรับ μ‖Dz‖₁ + ‖Bz − y‖²

    sigma / tau = None → ใช้ 0.99 / ‖[D; B]‖ ทั้งคู่
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    mu: float = Field(0.1, ge=0)
    max_iters: int = Field(100, ge=1)
    sigma: Optional[float] = Field(None, gt=0)
    tau: Optional[float] = Field(None, gt=0)
    theta: float = 1.0
    isotropic: bool = False
    stop_tol: Optional[float] = Field(None, gt=0)
    record_objective: bool = False

    @classmethod
    def for_mode(cls, mode: Mode, **overrides: Any) -> "TvConfig":
        values: Dict[str, Any] = {"max_iters": 100 if mode == "block" else 300}
        values.update(overrides)
        return build_model(cls, values)

    def resolve_steps(self, k_norm: float) -> tuple[float, float]:
        default = 0.99 / k_norm if k_norm > 0 else 1.0
        sigma = self.sigma if self.sigma is not None else default
        tau = self.tau if self.tau is not None else default
        if sigma * tau * k_norm ** 2 > 1.0 + 1e-9:
            raise ConfigError(
                f"primal-dual steps violate sigma·tau·‖K‖² <= 1 "
                f"(sigma={sigma:.4g}, tau={tau:.4g}, ‖K‖={k_norm:.4g})"
            )
        return sigma, tau


class SolverSettings(BaseModel):
    """
    ค่าจากไฟล์ solver config (key = value) รวมทุก method

    ตัวอย่างไฟล์:

        lambda = 0.05
        mu = 0.1
        fista_block_iters = 300
        tv_global_iters = 300
    """

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    lam: float = Field(0.05, alias="lambda", ge=0)
    mu: float = Field(0.1, ge=0)
    fista_block_iters: int = Field(300, ge=1)
    fista_global_iters: int = Field(1000, ge=1)
    tv_block_iters: int = Field(100, ge=1)
    tv_global_iters: int = Field(300, ge=1)
    block_size: int = Field(DEFAULT_BLOCK_SIZE, ge=1)
    threads: int = Field(DEFAULT_THREADS, ge=1)
    isotropic: bool = False
    stop_tol: Optional[float] = Field(None, gt=0)

    @classmethod
    def from_file(cls, path: str | Path | None, **overrides: Any) -> "SolverSettings":
        values: Dict[str, Any] = dict(read_key_value_file(path)) if path else {}
        for key, value in overrides.items():
            if value is not None:
                values["lambda" if key == "lam" else key] = value
        return build_model(cls, values)

    def fista_config(self, mode: Mode) -> FistaConfig:
        iters = self.fista_block_iters if mode == "block" else self.fista_global_iters
        return FistaConfig(lam=self.lam, max_iters=iters, stop_tol=self.stop_tol)

    def tv_config(self, mode: Mode) -> TvConfig:
        iters = self.tv_block_iters if mode == "block" else self.tv_global_iters
        return TvConfig(mu=self.mu, max_iters=iters, isotropic=self.isotropic, stop_tol=self.stop_tol)


# --------------------------------------------------------
# RunManifest
# --------------------------------------------------------


class RunManifest(BaseModel):
    """
    manifest.txt ที่ทุก command เขียนไว้ข้าง output

    params เก็บ argument ทั้งหมดของ command เพื่อรันซ้ำได้แบบ bit-exact
    """

    model_config = ConfigDict(extra="allow")

    command: str
    seed: int = DEFAULT_SEED
    config_path: Optional[str] = None
    tool_version: str = TOOL_VERSION
    params: Dict[str, Any] = Field(default_factory=dict)

    def to_lines(self) -> list[str]:
        lines = [
            f"command = {self.command}",
            f"seed = {self.seed}",
            f"tool_version = {self.tool_version}",
        ]
        if self.config_path:
            lines.append(f"config = {self.config_path}")
        for key in sorted(self.params):
            if key in ("command", "seed", "tool_version", "config") or self.params[key] is None:
                continue
            lines.append(f"{key} = {_format_value(self.params[key])}")
        return lines

    def write(self, out_dir: str | Path) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / "manifest.txt"
        path.write_text("\n".join(self.to_lines()) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> "RunManifest":
        raw = read_key_value_file(path)
        if "command" not in raw:
            raise DataFormatError(f"manifest {path} has no 'command' key")
        params = {k: v for k, v in raw.items() if k not in ("command", "seed", "tool_version", "config")}
        return cls(
            command=raw["command"],
            seed=int(raw.get("seed", DEFAULT_SEED)),
            config_path=raw.get("config"),
            tool_version=raw.get("tool_version", TOOL_VERSION),
            params=params,
        )


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return " ".join(_format_value(v) for v in value)
    if value is None:
        return ""
    return str(value)
