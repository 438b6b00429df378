"""
Validated configuration of a command-line run.
"""
import logging
import math
import os
from pathlib import Path
from typing import Dict, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

from ..device.config import LaunchConfig, create_launch_config, normalize_mode, workers_from_env
from ..errors import DenseMemoryError
from ..fem.mesh import Mesh
from ..fem.reference import QuadratureRule, quadrature_rule
from ..fem.weakform import PdeProblem
from ..meshgen import read_mesh, unit_square_mesh
from ..symbolic import free_symbols, parse

DEFAULT_MEM_CAP_BYTES = 2 * 1024 ** 3
DEFAULT_MESH_SIZE = 16
COORDINATES = frozenset({"x", "y"})

_PI = repr(math.pi)
_COSINE = f"cos({_PI}*x)*cos({_PI}*y)"

# Expression strings of the built-in problems.
PRESETS: Dict[str, Dict[str, object]] = {
    "demo": {
        "sigma": ("1", "-x-y", "x+y", "1"),
        "lam": 1.0,
        "f": "-2*(x*x + y*y) + 36",
        "exact": None,
    },
    "cosine": {
        "sigma": ("1", "0", "0", "1"),
        "lam": 1.0,
        "f": f"(2*{_PI}^2 + 1)*{_COSINE}",
        "exact": _COSINE,
    },
}


def mem_cap_from_env(default: int = DEFAULT_MEM_CAP_BYTES) -> int:
    """
    Dense-matrix memory cap from FEMFORGE_MEM_CAP_BYTES.

    Raises:
        ValueError: If the variable is set but not a positive integer
    """
    raw = os.getenv("FEMFORGE_MEM_CAP_BYTES")
    if raw is None or raw.strip() == "":
        return default
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError("FEMFORGE_MEM_CAP_BYTES environment variable must be a positive integer") from None
    if cap < 1:
        raise ValueError("FEMFORGE_MEM_CAP_BYTES environment variable must be a positive integer")
    return cap


def log_level_from_env(default: str = "WARNING") -> int:
    """
    Logging level from FEMFORGE_LOG_LEVEL.

    Raises:
        ValueError: If the variable names no logging level
    """
    name = (os.getenv("FEMFORGE_LOG_LEVEL") or default).strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ValueError(f"FEMFORGE_LOG_LEVEL environment variable names no logging level: {name}")
    return level


def _check_coordinates(text: str) -> str:
    extra = free_symbols(parse(text)) - COORDINATES
    if extra:
        raise ValueError(f"Expression '{text}' may only use x and y, found {sorted(extra)}")
    return text


class ProblemConfig(BaseModel):
    """Problem, mesh and execution settings of one run."""

    sigma: Tuple[str, str, str, str] = Field(
        PRESETS["demo"]["sigma"], description="Diffusion tensor entries s11, s12, s21, s22 in x, y")
    lam: float = Field(1.0, description="Reaction coefficient; should be strictly positive")
    f: str = Field(PRESETS["demo"]["f"], description="Right-hand side in x, y")
    exact: Optional[str] = Field(None, description="Exact solution in x, y for error reporting")
    name: str = Field("custom", description="Label used in reports")
    n: Optional[int] = Field(None, ge=1, description="Cells per side of the generated unit square mesh")
    mesh_file: Optional[Path] = Field(None, description="Mesh file to read instead of generating one")
    layout: Literal["dense", "ell"] = Field("ell", description="Global matrix storage")
    mode: Literal["deterministic", "parallel"] = Field("deterministic", description="Block scheduling")
    workers: int = Field(default_factory=workers_from_env, ge=1, description="Workers in parallel mode")
    elems_per_block: int = Field(4, ge=1, description="Elements per thread block")
    evaluator: Literal["compiled", "interpreted"] = Field(
        "compiled", description="Kernel programs or tree evaluation inside the simulated device")
    engine: Literal["lockstep", "cooperative"] = Field("lockstep", description="Device execution engine")
    seed: Optional[int] = Field(None, description="Block shuffle seed in parallel mode")
    quad_degree: Literal[1, 2, 4] = Field(2, description="Quadrature degree of assembly")
    mem_cap_bytes: int = Field(default_factory=mem_cap_from_env, ge=1,
                               description="Largest dense matrix the run may allocate")

    @field_validator("sigma")
    @classmethod
    def check_sigma(cls, value: Tuple[str, str, str, str]) -> Tuple[str, str, str, str]:
        for text in value:
            _check_coordinates(text)
        return value

    @field_validator("f")
    @classmethod
    def check_f(cls, value: str) -> str:
        return _check_coordinates(value)

    @field_validator("exact")
    @classmethod
    def check_exact(cls, value: Optional[str]) -> Optional[str]:
        return None if value is None else _check_coordinates(value)

    @field_validator("mode", mode="before")
    @classmethod
    def check_mode(cls, value):
        return normalize_mode(value) if isinstance(value, str) else value

    @model_validator(mode="after")
    def check_mesh_source(self) -> "ProblemConfig":
        if self.n is not None and self.mesh_file is not None:
            raise ValueError("Give either a mesh size or a mesh file, not both")
        if self.n is None and self.mesh_file is None:
            self.n = DEFAULT_MESH_SIZE
        if self.lam <= 0.0:
            logging.warning(f"lambda = {self.lam} is not strictly positive; the system may be singular")
        return self

    @classmethod
    def from_preset(cls, preset: str, **overrides) -> "ProblemConfig":
        """
        Start from a built-in problem and override individual settings.

        Raises:
            ValueError: If the preset is not known
        """
        preset = preset.lower()
        if preset not in PRESETS:
            raise ValueError(f"Unsupported problem: {preset}")
        values = {**PRESETS[preset], "name": preset}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def problem(self) -> PdeProblem:
        return PdeProblem.from_strings(self.sigma, self.lam, self.f, self.exact, self.name)

    def rule(self) -> QuadratureRule:
        return quadrature_rule(self.quad_degree)

    def mesh(self) -> Mesh:
        if self.mesh_file is not None:
            return read_mesh(self.mesh_file)
        return unit_square_mesh(self.n)

    def launch_config(self, **overrides) -> LaunchConfig:
        values = dict(mode=self.mode, workers=self.workers, elems_per_block=self.elems_per_block,
                      seed=self.seed, engine=self.engine, n_quad=self.rule().n_points)
        values.update(overrides)
        return create_launch_config(**values)

    def check_dense_memory(self, n_nodes: int) -> None:
        """
        Refuse dense layouts larger than the memory cap.

        Raises:
            DenseMemoryError: If N^2 doubles exceed ``mem_cap_bytes``
        """
        if self.layout != "dense":
            return
        needed = 8 * n_nodes * n_nodes
        if needed > self.mem_cap_bytes:
            raise DenseMemoryError(
                f"A dense {n_nodes}x{n_nodes} matrix needs {needed} bytes, more than the "
                f"{self.mem_cap_bytes}-byte cap; use --layout ell or raise --mem-cap-bytes")
