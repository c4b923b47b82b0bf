"""Runtime configuration: defaults, JSON config files, env fallback.

Precedence is CLI flags > config file > built-in defaults. The file is
flat JSON; unknown keys are rejected so typos surface instead of
silently reverting to defaults. When no --config path is given the
NDF_CONFIG environment variable is consulted.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace

from .bounds import PaperConstants

__all__ = ["RunConfig", "ConfigError", "load_config", "ENV_VAR"]

ENV_VAR = "NDF_CONFIG"


class ConfigError(ValueError):
    """Malformed or unknown configuration input (a usage error)."""


@dataclass(frozen=True)
class RunConfig:
    """Every tunable the package exposes, with its default.

    b_d, r_d, c_d, c1_margin, c1_override parameterize the bound
    constants; design_tol is the design-certification tolerance on the
    normalized residual and the moment deviation; gradient_tol stops
    descent on small tangent gradients; quad_pad is added to 2m when
    choosing quadrature orders; flow_steps is the default step count of
    the gradient-flow integrator.
    """

    b_d: float = 7.0
    r_d: float = 1.0
    c_d: float = 1.0
    c1_margin: float = 0.01
    c1_override: float | None = None
    design_tol: float = 1e-10
    gradient_tol: float = 1e-14
    quad_pad: int = 16
    flow_steps: int = 200
    seed: int = 42
    max_iters: int = 2000
    restarts: int = 8
    init: str = "auto"
    line_search: str = "backtracking"

    def __post_init__(self):
        if self.design_tol <= 0 or self.gradient_tol <= 0:
            raise ConfigError("tolerances must be > 0")
        if self.quad_pad < 0:
            raise ConfigError("quad_pad must be >= 0")
        if self.flow_steps < 10:
            raise ConfigError("flow_steps must be >= 10")
        if self.r_d <= 0 or self.b_d <= 0 or self.c_d <= 0:
            raise ConfigError("b_d, r_d, c_d must be > 0")

    def constants(self) -> PaperConstants:
        return PaperConstants(
            b_d=self.b_d,
            r_d=self.r_d,
            c_d=self.c_d,
            c1_margin=self.c1_margin,
            c1_override=self.c1_override,
        )

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def load_config(path: str | None = None) -> RunConfig:
    """Build a RunConfig from a JSON file, the env fallback, or defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return RunConfig()
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config {path} is not valid JSON: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError(
            f"unknown config keys {unknown}; known keys: {sorted(known)}")
    try:
        return replace(RunConfig(), **raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bad config value in {path}: {e}") from e
