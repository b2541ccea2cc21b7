"""Parameter bundles shared by the analytical engine, the simulator and the CLI.

All quantities are in normalised units: lengths in multiples of the unit
path-loss distance, time in arbitrary units, densities per unit area (and per
unit time for the space-time process).  Transmit power is fixed to 1; under the
linear residual self-interference model the SIR does not depend on it.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields


class ParameterError(ValueError):
    """A parameter bundle violates one of its domain invariants."""


@dataclass(frozen=True)
class SystemParams:
    lambda_: float = 0.05
    r: float = 1.0
    alpha: float = 4.0
    theta: float = 2.0
    eta: float = 1.0
    w: float = 1.0

    def __post_init__(self):
        validate(self)

    def replace(self, **changes) -> "SystemParams":
        data = asdict(self)
        if "lambda" in changes:
            changes = dict(changes)
            changes["lambda_"] = changes.pop("lambda")
        data.update(changes)
        return SystemParams(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "SystemParams":
        data = dict(data)
        if "lambda" in data:
            data["lambda_"] = data.pop("lambda")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SystemParams":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class DuplexMix:
    q: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.q <= 1.0):
            raise ParameterError(f"q must lie in [0, 1], got {self.q}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DuplexMix":
        return cls(**json.loads(text))


@dataclass(frozen=True)
class DurationConfig:
    """Half-duplex packet duration ``d`` and full/half duration ratio ``gamma``."""

    d: float = 1.0
    gamma: float = 1.0

    def __post_init__(self):
        if not self.d > 0:
            raise ParameterError(f"d must be positive, got {self.d}")
        if not self.gamma > 0:
            raise ParameterError(f"gamma must be positive, got {self.gamma}")

    @property
    def d_fd(self) -> float:
        return self.gamma * self.d

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DurationConfig":
        return cls(**json.loads(text))


def validate(params: SystemParams) -> SystemParams:
    """Check every invariant of ``params`` and return it unchanged.

    Raises ParameterError naming the first violated constraint.
    """
    checks = (
        ("lambda", params.lambda_ > 0, "lambda must be positive"),
        ("r", params.r >= 1, "r must be at least 1"),
        ("alpha", params.alpha > 2, "alpha must exceed 2"),
        ("theta", params.theta > 0, "theta must be positive"),
        ("eta", 0.0 <= params.eta <= 1.0, "eta must lie in [0, 1]"),
        ("w", params.w > 0, "w must be positive"),
    )
    for f in fields(params):
        v = getattr(params, f.name)
        if not isinstance(v, (int, float)) or not math.isfinite(v):
            raise ParameterError(f"{f.name} must be a finite number, got {v!r}")
    for name, ok, msg in checks:
        if not ok:
            raise ParameterError(f"{msg} (got {name}={getattr(params, name + '_' if name == 'lambda' else name)})")
    return params


def beta_coeff(params: SystemParams) -> float:
    """Residual self-interference factor ``exp(-(1 - eta) theta r^alpha)``."""
    return math.exp(-(1.0 - params.eta) * params.theta * params.r ** params.alpha)
