"""Project configuration: the continuous plant and loop constants."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .polytf import Domain, Polynomial, TransferFunction
from .xform import zoh_discretize


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ProjectConfig:
    # continuous plant with sensor gain, ascending coefficients
    plant_num: list = field(default_factory=lambda: [0.1533])
    plant_den: list = field(default_factory=lambda: [0.0, 0.7809, 1.0])
    sample_period: float = 0.1
    kpot: float = 0.0667
    step_amplitude: float = 0.07

    def __post_init__(self):
        for name in ("plant_num", "plant_den"):
            value = getattr(self, name)
            if not isinstance(value, (list, tuple)) or not value:
                raise ConfigError(f"{name}: expected a non-empty list of numbers")
            for i, c in enumerate(value):
                if isinstance(c, bool) or not isinstance(c, (int, float)) or not math.isfinite(c):
                    raise ConfigError(f"{name}[{i}]: expected a finite number, got {c!r}")
            object.__setattr__(self, name, [float(c) for c in value])
        if all(c == 0 for c in self.plant_den):
            raise ConfigError("plant_den: denominator is identically zero")
        for name in ("sample_period", "kpot", "step_amplitude"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"{name}: expected a finite number, got {v!r}")
        if not self.sample_period > 0:
            raise ConfigError(f"sample_period: must be positive, got {self.sample_period!r}")
        if self.kpot == 0:
            raise ConfigError("kpot: must be nonzero")

    @classmethod
    def from_dict(cls, data: dict) -> ProjectConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown config field")
        return cls(**data)

    @classmethod
    def load(cls, path: str | Path | None) -> ProjectConfig:
        if path is None:
            return cls()
        text = Path(path).read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)

    def plant_s(self) -> TransferFunction:
        return TransferFunction(Polynomial(self.plant_num), Polynomial(self.plant_den), Domain.s())

    def plant_z(self) -> TransferFunction:
        return zoh_discretize(self.plant_s(), self.sample_period)
