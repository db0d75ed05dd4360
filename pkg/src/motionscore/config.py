"""Engine configuration: every scoring threshold in one overridable tree.

Precedence is command-line ``--set`` overrides > config file > built-in
defaults.  The config file is JSON with sections named after the fields of
EngineConfig, e.g. ``{"rom": {"tol": 10.0}, "weights": {"alpha": 0.6, ...}}``.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .aggregation import AggregationWeights
from .anatomy_metrics import BoneLengthConfig, ExtraLimbConfig
from .errors import ConfigError, ParseError
from .kinematic_metrics import CollisionConfig, RomConfig
from .kinetic_metrics import ExtremesConfig, SmoothnessConfig


def _default_collision_weights() -> AggregationWeights:
    # normalized with the severe rate emphasized over the constant offset
    return AggregationWeights(alpha=0.45, beta=0.25, gamma=0.15, delta=0.15)


@dataclass(frozen=True)
class EngineConfig:
    weights: AggregationWeights = field(default_factory=AggregationWeights)
    collision_weights: AggregationWeights = field(default_factory=_default_collision_weights)
    extra_limb: ExtraLimbConfig = field(default_factory=ExtraLimbConfig)
    bone_length: BoneLengthConfig = field(default_factory=BoneLengthConfig)
    rom: RomConfig = field(default_factory=RomConfig)
    collision: CollisionConfig = field(default_factory=CollisionConfig)
    extremes: ExtremesConfig = field(default_factory=ExtremesConfig)
    smoothness: SmoothnessConfig = field(default_factory=SmoothnessConfig)

    def replace_section(self, section: str, **changes) -> "EngineConfig":
        if not hasattr(self, section):
            raise ConfigError(f"unknown config section '{section}'")
        updated = dataclasses.replace(getattr(self, section), **changes)
        return dataclasses.replace(self, **{section: updated})

    def scaled(self, scale: float) -> "EngineConfig":
        """Rescale every tolerance-like threshold for robustness sweeps.

        Covers the ROM tolerance, both severity ramps, and the bone-length
        tolerance; flag thresholds and aggregation weights stay fixed.
        """
        if scale <= 0:
            raise ConfigError("tolerance scale must be positive")
        cfg = self.replace_section("rom", tol=self.rom.tol * scale)
        cfg = cfg.replace_section(
            "extra_limb",
            tau_mild=self.extra_limb.tau_mild * scale,
            tau_severe=self.extra_limb.tau_severe * scale,
        )
        cfg = cfg.replace_section(
            "collision",
            tau_mild=self.collision.tau_mild * scale,
            tau_severe=self.collision.tau_severe * scale,
        )
        cfg = cfg.replace_section(
            "bone_length", tolerance=self.bone_length.tolerance * scale
        )
        return cfg

    def with_weights(self, weights: AggregationWeights,
                     collision_weights: AggregationWeights | None = None) -> "EngineConfig":
        cfg = dataclasses.replace(self, weights=weights)
        if collision_weights is not None:
            cfg = dataclasses.replace(cfg, collision_weights=collision_weights)
        return cfg

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            out[f.name] = dataclasses.asdict(getattr(self, f.name))
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        cfg = cls()
        for section, changes in data.items():
            if not isinstance(changes, dict):
                raise ConfigError(f"config section '{section}' must be an object")
            cfg = cfg.replace_section(section, **changes)
        return cfg

    @classmethod
    def from_file(cls, path) -> "EngineConfig":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        return cls.from_dict(data)

    def with_overrides(self, assignments) -> "EngineConfig":
        """Apply ``section.key=value`` strings (highest precedence)."""
        cfg = self
        for item in assignments:
            try:
                dotted, raw = item.split("=", 1)
                section, key = dotted.split(".", 1)
            except ValueError:
                raise ConfigError(
                    f"override '{item}' must look like section.key=value"
                ) from None
            value = json.loads(raw) if raw not in ("", "null") else None
            cfg = cfg.replace_section(section, **{key: value})
        return cfg
