"""Kinematic metrics: joint range of motion (III) and self-collision (IV)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aggregation import AggregationWeights, FrameSignals, MetricScore, aggregate_rsp, final_score
from .errors import ConfigError, SchemaError
from .geometry import colliding_faces
from .skeleton import LimitTable, SkeletonDefinition


@dataclass(frozen=True)
class RomConfig:
    """Range-of-motion scoring knobs.

    ``tol`` relaxes the anatomical interval on both sides (degrees);
    ``cross_dof_mix`` blends the per-frame mean and max violation ratios
    across DoFs (1.0 = pure mean, 0.0 = pure max).
    """

    tol: float = 15.0
    flag_threshold: float = 0.05
    cross_dof_mix: float = 0.5

    def __post_init__(self):
        if self.tol < 0:
            raise ConfigError("rom tolerance must be >= 0")
        if not 0.0 < self.flag_threshold < 1.0:
            raise ConfigError("flag threshold must lie in (0, 1)")
        if not 0.0 <= self.cross_dof_mix <= 1.0:
            raise ConfigError("cross_dof_mix must lie in [0, 1]")


@dataclass(frozen=True)
class CollisionConfig:
    tau_mild: float = 0.01
    tau_severe: float = 0.03
    min_pairs: int = 8
    min_fraction: float = 0.01
    leaf_size: int = 4

    def __post_init__(self):
        if not 0.0 <= self.tau_mild < self.tau_severe:
            raise ConfigError("need 0 <= tau_mild < tau_severe")
        if self.min_pairs < 0 or self.min_fraction < 0:
            raise ConfigError("non-local thresholds must be >= 0")


def rom_violation(theta, rom_min, rom_max, tol: float):
    """Violation magnitude and half-span-normalized ratio.

    delta = max(0, theta - (rom_max + tol), (rom_min - tol) - theta);
    ratio = min(delta / half_span, 1).  Broadcasts over arrays.
    """
    theta = np.asarray(theta, dtype=float)
    rom_min = np.asarray(rom_min, dtype=float)
    rom_max = np.asarray(rom_max, dtype=float)
    delta = np.maximum(0.0, np.maximum(theta - (rom_max + tol),
                                       (rom_min - tol) - theta))
    half_span = 0.5 * (rom_max - rom_min)
    ratio = np.minimum(delta / half_span, 1.0)
    return delta, ratio


def rom_signals(joint_angles, limits: LimitTable, skeleton: SkeletonDefinition,
                cfg: RomConfig = RomConfig()) -> FrameSignals:
    """Per-frame violation severity across all angular DoFs.

    The per-frame severity blends the mean and the max of the per-DoF
    violation ratios so isolated extreme violations and broad mild ones
    both register.
    """
    angles = np.asarray(joint_angles, dtype=float)
    if angles.ndim != 2 or angles.shape[1] != skeleton.dof_count:
        raise SchemaError("joint angle matrix does not match skeleton DoF count")
    cols = skeleton.angular_dof_indices
    rows = limits.dof_arrays(skeleton)
    _, ratios = rom_violation(angles[:, cols], rows["rom_min"], rows["rom_max"], cfg.tol)
    m = cfg.cross_dof_mix * ratios.mean(axis=1) + (1.0 - cfg.cross_dof_mix) * ratios.max(axis=1)
    b = (m > cfg.flag_threshold).astype(np.int8)
    return FrameSignals(b=b, m=m)


def score_rom(signals: FrameSignals, valid,
              weights: AggregationWeights = AggregationWeights()) -> MetricScore:
    r, s, p = aggregate_rsp(signals, valid)
    return final_score(r, s, p, weights, metric_id="III")


def collision_signals_from_fractions(fractions, valid,
                                     cfg: CollisionConfig = CollisionConfig()
                                     ) -> tuple[FrameSignals, float]:
    """Severity ramp over per-frame colliding-face fractions.

    Severity ramps linearly between ``tau_mild`` and ``tau_severe``; a
    frame is abnormal whenever the ramp is nonzero.  ``severe_rate`` is
    the fraction of valid frames at or beyond ``tau_severe``.
    """
    fractions = np.asarray(fractions, dtype=float)
    m = np.clip((fractions - cfg.tau_mild) / (cfg.tau_severe - cfg.tau_mild), 0.0, 1.0)
    b = (m > 0.0).astype(np.int8)
    valid = np.asarray(valid, dtype=bool)
    n_valid = max(1, int(valid.sum()))
    severe_rate = float((fractions[valid] >= cfg.tau_severe).sum()) / n_valid
    return FrameSignals(b=b, m=m), severe_rate


def collision_signals(mesh_frames, valid, cfg: CollisionConfig = CollisionConfig()
                      ) -> tuple[FrameSignals, float]:
    """Per-frame collision severity plus the severe-collision rate."""
    mesh_frames = tuple(mesh_frames)
    if not mesh_frames:
        raise SchemaError("no mesh frames")
    shape0 = (mesh_frames[0].vertices.shape[0], mesh_frames[0].faces.shape[0])
    for mf in mesh_frames:
        if (mf.vertices.shape[0], mf.faces.shape[0]) != shape0:
            raise SchemaError("mesh topology differs across frames")
    fractions = np.array([
        colliding_faces(mf, cfg.min_pairs, cfg.min_fraction, cfg.leaf_size)[1]
        for mf in mesh_frames
    ])
    return collision_signals_from_fractions(fractions, valid, cfg)


def score_self_collision(signals: FrameSignals, severe_rate: float, valid,
                         weights: AggregationWeights) -> MetricScore:
    """Self-collision aggregation: D = a*severe_rate + b*s + g*p + delta."""
    r, s, p = aggregate_rsp(signals, valid)
    return final_score(r, s, p, weights, severe_rate=severe_rate, metric_id="IV")
