"""Anatomy metrics: duplicate-limb detections (I) and bone-length stability (II)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aggregation import AggregationWeights, FrameSignals, MetricScore, aggregate_rsp, final_score
from .errors import ConfigError, NoDataError, SchemaError, ValidationError
from .skeleton import SkeletonDefinition


@dataclass(frozen=True)
class ExtraLimbConfig:
    tau_mild: float = 0.005
    tau_severe: float = 0.03

    def __post_init__(self):
        if not 0.0 <= self.tau_mild < self.tau_severe:
            raise ConfigError("need 0 <= tau_mild < tau_severe")


@dataclass(frozen=True)
class BoneLengthConfig:
    tolerance: float = 0.15
    min_valid_frames: int = 5
    epsilon: float = 1e-8

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ConfigError("bone-length tolerance must be positive")
        if self.min_valid_frames < 1:
            raise ConfigError("min_valid_frames must be >= 1")


def extra_limb_signals(detections, frame_count: int,
                       cfg: ExtraLimbConfig = ExtraLimbConfig()) -> FrameSignals:
    """Frame signals from per-class duplicate-limb confidences.

    ``detections`` is (T, n_classes) or None; a frame with no detections
    contributes a peak confidence of 0.  A frame is abnormal once the peak
    confidence exceeds ``tau_mild``; severity ramps linearly from 0 at
    ``tau_mild`` to 1 at ``tau_severe``.
    """
    if detections is None:
        peak = np.zeros(frame_count)
    else:
        detections = np.asarray(detections, dtype=float)
        if detections.shape[0] != frame_count:
            raise SchemaError("detections length differs from frame count")
        if detections.min() < 0.0 or detections.max() > 1.0:
            raise ValidationError("confidence out of range [0, 1]")
        peak = detections.max(axis=1) if detections.ndim == 2 else detections
    b = (peak > cfg.tau_mild).astype(np.int8)
    m = np.clip((peak - cfg.tau_mild) / (cfg.tau_severe - cfg.tau_mild), 0.0, 1.0)
    m[b == 0] = 0.0
    return FrameSignals(b=b, m=m)


def score_extra_limbs(signals: FrameSignals, valid,
                      weights: AggregationWeights = AggregationWeights()) -> MetricScore:
    r, s, p = aggregate_rsp(signals, valid)
    return final_score(r, s, p, weights, metric_id="I")


def _lower_median(values: np.ndarray) -> float:
    """Deterministic median: the lower of the two middle order statistics."""
    v = np.sort(values)
    return float(v[(len(v) - 1) // 2])


def bone_length_errors(keypoints, bones, valid,
                       cfg: BoneLengthConfig = BoneLengthConfig()) -> dict:
    """Mean relative deviation from the median length, per bone.

    Bones with fewer than ``min_valid_frames`` valid frames are excluded;
    raises NoDataError when every bone is excluded.
    """
    keypoints = np.asarray(keypoints, dtype=float)
    valid = np.asarray(valid, dtype=bool)
    if keypoints.shape[0] != valid.shape[0]:
        raise ValidationError("keypoints and valid mask length differ")
    out = {}
    for bone in bones:
        i, j = bone.keypoints
        lengths = np.linalg.norm(
            keypoints[valid, i, :] - keypoints[valid, j, :], axis=1
        )
        if lengths.shape[0] < cfg.min_valid_frames:
            continue
        ref = _lower_median(lengths)
        errors = np.abs(lengths - ref) / (ref + cfg.epsilon)
        out[bone.name] = float(errors.mean())
    if not out:
        raise NoDataError("every bone excluded (too few valid frames)")
    return out


def score_bone_length(errors: dict, tolerance: float = 0.15) -> MetricScore:
    """Direct-formula score: 100 * (1 - clip(mean_error / tolerance, 0, 1)).

    This metric has no frame signals, so the stored (r, s, p) are zero.
    """
    if tolerance <= 0:
        raise ConfigError("bone-length tolerance must be positive")
    if not errors:
        raise NoDataError("no bone errors to score")
    mean_error = float(np.mean(list(errors.values())))
    D = min(max(mean_error / tolerance, 0.0), 1.0)
    return MetricScore(metric_id="II", r=0.0, s=0.0, p=0.0, D=D,
                       score=100.0 * (1.0 - D))


def default_bones(skeleton: SkeletonDefinition):
    """The skeleton's configured bone set (limb spans plus torso cross-checks)."""
    return skeleton.bones
