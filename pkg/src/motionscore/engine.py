"""Full six-metric evaluation of one motion bundle.

``evaluate_signals`` runs the per-frame stage once; ``aggregate_video``
turns the cached summaries into scores under a weight configuration, so
weight sweeps re-aggregate without touching the frame data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .aggregation import (AggregationWeights, MetricScore, aggregate_rsp,
                          dimension_and_overall, final_score)
from .anatomy_metrics import bone_length_errors, extra_limb_signals, score_bone_length
from .bundle import MotionBundle
from .config import EngineConfig
from .errors import NoDataError
from .kinematic_metrics import collision_signals, rom_signals
from .kinetic_metrics import extremes_signals, smoothness_signals
from .skeleton import LimitTable, SkeletonDefinition


@dataclass(frozen=True)
class VideoSignals:
    """Aggregation-ready summaries of the per-frame stage for one video."""

    video_id: str
    difficulty: str
    intensity: str
    rsp: dict                  # metric id -> (r, s, p) for I, III, IV, V, VI
    severe_rate: float         # collision severe-frame rate
    bone_mean_error: float     # mean relative bone-length deviation


@dataclass(frozen=True)
class VideoScore:
    video_id: str
    model_id: str
    difficulty: str
    intensity: str
    metrics: dict              # metric id -> MetricScore
    anatomy_avg: float
    kinematic_avg: float
    kinetic_avg: float
    overall: float


def evaluate_signals(bundle: MotionBundle, skeleton: SkeletonDefinition,
                     limits: LimitTable, config: EngineConfig = EngineConfig()
                     ) -> VideoSignals:
    valid = bundle.valid
    rsp = {}

    limb = extra_limb_signals(bundle.detections, bundle.frame_count, config.extra_limb)
    rsp["I"] = aggregate_rsp(limb, valid)

    errors = bone_length_errors(bundle.keypoints, skeleton.bones, valid,
                                config.bone_length)
    bone_mean_error = sum(errors.values()) / len(errors)

    rom = rom_signals(bundle.joint_angles, limits, skeleton, config.rom)
    rsp["III"] = aggregate_rsp(rom, valid)

    if bundle.mesh_frames is None:
        raise NoDataError("bundle carries no mesh frames; self-collision "
                          "metric cannot be computed")
    collision, severe_rate = collision_signals(bundle.mesh_frames, valid,
                                               config.collision)
    rsp["IV"] = aggregate_rsp(collision, valid)

    extremes = extremes_signals(bundle, skeleton, limits, config.extremes)
    rsp["V"] = aggregate_rsp(extremes, valid)

    smooth = smoothness_signals(bundle, skeleton, limits, config.smoothness)
    rsp["VI"] = aggregate_rsp(smooth, valid)

    return VideoSignals(video_id=bundle.video_id, difficulty=bundle.difficulty,
                        intensity=bundle.intensity, rsp=rsp,
                        severe_rate=severe_rate, bone_mean_error=bone_mean_error)


def aggregate_video(signals: VideoSignals, config: EngineConfig = EngineConfig(),
                    model_id: str = "unknown") -> VideoScore:
    metrics: dict[str, MetricScore] = {}
    for mid in ("I", "III", "V", "VI"):
        r, s, p = signals.rsp[mid]
        metrics[mid] = final_score(r, s, p, config.weights, metric_id=mid)
    metrics["II"] = score_bone_length({"all": signals.bone_mean_error},
                                      config.bone_length.tolerance)
    r, s, p = signals.rsp["IV"]
    metrics["IV"] = final_score(r, s, p, config.collision_weights,
                                severe_rate=signals.severe_rate, metric_id="IV")
    anatomy, kinematic, kinetic, overall = dimension_and_overall(metrics)
    return VideoScore(video_id=signals.video_id, model_id=model_id,
                      difficulty=signals.difficulty, intensity=signals.intensity,
                      metrics=metrics, anatomy_avg=anatomy,
                      kinematic_avg=kinematic, kinetic_avg=kinetic,
                      overall=overall)


def score_bundle(bundle: MotionBundle, skeleton: SkeletonDefinition,
                 limits: LimitTable, config: EngineConfig = EngineConfig(),
                 model_id: str = "unknown") -> VideoScore:
    """Evaluate and aggregate all six metrics for one bundle."""
    return aggregate_video(evaluate_signals(bundle, skeleton, limits, config),
                           config, model_id)


def round1(x: float) -> float:
    """Round half away from zero to one decimal (reporting convention)."""
    return math.floor(x * 10.0 + 0.5) / 10.0 if x >= 0 else -round1(-x)


def score_record(score: VideoScore) -> dict:
    """The per-video JSON record written by the command-line scorer.

    Reported scores are rounded to one decimal; r/s/p/D keep full
    precision so the aggregation stays reproducible from the record.
    """
    record = {"video_id": score.video_id, "model_id": score.model_id}
    roman = {"I": "metric_I", "II": "metric_II", "III": "metric_III",
             "IV": "metric_IV", "V": "metric_V", "VI": "metric_VI"}
    for mid, key in roman.items():
        m = score.metrics[mid]
        record[key] = {"r": m.r, "s": m.s, "p": m.p, "D": m.D,
                       "score": round1(m.score)}
    record["anatomy_avg"] = round1(score.anatomy_avg)
    record["kinematic_avg"] = round1(score.kinematic_avg)
    record["kinetic_avg"] = round1(score.kinetic_avg)
    record["overall"] = round1(score.overall)
    return record
