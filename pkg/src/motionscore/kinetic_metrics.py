"""Kinetic metrics: velocity extremes (V) and motion smoothness (VI)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aggregation import AggregationWeights, FrameSignals, MetricScore, aggregate_rsp, final_score
from .bundle import MotionBundle
from .errors import ConfigError, InsufficientDataError
from .kinematics import central_difference, segment_com_velocities
from .skeleton import LimitTable, SkeletonDefinition


@dataclass(frozen=True)
class ExtremesConfig:
    flag_threshold: float = 0.05
    excess_norm: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.flag_threshold < 1.0:
            raise ConfigError("flag threshold must lie in (0, 1)")
        if self.excess_norm <= 0:
            raise ConfigError("excess normalization factor must be positive")


@dataclass(frozen=True)
class SmoothnessConfig:
    jerk_window: int = 5
    flag_threshold: float = 0.05
    excess_norm: float = 0.5

    def __post_init__(self):
        if self.jerk_window < 3 or self.jerk_window % 2 == 0:
            raise ConfigError("jerk window must be odd and >= 3")
        if not 0.0 < self.flag_threshold < 1.0:
            raise ConfigError("flag threshold must lie in (0, 1)")
        if self.excess_norm <= 0:
            raise ConfigError("excess normalization factor must be positive")


def excess_ratio(value, limit, norm: float = 0.5):
    """How far a magnitude exceeds its limit, on a clamped [0, 1] ramp.

    Zero at or below the limit, 1 at or beyond (1 + norm) * limit.
    Broadcasts over arrays.
    """
    limit = np.asarray(limit, dtype=float)
    if (limit <= 0).any():
        raise ConfigError("limits must be positive")
    raw = np.maximum(0.0, np.asarray(value, dtype=float) / limit - 1.0) / norm
    return np.minimum(raw, 1.0)


def _weighted_mean(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return (values * weights).sum(axis=1) / weights.sum()


def extremes_signals(bundle: MotionBundle, skeleton: SkeletonDefinition,
                     limits: LimitTable,
                     cfg: ExtremesConfig = ExtremesConfig()) -> FrameSignals:
    """Severity from angular-velocity and segment-speed limit excesses.

    Per frame, the DoF-weighted mean excess of |angular velocity| and the
    segment-weighted mean excess of COM speed average into the severity.
    """
    dof = limits.dof_arrays(skeleton)
    seg = limits.segment_arrays(skeleton)
    cols = skeleton.angular_dof_indices
    omega = central_difference(bundle.joint_angles[:, cols], bundle.dt)
    joint_excess = excess_ratio(np.abs(omega), dof["angular_velocity_max"], cfg.excess_norm)
    m_joint = _weighted_mean(joint_excess, dof["weight"])

    speeds = segment_com_velocities(bundle, skeleton)
    body_excess = excess_ratio(speeds, seg["linear_velocity_max"], cfg.excess_norm)
    m_body = _weighted_mean(body_excess, seg["weight"])

    m = 0.5 * (m_joint + m_body)
    b = (m > cfg.flag_threshold).astype(np.int8)
    return FrameSignals(b=b, m=m)


def score_extremes(signals: FrameSignals, valid,
                   weights: AggregationWeights = AggregationWeights()) -> MetricScore:
    r, s, p = aggregate_rsp(signals, valid)
    return final_score(r, s, p, weights, metric_id="V")


def jerk_energy(angular_velocity, dt: float, window: int = 5) -> np.ndarray:
    """Windowed squared-jerk energy per frame (and per DoF column).

    Acceleration and jerk come from repeated central differences; the sum
    runs over a centered window of ``window`` frames, truncated at the
    sequence ends.
    """
    if window < 3 or window % 2 == 0:
        raise ConfigError("jerk window must be odd and >= 3")
    omega = np.asarray(angular_velocity, dtype=float)
    squeeze = omega.ndim == 1
    if squeeze:
        omega = omega[:, None]
    if omega.shape[0] < window:
        raise InsufficientDataError("series shorter than the jerk window")
    accel = central_difference(omega, dt)
    jerk = central_difference(accel, dt)
    kernel = np.ones(window)
    energy = np.empty_like(jerk)
    for d in range(jerk.shape[1]):
        energy[:, d] = np.convolve(jerk[:, d] ** 2, kernel, mode="same")
    return energy[:, 0] if squeeze else energy


def smoothness_signals(bundle: MotionBundle, skeleton: SkeletonDefinition,
                       limits: LimitTable,
                       cfg: SmoothnessConfig = SmoothnessConfig()) -> FrameSignals:
    """Severity from angular-acceleration and jerk-energy limit excesses."""
    dof = limits.dof_arrays(skeleton)
    cols = skeleton.angular_dof_indices
    omega = central_difference(bundle.joint_angles[:, cols], bundle.dt)
    accel = central_difference(omega, bundle.dt)
    accel_excess = excess_ratio(np.abs(accel), dof["angular_acceleration_max"],
                                cfg.excess_norm)
    energy = jerk_energy(omega, bundle.dt, cfg.jerk_window)
    jerk_excess = excess_ratio(energy, dof["jerk_energy_max"], cfg.excess_norm)

    m = _weighted_mean(0.5 * (accel_excess + jerk_excess), dof["weight"])
    b = (m > cfg.flag_threshold).astype(np.int8)
    return FrameSignals(b=b, m=m)


def score_smoothness(signals: FrameSignals, valid,
                     weights: AggregationWeights = AggregationWeights()) -> MetricScore:
    r, s, p = aggregate_rsp(signals, valid)
    return final_score(r, s, p, weights, metric_id="VI")
