"""Video-level aggregation shared by all metrics.

Per-frame signals are a binary abnormality flag ``b_t`` and a severity
``m_t`` in [0, 1].  Over the valid frames these aggregate to frequency
``r`` (abnormal-frame rate), severity ``s`` (mean severity of abnormal
frames), and persistence ``p`` (longest abnormal run as a fraction), which
a weighted sum maps to a 0-100 score:

    D = alpha * r + beta * s + gamma * p
    score = 100 * (1 - clip(D, 0, 1))

The self-collision metric uses the variant
``D = alpha * severe_rate + beta * s + gamma * p + delta``, with the
constant offset applied only when at least one abnormal frame exists
(otherwise a collision-free video could not reach 100).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NoDataError, ValidationError

METRIC_IDS = ("I", "II", "III", "IV", "V", "VI")

_WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class FrameSignals:
    """Per-frame abnormality flags and severities for one metric."""

    b: np.ndarray
    m: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.b, dtype=np.int8)
        m = np.asarray(self.m, dtype=float)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "m", m)
        if b.shape != m.shape or b.ndim != 1:
            raise ValidationError("signal arrays must be equal-length vectors")
        if not np.isin(b, (0, 1)).all():
            raise ValidationError("b values must be 0 or 1")
        if m.size and (m.min() < 0.0 or m.max() > 1.0):
            raise ValidationError("m values must lie in [0, 1]")

    @property
    def frame_count(self) -> int:
        return self.b.shape[0]


@dataclass(frozen=True)
class AggregationWeights:
    """Simplex weights for (r, s, p), plus the optional collision offset."""

    alpha: float = 0.5
    beta: float = 0.3
    gamma: float = 0.2
    delta: float | None = None

    def __post_init__(self):
        parts = [self.alpha, self.beta, self.gamma]
        if self.delta is not None:
            parts.append(self.delta)
        if any(w < 0 for w in parts):
            raise ConfigError("aggregation weights must be nonnegative")
        if abs(sum(parts) - 1.0) > _WEIGHT_TOL:
            raise ConfigError("aggregation weights must sum to 1")


@dataclass(frozen=True)
class MetricScore:
    """(r, s, p, D, score) for one metric on one video."""

    metric_id: str
    r: float
    s: float
    p: float
    D: float
    score: float

    def __post_init__(self):
        if self.metric_id not in METRIC_IDS:
            raise ValidationError(f"unknown metric id '{self.metric_id}'")
        expected = 100.0 * (1.0 - min(max(self.D, 0.0), 1.0))
        if abs(self.score - expected) > 1e-9:
            raise ValidationError("score must equal 100 * (1 - clip(D, 0, 1))")


def longest_abnormal_run(b, valid) -> int:
    """Length of the longest run of consecutive abnormal frames.

    Invalid frames terminate a run and do not count toward it.
    """
    b = np.asarray(b)
    valid = np.asarray(valid, dtype=bool)
    if b.shape != valid.shape:
        raise ValidationError("flag and valid mask lengths differ")
    best = run = 0
    for flag, ok in zip(b, valid):
        if ok and flag:
            run += 1
            best = max(best, run)
        else:
            run = 0
    return best


def aggregate_rsp(signals: FrameSignals, valid) -> tuple[float, float, float]:
    """(r, s, p) over the valid frames only."""
    valid = np.asarray(valid, dtype=bool)
    if valid.shape != signals.b.shape:
        raise ValidationError("valid mask length differs from signals")
    n_valid = int(valid.sum())
    if n_valid == 0:
        raise NoDataError("no valid frames to aggregate")
    b = signals.b[valid]
    m = signals.m[valid]
    n_abnormal = int(b.sum())
    r = n_abnormal / n_valid
    # literal formula; clipped so severity stays in [0, 1] even when many
    # sub-threshold frames carry small m with no abnormal frame at all
    s = min(float(m.sum()) / max(1, n_abnormal), 1.0)
    p = longest_abnormal_run(signals.b, valid) / n_valid
    return r, s, p


def final_score(r: float, s: float, p: float, weights: AggregationWeights,
                severe_rate: float | None = None, metric_id: str = "I") -> MetricScore:
    """Map (r, s, p) to a MetricScore under the given weights.

    Pass ``severe_rate`` (and delta-carrying weights) for the
    self-collision form; omit both for the standard form.
    """
    for name, value in (("r", r), ("s", s), ("p", p)):
        if not 0.0 <= value <= 1.0:
            raise ConfigError(f"{name} must lie in [0, 1]")
    if (severe_rate is None) != (weights.delta is None):
        raise ConfigError("severe_rate must be supplied iff weights carry delta")
    if severe_rate is None:
        D = weights.alpha * r + weights.beta * s + weights.gamma * p
    else:
        if not 0.0 <= severe_rate <= 1.0:
            raise ConfigError("severe_rate must lie in [0, 1]")
        D = weights.alpha * severe_rate + weights.beta * s + weights.gamma * p
        if r > 0.0 or s > 0.0 or p > 0.0:
            D += weights.delta
    score = 100.0 * (1.0 - min(max(D, 0.0), 1.0))
    return MetricScore(metric_id=metric_id, r=r, s=s, p=p, D=D, score=score)


def dimension_and_overall(six_scores) -> tuple[float, float, float, float]:
    """Dimension averages and the overall mean from six metric scores.

    ``six_scores`` maps metric ids "I".."VI" to numeric scores or to
    MetricScore records.
    """
    values = {}
    for mid in METRIC_IDS:
        if mid not in six_scores:
            raise NoDataError(f"missing metric '{mid}'")
        v = six_scores[mid]
        values[mid] = v.score if isinstance(v, MetricScore) else float(v)
    anatomy = 0.5 * (values["I"] + values["II"])
    kinematic = 0.5 * (values["III"] + values["IV"])
    kinetic = 0.5 * (values["V"] + values["VI"])
    overall = (anatomy + kinematic + kinetic) / 3.0
    return anatomy, kinematic, kinetic, overall
