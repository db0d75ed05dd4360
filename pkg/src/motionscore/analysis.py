"""Leaderboards, preference correlation, and robustness sweeps."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .aggregation import METRIC_IDS, AggregationWeights, dimension_and_overall
from .config import EngineConfig
from .engine import aggregate_video, evaluate_signals, round1
from .errors import (ConfigError, NoDataError, UndefinedCorrelationError,
                     ValidationError)

OUTCOMES = ("a_wins", "b_wins", "tie")


@dataclass(frozen=True)
class LeaderboardEntry:
    model_id: str
    metric_scores: dict        # metric id -> model-level score
    anatomy_avg: float
    kinematic_avg: float
    kinetic_avg: float
    overall: float
    rank: int


@dataclass(frozen=True)
class PairwiseComparison:
    model_a: str
    model_b: str
    prompt_id: str
    outcome: str

    def __post_init__(self):
        if self.model_a == self.model_b:
            raise ValidationError("a comparison needs two distinct models")
        if self.outcome not in OUTCOMES:
            raise ValidationError(f"outcome must be one of {OUTCOMES}")


def build_leaderboard(per_video_scores: dict) -> list[LeaderboardEntry]:
    """Rank models by the overall mean of their per-video metric scores.

    ``per_video_scores`` maps (model_id, video_id) to a mapping of metric
    ids "I".."VI" to scores.  Ties on overall break lexicographically by
    model id.
    """
    if not per_video_scores:
        raise NoDataError("no per-video scores")
    by_model: dict[str, list] = {}
    for (model_id, _video_id), scores in per_video_scores.items():
        by_model.setdefault(model_id, []).append(scores)

    rows = []
    for model_id in sorted(by_model):
        videos = by_model[model_id]
        means = {mid: float(np.mean([v[mid] for v in videos])) for mid in METRIC_IDS}
        anatomy, kinematic, kinetic, overall = dimension_and_overall(means)
        rows.append((model_id, means, anatomy, kinematic, kinetic, overall))

    rows.sort(key=lambda r: (-r[5], r[0]))
    return [
        LeaderboardEntry(model_id=r[0], metric_scores=r[1], anatomy_avg=r[2],
                         kinematic_avg=r[3], kinetic_avg=r[4], overall=r[5],
                         rank=i + 1)
        for i, r in enumerate(rows)
    ]


def win_ratios(comparisons) -> dict:
    """Pairwise points (1 / 0.5 / 0) divided by appearances, per model."""
    comparisons = list(comparisons)
    if not comparisons:
        raise NoDataError("no comparisons")
    points: dict[str, float] = {}
    appearances: dict[str, int] = {}
    for c in comparisons:
        for model in (c.model_a, c.model_b):
            appearances[model] = appearances.get(model, 0) + 1
            points.setdefault(model, 0.0)
        if c.outcome == "a_wins":
            points[c.model_a] += 1.0
        elif c.outcome == "b_wins":
            points[c.model_b] += 1.0
        else:
            points[c.model_a] += 0.5
            points[c.model_b] += 0.5
    return {m: points[m] / appearances[m] for m in sorted(points)}


def _average_ranks(x: np.ndarray) -> np.ndarray:
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x))
    sorted_x = x[order]
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and sorted_x[j + 1] == sorted_x[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman_rho(x, y) -> float:
    """Spearman rank correlation with average ranks for ties."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("inputs must be equal-length vectors")
    if len(x) < 2:
        raise ValidationError("need at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise UndefinedCorrelationError("correlation undefined for a constant vector")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    return float((rx * ry).sum() / np.sqrt((rx**2).sum() * (ry**2).sum()))


# ---------------------------------------------------------------------------
# robustness sweeps

@dataclass(frozen=True)
class SweepPoint:
    setting: tuple              # (scale,) or (alpha, beta, gamma)
    ranking: tuple[str, ...]    # model ids, best first
    overall: dict               # model id -> overall score


@dataclass(frozen=True)
class SweepResult:
    points: tuple[SweepPoint, ...]
    rank_invariant: bool

    @property
    def distinct_rankings(self) -> int:
        return len({p.ranking for p in self.points})


def _score_corpus(corpus: dict, skeleton, limits, config: EngineConfig) -> dict:
    per_video = {}
    for model_id, bundles in corpus.items():
        for bundle in bundles:
            score = aggregate_video(
                evaluate_signals(bundle, skeleton, limits, config),
                config, model_id)
            per_video[(model_id, bundle.video_id)] = {
                mid: score.metrics[mid].score for mid in METRIC_IDS}
    return per_video


def _ranking(per_video: dict) -> tuple[tuple[str, ...], dict]:
    entries = build_leaderboard(per_video)
    return (tuple(e.model_id for e in entries),
            {e.model_id: e.overall for e in entries})


def tolerance_sweep(corpus: dict, scale_grid, skeleton, limits,
                    config: EngineConfig = EngineConfig()) -> SweepResult:
    """Re-score the corpus under rescaled tolerances and track rankings.

    ``corpus`` maps model ids to lists of motion bundles.  Each scale
    multiplies the ROM tolerance, the severity ramps, the bone-length
    tolerance, and every limit-table magnitude (ROM intervals widen about
    their centers).
    """
    if len(corpus) < 2:
        raise NoDataError("tolerance sweep needs at least 2 models")
    points = []
    for scale in scale_grid:
        if scale <= 0:
            raise ConfigError("tolerance scale must be positive")
        ranking, overall = _ranking(_score_corpus(
            corpus, skeleton, limits.scaled(scale), config.scaled(scale)))
        points.append(SweepPoint(setting=(scale,), ranking=ranking, overall=overall))
    invariant = len({p.ranking for p in points}) == 1
    return SweepResult(points=tuple(points), rank_invariant=invariant)


def simplex_grid(step: float) -> list[tuple[float, float, float]]:
    """All (alpha, beta, gamma) on the unit simplex with the given step."""
    n = round(1.0 / step)
    if not 0.0 < step <= 1.0 or abs(n * step - 1.0) > 1e-9:
        raise ConfigError("simplex step must divide 1")
    out = []
    for i in range(n + 1):
        for j in range(n - i + 1):
            k = n - i - j
            out.append((i / n, j / n, k / n))
    return out


def ternary_sweep(corpus: dict, simplex_step: float, skeleton, limits,
                  config: EngineConfig = EngineConfig()) -> SweepResult:
    """Re-aggregate the corpus at every (alpha, beta, gamma) grid point.

    The per-frame stage runs once per video; each grid point only remixes
    the stored (r, s, p) summaries.  The collision metric keeps its
    constant offset, renormalized alongside the swept triple.
    """
    signals = {
        model_id: [evaluate_signals(b, skeleton, limits, config) for b in bundles]
        for model_id, bundles in corpus.items()
    }
    delta = config.collision_weights.delta
    points = []
    for alpha, beta, gamma in simplex_grid(simplex_step):
        weights = AggregationWeights(alpha=alpha, beta=beta, gamma=gamma)
        if delta is None:
            collision_weights = weights
        else:
            total = alpha + beta + gamma + delta
            collision_weights = AggregationWeights(
                alpha=alpha / total, beta=beta / total, gamma=gamma / total,
                delta=delta / total)
        cfg = config.with_weights(weights, collision_weights)
        per_video = {}
        for model_id, sigs in signals.items():
            for sig in sigs:
                score = aggregate_video(sig, cfg, model_id)
                per_video[(model_id, sig.video_id)] = {
                    mid: score.metrics[mid].score for mid in METRIC_IDS}
        ranking, overall = _ranking(per_video)
        points.append(SweepPoint(setting=(alpha, beta, gamma),
                                 ranking=ranking, overall=overall))
    invariant = len({p.ranking for p in points}) == 1
    return SweepResult(points=tuple(points), rank_invariant=invariant)


def difficulty_breakdown(per_video_scores) -> dict:
    """Per-model mean overall score grouped by difficulty label.

    ``per_video_scores`` is an iterable of (model_id, difficulty, overall)
    triples; empty difficulty buckets simply do not appear.
    """
    sums: dict[str, dict[str, list]] = {}
    for model_id, difficulty, overall in per_video_scores:
        if difficulty is None:
            raise ValidationError("missing difficulty label")
        sums.setdefault(model_id, {}).setdefault(difficulty, []).append(float(overall))
    return {
        model: {diff: float(np.mean(vals)) for diff, vals in sorted(buckets.items())}
        for model, buckets in sorted(sums.items())
    }


# ---------------------------------------------------------------------------
# CSV emission

LEADERBOARD_COLUMNS = ("model", "I", "II", "III", "IV", "V", "VI",
                       "anatomy", "kinematic", "kinetic", "overall", "rank")


def write_leaderboard_csv(entries, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(LEADERBOARD_COLUMNS)
        for e in entries:
            writer.writerow([
                e.model_id,
                *(round1(e.metric_scores[mid]) for mid in METRIC_IDS),
                round1(e.anatomy_avg), round1(e.kinematic_avg),
                round1(e.kinetic_avg), round1(e.overall), e.rank,
            ])


def write_sweep_csv(result: SweepResult, setting_names, path) -> None:
    """One row per (grid point, model)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([*setting_names, "model", "overall", "rank"])
        for point in result.points:
            for rank, model in enumerate(point.ranking, start=1):
                writer.writerow([*point.setting, model,
                                 round1(point.overall[model]), rank])
