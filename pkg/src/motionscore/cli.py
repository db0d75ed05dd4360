"""Command-line entry point.

Subcommands: ``score`` (per-video records), ``leaderboard`` (CSV from a
record directory), ``synth`` (generate corrupted fixtures), ``sweep``
(tolerance / ternary robustness), ``correlate`` (win ratios + Spearman).
Exit codes: 0 success, 1 validation error, 2 I/O error, 64 usage error.
The HUMANSCORE_CONFIG environment variable supplies a default config file.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import json
import os
import sys
from pathlib import Path

from . import analysis
from .analysis import PairwiseComparison
from .bundle import parse_motion_bundle, write_motion_bundle
from .config import EngineConfig
from .engine import score_bundle, score_record
from .errors import ConfigError, MotionScoreError, ParseError
from .skeleton import LimitTable, SkeletonDefinition, default_limits, default_skeleton
from .synthetic import CorruptionSpec, generate_baseline, inject

CONFIG_ENV_VAR = "HUMANSCORE_CONFIG"

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_USAGE = 64


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="motionscore")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--skeleton", help="skeleton definition file")
        p.add_argument("--limits", help="limit table file")
        p.add_argument("--config", help="engine config file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE", help="config override")

    p = sub.add_parser("score", help="score motion bundles")
    p.add_argument("bundles", nargs="+", help="bundle files")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--model", default="unknown", help="model id for the records")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    common(p)

    p = sub.add_parser("leaderboard", help="aggregate score records")
    p.add_argument("score_dir", help="directory of per-video score records")
    p.add_argument("--out", required=True, help="output CSV")

    p = sub.add_parser("synth", help="generate a synthetic bundle")
    p.add_argument("--spec", required=True, help="generation spec file")
    p.add_argument("--out", required=True, help="output bundle file")
    common(p)

    p = sub.add_parser("sweep", help="robustness sweeps")
    p.add_argument("mode", choices=["tolerance", "ternary"])
    p.add_argument("corpus_dir", help="directory with one subdirectory per model")
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--scales", default="0.5,0.75,1.0,1.5,2.0",
                   help="comma-separated scale grid (tolerance mode)")
    p.add_argument("--step", type=float, default=0.1,
                   help="simplex step (ternary mode)")
    common(p)

    p = sub.add_parser("correlate", help="win ratios and Spearman correlation")
    p.add_argument("--scores", required=True,
                   help="leaderboard CSV or JSON {model: score}")
    p.add_argument("--preferences", required=True,
                   help="JSON list of pairwise comparisons")
    p.add_argument("--out", help="optional output JSON file")
    return parser


def _load_context(args):
    skeleton = SkeletonDefinition.from_file(args.skeleton) if args.skeleton \
        else default_skeleton()
    limits = LimitTable.from_file(args.limits) if args.limits else default_limits()
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = EngineConfig.from_file(config_path) if config_path else EngineConfig()
    config = config.with_overrides(args.overrides)
    return skeleton, limits, config


def _score_one(task):
    path, skeleton, limits, config, model_id = task
    bundle = parse_motion_bundle(path, skeleton)
    return score_record(score_bundle(bundle, skeleton, limits, config, model_id))


def _cmd_score(args) -> int:
    skeleton, limits, config = _load_context(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks = [(p, skeleton, limits, config, args.model)
             for p in sorted(args.bundles)]
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(_score_one, tasks))
    else:
        records = [_score_one(t) for t in tasks]
    for record in sorted(records, key=lambda r: r["video_id"]):
        target = out_dir / f"{record['video_id']}.json"
        with open(target, "w", encoding="utf-8") as fh:
            json.dump(record, fh, sort_keys=True, indent=2)
            fh.write("\n")
        print(f"{record['video_id']}: overall {record['overall']}")
    return EXIT_OK


def _cmd_leaderboard(args) -> int:
    per_video = {}
    paths = sorted(Path(args.score_dir).glob("*.json"))
    if not paths:
        raise MotionScoreError(f"no score records in {args.score_dir}")
    for path in paths:
        with open(path, "r", encoding="utf-8") as fh:
            record = json.load(fh)
        roman = {"I": "metric_I", "II": "metric_II", "III": "metric_III",
                 "IV": "metric_IV", "V": "metric_V", "VI": "metric_VI"}
        scores = {mid: record[key]["score"] for mid, key in roman.items()}
        per_video[(record["model_id"], record["video_id"])] = scores
    entries = analysis.build_leaderboard(per_video)
    analysis.write_leaderboard_csv(entries, args.out)
    for e in entries:
        print(f"{e.rank}. {e.model_id}: {e.overall:.1f}")
    return EXIT_OK


def _cmd_synth(args) -> int:
    skeleton, limits, config = _load_context(args)
    with open(args.spec, "r", encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{args.spec}: invalid JSON at line {exc.lineno}: "
                             f"{exc.msg}") from None
    bundle = generate_baseline(
        skeleton, limits,
        frame_count=int(spec.get("frames", 60)),
        fps=float(spec.get("fps", 30.0)),
        seed=int(spec.get("seed", 0)),
        difficulty=spec.get("difficulty", "medium"),
        intensity=spec.get("intensity", "gentle"),
    )
    if spec.get("video_id"):
        import dataclasses
        bundle = dataclasses.replace(bundle, video_id=spec["video_id"])
    for c in spec.get("corruptions", []):
        corruption = CorruptionSpec(
            kind=c["kind"], magnitude=float(c["magnitude"]),
            frames=tuple(c["frames"]), target=c.get("target"),
            seed=int(c.get("seed", 0)))
        bundle = inject(bundle, corruption, skeleton, limits,
                        rom_tol=config.rom.tol)
    write_motion_bundle(bundle, skeleton, args.out)
    print(f"wrote {args.out} ({bundle.frame_count} frames)")
    return EXIT_OK


def _load_corpus(corpus_dir, skeleton) -> dict:
    corpus = {}
    root = Path(corpus_dir)
    for model_dir in sorted(p for p in root.iterdir() if p.is_dir()):
        bundles = [parse_motion_bundle(p, skeleton)
                   for p in sorted(model_dir.glob("*.json"))]
        if bundles:
            corpus[model_dir.name] = bundles
    if not corpus:
        raise MotionScoreError(f"no model subdirectories with bundles in {corpus_dir}")
    return corpus


def _cmd_sweep(args) -> int:
    skeleton, limits, config = _load_context(args)
    corpus = _load_corpus(args.corpus_dir, skeleton)
    if args.mode == "tolerance":
        try:
            scales = [float(s) for s in args.scales.split(",") if s]
        except ValueError:
            raise ConfigError(f"bad scale grid '{args.scales}'") from None
        result = analysis.tolerance_sweep(corpus, scales, skeleton, limits, config)
        analysis.write_sweep_csv(result, ("scale",), args.out)
    else:
        result = analysis.ternary_sweep(corpus, args.step, skeleton, limits, config)
        analysis.write_sweep_csv(result, ("alpha", "beta", "gamma"), args.out)
    print(f"{len(result.points)} grid points, "
          f"{'stable' if result.rank_invariant else 'UNSTABLE'} ranking")
    return EXIT_OK


def _read_model_scores(path) -> dict:
    if str(path).endswith(".csv"):
        with open(path, "r", encoding="utf-8", newline="") as fh:
            return {row["model"]: float(row["overall"])
                    for row in csv.DictReader(fh)}
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return {m: float(v) for m, v in data.items()}


def _cmd_correlate(args) -> int:
    scores = _read_model_scores(args.scores)
    with open(args.preferences, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    comparisons = [
        PairwiseComparison(model_a=c["model_a"], model_b=c["model_b"],
                           prompt_id=str(c.get("prompt_id", "")),
                           outcome=c["outcome"])
        for c in raw
    ]
    ratios = analysis.win_ratios(comparisons)
    shared = sorted(set(scores) & set(ratios))
    if len(shared) < 2:
        raise MotionScoreError("need at least two models present in both inputs")
    rho = analysis.spearman_rho([scores[m] for m in shared],
                                [ratios[m] for m in shared])
    result = {"models": shared, "win_ratios": {m: ratios[m] for m in shared},
              "spearman_rho": rho}
    text = json.dumps(result, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return EXIT_OK


_COMMANDS = {
    "score": _cmd_score,
    "leaderboard": _cmd_leaderboard,
    "synth": _cmd_synth,
    "sweep": _cmd_sweep,
    "correlate": _cmd_correlate,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:   # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except MotionScoreError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
