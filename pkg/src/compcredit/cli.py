"""Command-line entry point: score, advantage, simulate, verify-theorem, cluster."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from compcredit import formats
from compcredit.advantage import InvalidGroupError, AlignmentError, hrr_reshape, surrogate_objective
from compcredit.config import ConfigError, RunConfig, load_config
from compcredit.granularity import (
    ConfigurationError,
    InvalidKError,
    kmeans_1d,
    utility_spec_from_dict,
    verify_utility_theorem,
)
from compcredit.scoring import score_composite
from compcredit.sim import Corpus, EpisodeSettings, SimConfigurationError, behavior_stats, run_group
from compcredit.text import load_stopwords

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INCONCLUSIVE = 2


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _open_out(args, default_name: str):
    """--output wins; then --output-dir/<default_name>; else stdout."""
    if args.output:
        path = Path(args.output)
    elif args.output_dir:
        path = Path(args.output_dir) / default_name
    else:
        return sys.stdout
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, "w", encoding="utf-8", newline="")


def _config(args, **extra) -> RunConfig:
    return load_config(args.config, seed=args.seed, jobs=args.jobs, **extra)


# -- score -------------------------------------------------------------------


def cmd_score(args) -> int:
    cfg = _config(args)
    stopwords = load_stopwords(cfg.stopwords_path)
    rows, failed = [], False
    try:
        for lineno, obj in formats.read_jsonl(args.input):
            try:
                record = formats.record_from_dict(obj, cfg.level_table, where=f"line {lineno}")
            except formats.SchemaError as exc:
                _err(str(exc))
                failed = True
                continue
            rows.append(formats.score_row(formats.input_hash(obj), score_composite(record, cfg.weights, stopwords)))
    except formats.SchemaError as exc:
        _err(str(exc))
        failed = True
    out = _open_out(args, "scores.jsonl")
    try:
        for row in rows:
            out.write(formats.dumps(row) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_INPUT if failed else EXIT_OK


# -- advantage ---------------------------------------------------------------


def cmd_advantage(args) -> int:
    cfg = _config(args, w=args.w)
    batch = None
    if args.token_batch:
        batch = formats.token_batch_from_rows(formats.read_jsonl(args.token_batch))
    results = []
    for lineno, obj in formats.read_jsonl(args.input):
        group = formats.group_from_dict(obj, where=f"line {lineno}")
        try:
            report = hrr_reshape(group, cfg.w, cfg.epsilon_std)
        except InvalidGroupError as exc:
            raise formats.SchemaError(f"line {lineno}: invalid group: {exc}") from None
        row = formats.report_to_dict(report, group)
        if batch is not None:
            row["objective"] = formats.r9(surrogate_objective(batch, report, cfg.clip_epsilon, cfg.beta_kl))
        results.append(row)
    out = _open_out(args, "advantages.jsonl")
    try:
        for row in results:
            out.write(formats.dumps(row) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# -- simulate ----------------------------------------------------------------


def _simulate_query(job):
    corpus, query_id, policies, seed, settings = job
    return run_group(corpus, query_id, policies, master_seed=seed, settings=settings)


def simulate(cfg: RunConfig):
    """Run one group per query; returns (groups, reports, stats)."""
    corpus = Corpus.load(cfg.corpus_path)
    settings = EpisodeSettings(
        max_turns=cfg.max_turns,
        top_k=cfg.top_k,
        noise_fraction=cfg.noise_fraction,
        strict=cfg.strict,
        level_table=cfg.level_table,
        weights=cfg.weights,
        stopwords=load_stopwords(cfg.stopwords_path),
    )
    query_ids = list(cfg.query_ids) if cfg.query_ids else [qa.query_id for qa in corpus.qa_items]
    jobs = [(corpus, q, cfg.rollout_policies, cfg.seed, settings) for q in query_ids]
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            groups = list(pool.map(_simulate_query, jobs))
    else:
        groups = [_simulate_query(j) for j in jobs]
    reports = [hrr_reshape(g, cfg.w, cfg.epsilon_std) for g in groups]

    all_trajs = [t for g in groups for t in g.trajectories]
    stats = {"overall": behavior_stats(all_trajs).__dict__}
    by_policy = {}
    policies = cfg.rollout_policies
    for name in sorted(set(policies)):
        trajs = [g.trajectories[i] for g in groups for i, p in enumerate(policies) if p == name]
        by_policy[name] = behavior_stats(trajs).__dict__
    stats["by_policy"] = by_policy
    stats["mean_reward"] = sum(t.final_reward for t in all_trajs) / len(all_trajs)
    stats = json.loads(json.dumps(stats), parse_float=lambda s: formats.r9(float(s)))
    return groups, reports, stats


def cmd_simulate(args) -> int:
    policies = tuple(args.policies.split(",")) if args.policies else None
    group_size = args.group_size
    if group_size is None and policies and len(policies) > 1:
        group_size = len(policies)
    cfg = _config(
        args,
        noise_fraction=args.noise,
        group_size=group_size,
        policies=policies,
        w=args.w,
        output_dir=Path(args.output_dir) if args.output_dir else None,
    )
    groups, reports, stats = simulate(cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    formats.write_jsonl(out / "trajectories.jsonl", (formats.group_to_dict(g) for g in groups))
    formats.write_jsonl(out / "advantages.jsonl", (formats.report_to_dict(r, g) for r, g in zip(reports, groups)))
    (out / "stats.json").write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(groups)} groups to {out}", file=sys.stderr)
    return EXIT_OK


# -- verify-theorem ----------------------------------------------------------


def cmd_verify_theorem(args) -> int:
    try:
        data = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise formats.SchemaError(f"cannot read spec {args.spec}: {exc}") from None
    try:
        spec = utility_spec_from_dict(data)
    except (KeyError, TypeError) as exc:
        raise formats.SchemaError(f"spec {args.spec}: missing or malformed field {exc}") from None
    seed = args.seed if args.seed is not None else int(data.get("seed", 0))
    report = verify_utility_theorem(spec, samples=args.samples, seed=seed)
    out = _open_out(args, "theorem.json")
    payload = {k: (formats.r9(v) if isinstance(v, float) else v) for k, v in report.as_dict().items()}
    try:
        out.write(json.dumps(payload, indent=2) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if not report.conclusive or not report.gap > 0:
        failed = [k for k, ok in report.condition_checks.items() if not ok]
        print(f"inconclusive: failed conditions {failed}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    return EXIT_OK


# -- cluster -----------------------------------------------------------------


def read_points(path) -> list[float]:
    points = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            points.append(float(line))
        except ValueError:
            raise formats.SchemaError(f"line {lineno}: not a number: {line!r}") from None
    return points


def cluster_table(points, k_min: int, k_max: int, restarts=None, seed: int = 0) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "db_index", "inertia", "centroids"])
    for k in range(k_min, k_max + 1):
        rep = kmeans_1d(points, k, restarts=restarts, seed=seed)
        writer.writerow(
            [k, f"{rep.db_index:.9f}", f"{rep.inertia:.9f}", ";".join(f"{c:.9f}" for c in rep.centroids)]
        )
    return buf.getvalue()


def cmd_cluster(args) -> int:
    if args.k_min > args.k_max:
        raise UsageError("--k-min must not exceed --k-max")
    points = read_points(args.points)
    table = cluster_table(points, args.k_min, args.k_max, args.restarts, args.seed or 0)
    out = _open_out(args, "db_index.csv")
    try:
        out.write(table)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--jobs", type=int, default=None, help="parallel workers for independent groups")
    common.add_argument("--output-dir", default=None)
    common.add_argument("--output", "-o", default=None, help="output file (overrides --output-dir)")

    parser = argparse.ArgumentParser(prog="compcredit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", parents=[common], help="score compression records")
    p.add_argument("input", help="JSON-lines records {query, original, compressed, level}")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("advantage", parents=[common], help="GRPO + turn-level reshaped advantages")
    p.add_argument("input", help="JSON-lines trajectory groups")
    p.add_argument("--w", type=float, default=None, help="reshaping weight; 0 is plain GRPO mode")
    p.add_argument("--token-batch", default=None, help="JSON-lines token log-probs; adds the surrogate objective")
    p.set_defaults(func=cmd_advantage)

    p = sub.add_parser("simulate", parents=[common], help="run scripted rollouts on the corpus")
    p.add_argument("--noise", type=float, default=None, help="distractor replacement probability")
    p.add_argument("--policies", default=None, help="comma-separated policy names")
    p.add_argument("--group-size", type=int, default=None)
    p.add_argument("--w", type=float, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-theorem", parents=[common], help="adaptive vs uniform allocation utility")
    p.add_argument("spec", help="JSON utility spec")
    p.add_argument("--samples", type=int, default=100_000)
    p.set_defaults(func=cmd_verify_theorem)

    p = sub.add_parser("cluster", parents=[common], help="1-D k-means Davies-Bouldin sweep")
    p.add_argument("points", help="text file, one number per line")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=8)
    p.add_argument("--restarts", type=int, default=None)
    p.set_defaults(func=cmd_cluster)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        formats.SchemaError,
        ConfigError,
        ConfigurationError,
        SimConfigurationError,
        InvalidKError,
        AlignmentError,
        UsageError,
        OSError,
    ) as exc:
        _err(str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
