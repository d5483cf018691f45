"""JSON-lines readers and writers for records, trajectory groups, reports and token batches."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from compcredit.advantage import AdvantageReport, TokenBatch, Trajectory, TrajectoryGroup, Turn, TurnTokens
from compcredit.scoring import DEFAULT_LEVELS, CompressionRecord, QualityScore, level_by_number

DECIMALS = 9


class SchemaError(ValueError):
    pass


def r9(x: float) -> float:
    # adding 0.0 folds -0.0 into 0.0 so golden files stay stable
    return round(float(x), DECIMALS) + 0.0


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False)


def read_jsonl(path: str | Path):
    """Yield (line_number, parsed object) for every non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if line.strip():
                try:
                    yield lineno, json.loads(line)
                except json.JSONDecodeError as exc:
                    raise SchemaError(f"line {lineno}: invalid JSON ({exc.msg})") from None


def write_jsonl(path: str | Path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(dumps(row) + "\n")


def _require(obj: dict, keys, where: str):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: expected an object")
    for key in keys:
        if key not in obj:
            raise SchemaError(f"{where}: missing field '{key}'")


# -- scoring records ---------------------------------------------------------

RECORD_FIELDS = ("query", "original", "compressed", "level")


def input_hash(obj: dict) -> str:
    canonical = json.dumps({k: obj[k] for k in RECORD_FIELDS}, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def record_from_dict(obj: dict, level_table=DEFAULT_LEVELS, where: str = "record") -> CompressionRecord:
    _require(obj, RECORD_FIELDS, where)
    for key in ("query", "original", "compressed"):
        if not isinstance(obj[key], str):
            raise SchemaError(f"{where}: field '{key}' must be a string")
    try:
        level = level_by_number(int(obj["level"]), level_table)
    except (KeyError, TypeError, ValueError):
        raise SchemaError(f"{where}: unknown level {obj['level']!r}") from None
    try:
        return CompressionRecord(obj["query"], obj["original"], obj["compressed"], level)
    except ValueError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def score_row(hash_: str, score: QualityScore) -> dict:
    return {
        "input_hash": hash_,
        "q_ratio": r9(score.q_ratio),
        "q_level": r9(score.q_level),
        "q_info": r9(score.q_info),
        "q_sem": r9(score.q_sem),
        "q_com": r9(score.q_com),
    }


# -- trajectory groups -------------------------------------------------------


def group_from_dict(obj: dict, where: str = "group") -> TrajectoryGroup:
    _require(obj, ("query_id", "trajectories"), where)
    trajs = []
    for i, t in enumerate(obj["trajectories"]):
        tw = f"{where}, trajectory {i}"
        _require(t, ("trajectory_id", "final_reward", "turns"), tw)
        turns = []
        for j, turn in enumerate(t["turns"]):
            _require(turn, ("q_com",), f"{tw}, turn {j}")
            turns.append(
                Turn(
                    turn_index=int(turn.get("turn_index", j)),
                    q_com=float(turn["q_com"]),
                    level=int(turn.get("level", 0)),
                    token_count=int(turn.get("token_count", 0)),
                    tool=turn.get("tool"),
                    payload=turn.get("payload"),
                )
            )
        try:
            trajs.append(
                Trajectory(str(t["trajectory_id"]), float(t["final_reward"]), turns, bool(t.get("finished", True)))
            )
        except ValueError as exc:
            raise SchemaError(f"{tw}: {exc}") from None
    return TrajectoryGroup(str(obj["query_id"]), trajs)


def group_to_dict(group: TrajectoryGroup) -> dict:
    return {
        "query_id": group.query_id,
        "trajectories": [
            {
                "trajectory_id": t.trajectory_id,
                "final_reward": r9(t.final_reward),
                "finished": t.finished,
                "turns": [
                    {
                        "turn_index": turn.turn_index,
                        "tool": turn.tool,
                        "payload": turn.payload,
                        "level": turn.level,
                        "q_com": r9(turn.q_com),
                        "token_count": turn.token_count,
                    }
                    for turn in t.turns
                ],
            }
            for t in group.trajectories
        ],
    }


def report_to_dict(report: AdvantageReport, group: TrajectoryGroup | None = None) -> dict:
    trajectories = []
    for i, traj_id in enumerate(report.trajectory_ids):
        if group is not None:
            indices = [t.turn_index for t in group.trajectories[i].turns]
        else:
            indices = list(range(len(report.per_turn[i])))
        trajectories.append(
            {
                "trajectory_id": traj_id,
                "grpo_advantage": r9(report.per_trajectory[i]),
                "baseline": r9(report.baseline[i]),
                "turns": [
                    {"turn_index": idx, "advantage": r9(a)} for idx, a in zip(indices, report.per_turn[i])
                ],
            }
        )
    return {"query_id": report.query_id, "reshaping_weight": r9(report.reshaping_weight), "trajectories": trajectories}


# -- token batches -----------------------------------------------------------


def token_batch_from_rows(rows) -> TokenBatch:
    """Assemble a batch from rows {trajectory_id, turn_index, old/new/ref_logprobs}."""
    collected: dict[str, dict[int, TurnTokens]] = {}
    for lineno, obj in rows:
        where = f"line {lineno}"
        _require(obj, ("trajectory_id", "turn_index", "old_logprobs", "new_logprobs", "ref_logprobs"), where)
        try:
            tok = TurnTokens(
                tuple(map(float, obj["old_logprobs"])),
                tuple(map(float, obj["new_logprobs"])),
                tuple(map(float, obj["ref_logprobs"])),
            )
        except ValueError as exc:
            raise SchemaError(f"{where}: {exc}") from None
        per = collected.setdefault(str(obj["trajectory_id"]), {})
        idx = int(obj["turn_index"])
        if idx in per:
            raise SchemaError(f"{where}: duplicate turn {idx} for trajectory {obj['trajectory_id']!r}")
        per[idx] = tok
    return TokenBatch({tid: [per[k] for k in sorted(per)] for tid, per in collected.items()})
