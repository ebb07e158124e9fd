"""Command-line entry points for every pipeline stage."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from ..gaps.config import GAP_VARIANTS, GapConfig
from .config import ConfigError, RunConfig
from .pipeline import METHODS, Pipeline, gap_key

GAP_TASK_DEFAULTS = {
    "perception_error": "reach_grasp",
    "underactuated_controller": "insert",
    "embodiment_mismatch": "screw",
    "dynamics_difference": "stabilize",
    "asset_mismatch": "reach_grasp",
}


def _parse_gaps(spec: str | None) -> list[GapConfig]:
    if not spec:
        return []
    names = [s.strip() for s in spec.split(",") if s.strip()]
    if names == ["all"]:
        names = [g for g in GAP_VARIANTS if g != "none"]
    for n in names:
        if n not in GAP_VARIANTS:
            raise ConfigError(f"unknown gap {n!r}; choose from {GAP_VARIANTS}")
    return [GapConfig(n) for n in names]


def _load_config(args) -> RunConfig:
    doc = {}
    if args.config:
        doc = json.loads(Path(args.config).read_text())
    if getattr(args, "task", None):
        doc["task"] = args.task
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.out:
        doc["out"] = args.out
    if getattr(args, "gap", None):
        doc["gaps"] = [g.to_dict() for g in _parse_gaps(args.gap)]
    return RunConfig.from_dict(doc)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s2rlab",
        description="Desk-scale sim-to-real correction lab: train, collect, deploy, compare.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, task=True, gap=True):
        p.add_argument("--config", help="JSON run config")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", help="output directory (default: $TRANSIC_LAB_DATA/<task>)")
        if task:
            p.add_argument("--task", choices=("stabilize", "reach_grasp", "insert", "screw"))
        if gap:
            p.add_argument("--gap", help="comma-separated gap names, or 'all'")

    common(sub.add_parser("train-teacher", help="PPO teacher training"), gap=False)
    common(sub.add_parser("harvest", help="harvest successful teacher rollouts"), gap=False)
    common(sub.add_parser("distill", help="train the point-cloud student"))
    common(sub.add_parser("collect", help="oracle correction collection on the gap env"))
    common(sub.add_parser("train-residual", help="two-stage residual + gate training"))
    p = sub.add_parser("train-baseline", help="fine-tuning baseline on collected data")
    common(p)
    p.add_argument("--method", required=True,
                   choices=[m for m in METHODS if m not in ("transic", "direct")])
    p = sub.add_parser("evaluate", help="fixed-seed evaluation of a method")
    common(p)
    p.add_argument("--mode", default="off", choices=("learned", "human", "off", "always"))
    p = sub.add_parser("compare", help="run the full method comparison, emit CSV")
    common(p)
    p.add_argument("--methods", default=",".join(METHODS))
    p = sub.add_parser("stats", help="intervention statistics of a session log")
    common(p)
    p.add_argument("--log", required=True, help="session log JSONL")
    p = sub.add_parser("serve", help="websocket teleop service")
    common(p)
    p.add_argument("--port", type=int, default=None)
    return parser


def cmd_train_teacher(cfg: RunConfig) -> int:
    pipe = Pipeline(cfg)
    result = pipe.teacher(force=True)
    print(f"teacher[{cfg.task}] best eval success {result.best_success:.2f} "
          f"-> {pipe.teacher_path()}")
    return 0


def cmd_harvest(cfg: RunConfig) -> int:
    pipe = Pipeline(cfg)
    rows = pipe.dataset(force=True)
    print(f"dataset[{cfg.task}] {len(rows)} rows -> {pipe.dataset_path()}")
    return 0


def cmd_distill(cfg: RunConfig) -> int:
    pipe = Pipeline(cfg)
    _, meta = pipe.student(force=True)
    print(f"student[{cfg.task}] best eval success {meta['best_success']:.2f} "
          f"regularizer {meta['reg_first']} -> {meta['reg_last']} -> {pipe.student_path()}")
    return 0


def cmd_collect(cfg: RunConfig) -> int:
    pipe = Pipeline(cfg)
    gaps = cfg.gap_configs()
    records, log = pipe.corrections(gaps, force=True)
    from ..hitl import intervention_stats

    stats = intervention_stats(log)
    lo, hi = cfg.raw["collect"]["target_band"]
    flagged = "" if lo <= stats["fraction"] <= hi else "  [outside target band]"
    print(f"collected {len(records)} corrections over {len(log.episodes)} episodes "
          f"on {gap_key(gaps)}; intervention fraction {stats['fraction']:.3f}{flagged}")
    return 0


def cmd_train_residual(cfg: RunConfig) -> int:
    pipe = Pipeline(cfg)
    gaps = cfg.gap_configs()
    pipe.residual(gaps, force=True)
    print(f"residual[{cfg.task}/{gap_key(gaps)}] -> {pipe.residual_path(gaps)}")
    return 0


def cmd_train_baseline(cfg: RunConfig, method: str) -> int:
    pipe = Pipeline(cfg)
    gaps = cfg.gap_configs()
    pipe.baseline(method, gaps, force=True)
    print(f"baseline {method}[{cfg.task}/{gap_key(gaps)}] -> {pipe.baseline_path(method, gaps)}")
    return 0


def cmd_evaluate(cfg: RunConfig, mode: str) -> int:
    pipe = Pipeline(cfg)
    gaps = cfg.gap_configs()
    method = {"off": "direct", "learned": "transic"}.get(mode)
    if method is None:
        student, _ = pipe.student()
        residual = pipe.residual(gaps)
        from ..residual import deploy

        report = deploy(student, residual, pipe.real_env(gaps), cfg.raw["eval"]["seeds"],
                        mode=mode)
        report.update({"method": f"gated[{mode}]", "gap": gap_key(gaps), "task": cfg.task})
    else:
        report = pipe.evaluate_method(method, gaps)
    print(json.dumps({k: report[k] for k in ("task", "gap", "method", "success_rate",
                                             "gate_rate", "n")}))
    out = pipe.out / f"eval_{report['method']}_{report['gap']}.json"
    out.write_text(json.dumps(report, indent=2))
    return 0


def cmd_compare(cfg: RunConfig, methods: list[str]) -> int:
    pipe = Pipeline(cfg)
    gaps = cfg.gap_configs()
    rows = []
    for method in methods:
        report = pipe.evaluate_method(method, gaps)
        rows.append(
            {
                "method": method,
                "task": cfg.task,
                "gap": report["gap"],
                "success_rate": report["success_rate"],
                "n_episodes": report["n"],
            }
        )
        print(f"{method:12s} {report['success_rate']:.2f}")
    path = pipe.out / f"compare_{gap_key(gaps)}.csv"
    with path.open("w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"-> {path}")
    return 0


def cmd_stats(cfg: RunConfig, log_path: str) -> int:
    from ..distill.io import read_rows
    from ..hitl import SessionLog, intervention_stats

    log = SessionLog.from_rows(read_rows(log_path))
    stats = intervention_stats(log)
    print(json.dumps(stats))
    return 0


def cmd_serve(cfg: RunConfig, port: int | None) -> int:
    import uvicorn

    from .service import build_app

    frontend = None
    for candidate in (Path.cwd() / "frontend", Path(__file__).parents[3] / "frontend"):
        if (candidate / "index.html").exists():
            frontend = candidate
            break
    app = build_app(cfg, frontend_dir=frontend)
    uvicorn.run(app, host="127.0.0.1", port=port or int(cfg.raw["serve"]["port"]))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "train-teacher":
            return cmd_train_teacher(cfg)
        if args.command == "harvest":
            return cmd_harvest(cfg)
        if args.command == "distill":
            return cmd_distill(cfg)
        if args.command == "collect":
            return cmd_collect(cfg)
        if args.command == "train-residual":
            return cmd_train_residual(cfg)
        if args.command == "train-baseline":
            return cmd_train_baseline(cfg, args.method)
        if args.command == "evaluate":
            return cmd_evaluate(cfg, args.mode)
        if args.command == "compare":
            return cmd_compare(cfg, [m.strip() for m in args.methods.split(",")])
        if args.command == "stats":
            return cmd_stats(cfg, args.log)
        if args.command == "serve":
            return cmd_serve(cfg, args.port)
        parser.error(f"unknown command {args.command}")
    except (ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failure -> exit 1 with diagnostic
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
