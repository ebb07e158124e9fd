"""End-to-end pipeline stages with on-disk artifact caching.

Every stage is deterministic given the run config, writes its artifact
under the run's output directory, and reuses an existing artifact unless
forced. The transfer experiment composes the stages into the method
comparison used by the acceptance suite and the compare CLI command.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..baselines import FinetuneConfig, bc_finetune, train_bc, train_hg_dagger, train_iwr
from ..cloud.paired import PairedCloudSet, collect_paired_set
from ..distill import (
    DistillConfig,
    StudentConfig,
    StudentPolicy,
    evaluate,
    load_student,
    read_rows,
    rows_from_trajectories,
    save_student,
    train_student,
    write_rows,
)
from ..gaps import GapConfig, wrap
from ..hitl import (
    AlwaysTeleopOperator,
    CorrectionRecord,
    OracleOperator,
    OracleThresholds,
    SessionLog,
    collect,
    intervention_stats,
    split_episodes,
)
from ..learnkit import LrSchedule, checkpoint_hash, load_checkpoint
from ..residual import ResidualConfig, ResidualPolicy, ResidualTrainConfig, deploy, train_residual
from ..teacher import (
    TeacherConfig,
    harvest,
    load_teacher,
    save_teacher,
    teacher_actor,
    train_teacher,
)
from ..world.randomize import RandomizationConfig
from ..world.world import PlanarWorld
from .config import RunConfig

METHODS = ("transic", "direct", "dr_aug", "bc_finetune", "hg_dagger", "iwr", "bc")


def gap_key(gaps: list[GapConfig]) -> str:
    if not gaps:
        return "none"
    return "+".join(g.variant for g in gaps)


class Pipeline:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = cfg.out_dir()
        self.out.mkdir(parents=True, exist_ok=True)

    # -- environments -----------------------------------------------------------

    def sim_env(self) -> PlanarWorld:
        return PlanarWorld(self.cfg.task, cloud_budget=self.cfg.cloud_budget)

    def real_env(self, gaps: list[GapConfig] | None = None):
        gaps = self.cfg.gap_configs() if gaps is None else gaps
        return wrap(self.sim_env(), gaps, seed=self.cfg.seed + 77)

    def harvest_env_factory(self):
        extra = float(self.cfg.raw["distill"]["extra_randomization"])
        rand = RandomizationConfig.default().scaled(extra)
        task, budget = self.cfg.task, self.cfg.cloud_budget
        return lambda: PlanarWorld(task, randomization=rand, cloud_budget=budget)

    # -- stage: teacher -----------------------------------------------------------

    def teacher_path(self) -> Path:
        return self.out / "teacher.json"

    def teacher(self, force: bool = False):
        path = self.teacher_path()
        if self.cfg.raw["teacher_path"]:
            return load_teacher(self.cfg.raw["teacher_path"])
        if path.exists() and not force:
            return load_teacher(path)
        t = self.cfg.raw["teacher"]
        config = TeacherConfig.for_task(
            self.cfg.task,
            total_steps=t["total_steps"],
            n_envs=t["n_envs"],
            eval_every=t["eval_every"],
            eval_episodes=t["eval_episodes"],
        )
        result = train_teacher(config, seed=self.cfg.seed)
        save_teacher(path, result)
        curve_path = self.out / "teacher_curve.csv"
        with curve_path.open("w") as f:
            f.write("step,mean_return,success_rate\n")
            for row in result.curve:
                f.write(f"{row['step']},{row['mean_return']},{row['eval_success']}\n")
        return result

    # -- stage: harvest + dataset ---------------------------------------------------

    def dataset_path(self) -> Path:
        return self.out / "dataset.jsonl"

    def dataset(self, force: bool = False) -> list[dict]:
        path = self.dataset_path()
        if self.cfg.raw["dataset_path"]:
            return read_rows(self.cfg.raw["dataset_path"])
        if path.exists() and not force:
            return read_rows(path)
        teacher = self.teacher()
        actor = teacher_actor(teacher)
        trajs = harvest(
            actor,
            self.harvest_env_factory(),
            n_success=int(self.cfg.raw["harvest"]["n_success"]),
            min_len=self.cfg.harvest_min_len(),
            seed=self.cfg.seed + 1000,
        )
        rows = rows_from_trajectories(trajs, self.cfg.cloud_budget)
        write_rows(path, rows)
        return rows

    # -- stage: paired clouds ---------------------------------------------------------

    def paired_path(self) -> Path:
        return self.out / "paired.jsonl"

    def paired(self, force: bool = False) -> PairedCloudSet:
        path = self.paired_path()
        if path.exists() and not force:
            return PairedCloudSet.from_rows(read_rows(path))
        pairs = collect_paired_set(
            self.sim_env(),
            self.real_env(),
            n_scenes=int(self.cfg.raw["paired"]["n_scenes"]),
            seed=self.cfg.seed + 2000,
        )
        write_rows(path, pairs.to_rows())
        return pairs

    # -- stage: distill ------------------------------------------------------------------

    def student_path(self) -> Path:
        return self.out / "student.json"

    def _student_cfg(self) -> StudentConfig:
        return StudentConfig(cloud_budget=self.cfg.cloud_budget)

    def _distill_cfg(self, beta=None) -> DistillConfig:
        d = self.cfg.raw["distill"]
        return DistillConfig(
            steps=int(d["steps"]),
            batch_size=int(d["batch_size"]),
            beta=float(d["beta"]) if beta is None else beta,
            paired_batch=int(d["paired_batch"]),
            schedule=LrSchedule(
                base_lr=1e-4,
                warmup_steps=int(d["warmup_steps"]),
                cosine_decay_steps=int(d["cosine_decay_steps"]),
            ),
            augment_data=bool(d["augment"]),
            eval_every=int(d["eval_every"]),
            eval_episodes=int(d["eval_episodes"]),
        )

    def student(self, force: bool = False) -> tuple[StudentPolicy, dict]:
        path = self.student_path()
        if self.cfg.raw["student_path"]:
            return load_student(self.cfg.raw["student_path"])
        if path.exists() and not force:
            return load_student(path)
        rows = self.dataset()
        pairs = self.paired()
        task, budget = self.cfg.task, self.cfg.cloud_budget
        result = train_student(
            rows, pairs, self._student_cfg(), self._distill_cfg(),
            eval_env_factory=lambda: PlanarWorld(task, cloud_budget=budget),
            seed=self.cfg.seed,
        )
        meta = {
            "task": task,
            "best_success": result.best_success,
            "reg_first": result.reg_first,
            "reg_last": result.reg_last,
            "curve": result.curve,
        }
        save_student(path, result.policy, meta)
        return result.policy, meta

    # -- stage: corrections ---------------------------------------------------------------

    def corrections_paths(self, gaps: list[GapConfig]) -> tuple[Path, Path]:
        key = gap_key(gaps)
        return self.out / f"corrections_{key}.jsonl", self.out / f"session_{key}.jsonl"

    def corrections(self, gaps: list[GapConfig], force: bool = False):
        rec_path, log_path = self.corrections_paths(gaps)
        if rec_path.exists() and log_path.exists() and not force:
            records = [CorrectionRecord.from_dict(r) for r in read_rows(rec_path)]
            log = SessionLog.from_rows(read_rows(log_path))
            return records, log
        student, _ = self.student()
        c = self.cfg.raw["collect"]
        thresholds = OracleThresholds(
            stuck_patience=int(c["stuck_patience"]),
            recover_margin=float(c["recover_margin"]),
            max_correction_steps=int(c["max_correction_steps"]),
        )
        operator = OracleOperator(self.cfg.task, thresholds)
        records, log = collect(
            student, self.real_env(gaps), operator,
            n_traj=self.cfg.collect_n_traj(), seed=self.cfg.seed + 3000,
        )
        write_rows(rec_path, [r.to_dict() for r in records])
        write_rows(log_path, log.to_rows())
        return records, log

    # -- stage: residual ----------------------------------------------------------------------

    def residual_path(self, gaps: list[GapConfig]) -> Path:
        return self.out / f"residual_{gap_key(gaps)}.json"

    def residual(self, gaps: list[GapConfig], force: bool = False) -> ResidualPolicy:
        path = self.residual_path(gaps)
        if path.exists() and not force:
            doc = load_checkpoint(path)
            if doc["kind"] != "residual":
                raise ValueError(f"{path}: not a residual checkpoint")
            return ResidualPolicy.from_modules(doc["modules"])
        records, log = self.corrections(gaps)
        if not records:
            raise RuntimeError(
                f"no corrections collected for {gap_key(gaps)}; cannot train a residual"
            )
        train_recs, val_recs = split_episodes(records, 0.1, seed=self.cfg.seed)
        if not train_recs:
            train_recs, val_recs = records, []
        r = self.cfg.raw["residual"]
        cfg = ResidualTrainConfig(
            stage1_steps=int(r["stage1_steps"]),
            stage2_steps=int(r["stage2_steps"]),
            batch_size=int(r["batch_size"]),
            schedule=LrSchedule(base_lr=1e-4, warmup_steps=int(r["warmup_steps"])),
        )
        result = train_residual(
            train_recs, log, ResidualConfig(cloud_budget=self.cfg.cloud_budget), cfg,
            seed=self.cfg.seed, val_records=val_recs or None, val_log=log,
        )
        from ..learnkit import save_checkpoint

        save_checkpoint(
            path, kind="residual", modules=result.policy.to_modules(),
            meta={
                "task": self.cfg.task,
                "gaps": [g.to_dict() for g in gaps],
                "gate_train_accuracy": result.gate_train_accuracy,
                "gate_val_accuracy": result.gate_val_accuracy,
            },
        )
        return result.policy

    # -- stage: baselines -----------------------------------------------------------------------

    def baseline_path(self, method: str, gaps: list[GapConfig]) -> Path:
        return self.out / f"baseline_{method}_{gap_key(gaps)}.json"

    def _finetune_cfg(self) -> FinetuneConfig:
        b = self.cfg.raw["baseline"]
        return FinetuneConfig(
            steps=int(b["steps"]),
            batch_size=int(b["batch_size"]),
            schedule=LrSchedule(base_lr=1e-4, warmup_steps=int(b["warmup_steps"])),
        )

    def baseline(self, method: str, gaps: list[GapConfig], force: bool = False) -> StudentPolicy:
        path = self.baseline_path(method, gaps)
        if path.exists() and not force:
            return load_student(path, expected_kinds=("baseline",))[0]
        student, _ = self.student()
        _, log = self.corrections(gaps)
        cfg = self._finetune_cfg()
        if method == "bc_finetune":
            policy, _ = bc_finetune(student, log, cfg, seed=self.cfg.seed)
        elif method == "hg_dagger":
            policy, _ = train_hg_dagger(student, log, cfg, seed=self.cfg.seed)
        elif method == "iwr":
            policy, _ = train_iwr(student, log, cfg, seed=self.cfg.seed)
        elif method == "bc":
            demos = self.demos(gaps)
            policy, _ = train_bc(demos, self._student_cfg(), cfg, seed=self.cfg.seed)
        elif method == "dr_aug":
            policy = self.dr_aug_student()
        else:
            raise ValueError(f"unknown baseline {method!r}")
        save_student(path, policy, {"task": self.cfg.task, "method": method}, kind="baseline")
        return policy

    def demos_path(self, gaps: list[GapConfig]) -> Path:
        return self.out / f"demos_{gap_key(gaps)}.jsonl"

    def demos(self, gaps: list[GapConfig], force: bool = False) -> SessionLog:
        """Full-teleop demonstrations on the real env (for the BC baseline)."""
        path = self.demos_path(gaps)
        if path.exists() and not force:
            return SessionLog.from_rows(read_rows(path))
        operator = AlwaysTeleopOperator(self.cfg.task)
        student, _ = self.student()
        _, log = collect(
            student, self.real_env(gaps), operator,
            n_traj=self.cfg.collect_n_traj(), seed=self.cfg.seed + 4000,
        )
        write_rows(path, log.to_rows())
        return log

    def dr_aug_student(self, force: bool = False) -> StudentPolicy:
        """DR+augmentation baseline: re-distill with doubled randomization
        ranges; no human data."""
        path = self.out / "student_dr_aug.json"
        if path.exists() and not force:
            return load_student(path)[0]
        teacher = self.teacher()
        actor = teacher_actor(teacher)
        task, budget = self.cfg.task, self.cfg.cloud_budget
        rand = RandomizationConfig.default().scaled(2.0)
        trajs = harvest(
            actor,
            lambda: PlanarWorld(task, randomization=rand, cloud_budget=budget),
            n_success=int(self.cfg.raw["harvest"]["n_success"]),
            min_len=self.cfg.harvest_min_len(),
            seed=self.cfg.seed + 5000,
        )
        rows = rows_from_trajectories(trajs, budget)
        result = train_student(
            rows, self.paired(), self._student_cfg(), self._distill_cfg(),
            eval_env_factory=lambda: PlanarWorld(task, cloud_budget=budget),
            seed=self.cfg.seed + 1,
        )
        save_student(path, result.policy, {"task": task, "method": "dr_aug"})
        return result.policy

    # -- experiment ---------------------------------------------------------------------------------

    def evaluate_method(self, method: str, gaps: list[GapConfig]) -> dict:
        seeds = self.cfg.raw["eval"]["seeds"]
        env = self.real_env(gaps)
        student, _ = self.student()
        if method == "transic":
            residual = self.residual(gaps)
            threshold = float(self.cfg.raw["residual"]["gate_threshold"])
            report = deploy(student, residual, env, seeds, mode="learned", threshold=threshold)
        elif method == "direct":
            report = deploy(student, None, env, seeds, mode="off")
        else:
            policy = self.baseline(method, gaps)
            report = evaluate(policy, env, seeds)
            report["gate_rate"] = 0.0
        report["method"] = method
        report["gap"] = gap_key(gaps)
        report["task"] = self.cfg.task
        return report

    def in_sim_success(self, policy=None) -> float:
        seeds = self.cfg.raw["eval"]["seeds"]
        if policy is None:
            policy, _ = self.student()
        return evaluate(policy, self.sim_env(), seeds)["success_rate"]

    def student_hash(self) -> str:
        return checkpoint_hash(load_checkpoint(self.student_path()))
