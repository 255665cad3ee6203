"""Seeded k-fold cross-validation over the problem set, with pre/post testing."""

from __future__ import annotations

import csv
import io
import json
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence

from codeedu.errors import DatasetError, UndefinedBaselineError
from codeedu.evaluation.episodes import (
    PRE_TEST_TAG,
    BaselineTutor,
    CodeEduTutor,
    Grader,
    grade_drafts,
    run_episode,
)
from codeedu.evaluation.metrics import (
    OutcomeMatrix,
    pass_at_k,
    recall_at_k,
    tutoring_improvement_rate,
)
from codeedu.evaluation.problems import Problem
from codeedu.evaluation.students import StudentLevel, build_student
from codeedu.llm.gateway import Gateway, ModelBinding
from codeedu.session.orchestrator import SessionOrchestrator
from codeedu.tools.sandbox import SandboxPolicy

TUTOR_NAMES = ("baseline", "codeedu")


@dataclass(frozen=True)
class EvalConfig:
    """Protocol constants for one evaluation run."""

    n_problems: int
    k_samples: int = 3
    m_cases: int = 10
    max_turns: int = 20
    folds: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("n_problems", "k_samples", "m_cases", "max_turns", "folds"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.folds > self.n_problems:
            raise ValueError(
                f"folds ({self.folds}) cannot exceed the problem count ({self.n_problems})"
            )


def fold_assignments(n_problems: int, folds: int, seed: int) -> tuple[tuple[int, ...], ...]:
    """Partition problem indices into seeded, disjoint folds.

    Indices are shuffled once with the seed; the first ``n mod folds`` folds
    take one extra item, so 11 problems over 5 folds yields sizes (3,2,2,2,2).
    """
    if folds < 1 or folds > n_problems:
        raise ValueError("folds must be between 1 and the problem count")
    indices = list(range(n_problems))
    random.Random(seed).shuffle(indices)
    base, extra = divmod(n_problems, folds)
    out: list[tuple[int, ...]] = []
    cursor = 0
    for fold in range(folds):
        size = base + (1 if fold < extra else 0)
        out.append(tuple(indices[cursor : cursor + size]))
        cursor += size
    return tuple(out)


def _metric_pair(rows: Sequence[Sequence[Sequence[bool]]]) -> dict[str, float]:
    matrix = OutcomeMatrix.from_lists(rows)
    return {
        "pass_at_k": pass_at_k(matrix),
        "recall_at_k": recall_at_k(matrix),
    }


def _tir_pair(pre: Mapping[str, float], post: Mapping[str, float]) -> dict[str, float | None]:
    out: dict[str, float | None] = {}
    for key in ("pass_at_k", "recall_at_k"):
        try:
            out[key] = tutoring_improvement_rate(pre[key], post[key])
        except UndefinedBaselineError:
            out[key] = None
    return out


def _mean_metrics(per_fold: Sequence[Mapping[str, float]]) -> dict[str, float]:
    return {
        key: sum(fold[key] for fold in per_fold) / len(per_fold)
        for key in ("pass_at_k", "recall_at_k")
    }


def cross_validate(
    problems: Sequence[Problem],
    config: EvalConfig,
    *,
    gateway: Gateway,
    agent_bindings: Mapping[str, ModelBinding],
    student_binding: ModelBinding,
    baseline_binding: ModelBinding,
    workspace_root: str | Path,
    levels: Sequence[StudentLevel | str] = (StudentLevel.LOW, StudentLevel.MEDIUM, StudentLevel.HIGH),
    tutors: Sequence[str] = TUTOR_NAMES,
    crawl_corpus: str | Path | None = None,
    sandbox_policy: SandboxPolicy | None = None,
    grader: Grader | None = None,
    progress: Callable[[str], None] | None = None,
) -> dict:
    """Run the full pre-test → tutoring → post-test protocol on every fold.

    For each tutor and student level, every fold is held out in turn: each
    held-out problem gets a fresh simulated student who is pre-tested, then
    tutored in a chat episode, then post-tested on the same problem. Fold
    metrics aggregate across the whole run as per-fold means.
    """
    if len(problems) != config.n_problems:
        raise DatasetError(
            f"config says {config.n_problems} problems but {len(problems)} were loaded"
        )
    for problem in problems:
        if len(problem.test_cases) != config.m_cases:
            raise DatasetError(
                f"problem {problem.problem_id!r} has {len(problem.test_cases)} cases; "
                f"config requires {config.m_cases}"
            )
    unknown = set(tutors) - set(TUTOR_NAMES)
    if unknown:
        raise ValueError(f"unknown tutors: {sorted(unknown)}")
    level_values = [StudentLevel(level) for level in levels]

    workspace_root = Path(workspace_root)
    workspace_root.mkdir(parents=True, exist_ok=True)
    if grader is None:
        grader = Grader(workspace_root / "grading", policy=sandbox_policy)
    folds = fold_assignments(config.n_problems, config.folds, config.seed)

    orchestrator: SessionOrchestrator | None = None
    if "codeedu" in tutors:
        orchestrator = SessionOrchestrator(
            gateway=gateway,
            bindings=agent_bindings,
            workspace_root=workspace_root / "sessions",
            crawl_corpus=crawl_corpus,
            sandbox_policy=sandbox_policy,
            max_turns=config.max_turns,
        )

    runs: list[dict] = []
    for tutor_name in tutors:
        for level in level_values:
            per_fold: list[dict] = []
            for fold_index, fold in enumerate(folds):
                held_out = [problems[i] for i in fold]
                pre_rows: list[tuple[tuple[bool, ...], ...]] = []
                post_rows: list[tuple[tuple[bool, ...], ...]] = []
                for problem in held_out:
                    if progress is not None:
                        progress(
                            f"{tutor_name}/{level.value}/fold{fold_index}: {problem.problem_id}"
                        )
                    student = build_student(level, problem, gateway, student_binding)
                    pre_rows.append(
                        grade_drafts(
                            student,
                            problem,
                            k_samples=config.k_samples,
                            coached_by=PRE_TEST_TAG,
                            grader=grader,
                        )
                    )
                    if tutor_name == "codeedu":
                        assert orchestrator is not None
                        channel = CodeEduTutor(orchestrator, level, problem)
                    else:
                        channel = BaselineTutor(gateway, baseline_binding)
                    episode = run_episode(
                        student,
                        channel,
                        problem,
                        k_samples=config.k_samples,
                        max_turns=config.max_turns,
                        grader=grader,
                    )
                    post_rows.append(episode.verdict_rows)
                pre = _metric_pair(pre_rows)
                post = _metric_pair(post_rows)
                per_fold.append(
                    {
                        "fold": fold_index,
                        "problem_ids": [problems[i].problem_id for i in fold],
                        "pre": pre,
                        "post": post,
                        "tir": _tir_pair(pre, post),
                    }
                )
            aggregate_pre = _mean_metrics([fold["pre"] for fold in per_fold])
            aggregate_post = _mean_metrics([fold["post"] for fold in per_fold])
            runs.append(
                {
                    "tutor": tutor_name,
                    "level": level.value,
                    "per_fold": per_fold,
                    "aggregate": {
                        "pre": aggregate_pre,
                        "post": aggregate_post,
                        "tir": _tir_pair(aggregate_pre, aggregate_post),
                    },
                }
            )

    return {
        "config": {
            **asdict(config),
            "levels": [level.value for level in level_values],
            "tutors": list(tutors),
        },
        "runs": runs,
    }


CSV_COLUMNS = (
    "tutor",
    "level",
    "fold",
    "pre_pass_at_k",
    "pre_recall_at_k",
    "post_pass_at_k",
    "post_recall_at_k",
    "tir_pass_at_k",
    "tir_recall_at_k",
)


def _csv_cell(value: float | None) -> str:
    return "" if value is None else str(value)


def results_to_csv(results: Mapping) -> str:
    """Flatten a results document into one CSV row per fold plus an aggregate row."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for run in results["runs"]:
        for fold in run["per_fold"]:
            writer.writerow(
                [
                    run["tutor"],
                    run["level"],
                    str(fold["fold"]),
                    _csv_cell(fold["pre"]["pass_at_k"]),
                    _csv_cell(fold["pre"]["recall_at_k"]),
                    _csv_cell(fold["post"]["pass_at_k"]),
                    _csv_cell(fold["post"]["recall_at_k"]),
                    _csv_cell(fold["tir"]["pass_at_k"]),
                    _csv_cell(fold["tir"]["recall_at_k"]),
                ]
            )
        aggregate = run["aggregate"]
        writer.writerow(
            [
                run["tutor"],
                run["level"],
                "aggregate",
                _csv_cell(aggregate["pre"]["pass_at_k"]),
                _csv_cell(aggregate["pre"]["recall_at_k"]),
                _csv_cell(aggregate["post"]["pass_at_k"]),
                _csv_cell(aggregate["post"]["recall_at_k"]),
                _csv_cell(aggregate["tir"]["pass_at_k"]),
                _csv_cell(aggregate["tir"]["recall_at_k"]),
            ]
        )
    return buffer.getvalue()


def write_results(results: Mapping, out_dir: str | Path) -> tuple[Path, Path]:
    """Write results.json and results.csv; byte-stable for identical inputs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "results.json"
    csv_path = out_dir / "results.csv"
    json_path.write_text(
        json.dumps(results, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    csv_path.write_text(results_to_csv(results), encoding="utf-8")
    return json_path, csv_path
