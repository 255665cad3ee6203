"""Command-line entry point for evaluation runs."""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

import click

from codeedu.agents.profiles import ALL_ROLES, ROLE_TUTOR
from codeedu.errors import CodeEduError
from codeedu.evaluation.crossval import EvalConfig, cross_validate, write_results
from codeedu.evaluation.fixtures import build_default_fixture, make_crawl_corpus
from codeedu.evaluation.problems import load_problems
from codeedu.evaluation.quality import judge_materials
from codeedu.evaluation.students import StudentLevel
from codeedu.llm.config import api_key_for, default_temperature, load_provider_config
from codeedu.llm.gateway import Gateway, ModelBinding, validate_bindings
from codeedu.llm.http import OpenAiChatProvider
from codeedu.llm.mock import MockProvider, load_fixture
from codeedu.session.orchestrator import SessionOrchestrator

QUALITY_TOPIC = "python basics"


def _mock_binding(role: str, temperature: float | None = None) -> ModelBinding:
    return ModelBinding(
        agent_role=role,
        provider_id="mock",
        model_name="scripted",
        temperature=default_temperature(role) if temperature is None else temperature,
    )


def _build_actors(provider, provider_config, fixtures_path, problems, out_dir):
    """Wire the gateway plus the agent/student/baseline/rater bindings."""
    gateway = Gateway()
    if provider == "mock":
        fixture = (
            load_fixture(fixtures_path)
            if fixtures_path is not None
            else build_default_fixture(problems)
        )
        gateway.register_provider("mock", MockProvider(fixture))
        crawl_corpus = out_dir / "crawl_fixtures"
        make_crawl_corpus(crawl_corpus)
        agent_bindings = {role: _mock_binding(role) for role in ALL_ROLES}
        extras = {
            "student": _mock_binding("student"),
            "baseline": _mock_binding("baseline"),
            "rater": _mock_binding("rater", temperature=0.0),
        }
        return gateway, agent_bindings, extras, crawl_corpus
    if provider_config is None:
        raise click.UsageError(
            "--provider-config is required when --provider is not 'mock'"
        )
    providers, bindings = load_provider_config(provider_config)
    wanted = {p.provider_id for p in providers}
    if provider not in wanted:
        raise click.UsageError(f"provider {provider!r} is not defined in {provider_config}")
    for spec in providers:
        gateway.register_provider(
            spec.provider_id,
            OpenAiChatProvider(spec.base_url, api_key_for(spec.provider_id)),
        )
    agent_bindings = validate_bindings(bindings, ALL_ROLES)
    base = agent_bindings[ROLE_TUTOR]
    extras = {
        "student": dataclasses.replace(base, agent_role="student"),
        "baseline": dataclasses.replace(base, agent_role="baseline"),
        "rater": dataclasses.replace(base, agent_role="rater", temperature=0.0),
    }
    return gateway, agent_bindings, extras, None


def _rate_materials(gateway, agent_bindings, rater_binding, levels, crawl_corpus, out_dir):
    """Generate one material per student level via the platform, then rate it."""
    orchestrator = SessionOrchestrator(
        gateway=gateway,
        bindings=agent_bindings,
        workspace_root=out_dir / "quality-sessions",
        crawl_corpus=crawl_corpus,
    )
    report: dict[str, dict] = {}
    for level in levels:
        session = orchestrator.start_session(
            {
                "background": f"simulated {level.value}-level coding student",
                "goals": "build a personal study guide",
                "self_reported_level": level.value,
                "preferred_topics": [QUALITY_TOPIC],
            }
        )
        material = orchestrator.generate_material(session, topic=QUALITY_TOPIC)
        scores = judge_materials(material, session.profile, gateway, rater_binding)
        report[level.value] = {
            "scores": scores.as_dict(),
            "rater_transcript": list(scores.rater_transcript),
        }
    return report


@click.group()
def main() -> None:
    """Evaluation harness for the coding-education platform."""


@main.command(name="run")
@click.option("--problems", "problems_path", required=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON-lines problem file.")
@click.option("--tutor", type=click.Choice(["codeedu", "baseline", "both"]),
              default="both", show_default=True)
@click.option("--level", type=click.Choice(["low", "medium", "high", "all"]),
              default="all", show_default=True)
@click.option("--k", "k_samples", type=int, default=3, show_default=True,
              help="Solution drafts per problem.")
@click.option("--m", "m_cases", type=int, default=10, show_default=True,
              help="Unit test cases per problem.")
@click.option("--turns", "max_turns", type=int, default=20, show_default=True,
              help="Maximum tutoring chat turns per episode.")
@click.option("--folds", type=int, default=5, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--provider", default="mock", show_default=True,
              help="'mock' for scripted offline runs, or a provider id from --provider-config.")
@click.option("--fixtures", "fixtures_path", default=None,
              type=click.Path(exists=True, path_type=Path),
              help="Scripted fixture file/dir for the mock provider (defaults to a generated one).")
@click.option("--provider-config", default=None,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Provider/bindings JSON; required for non-mock providers. "
                   "API keys come from CODEEDU_PROVIDER_<ID>_KEY.")
@click.option("--out", "out_dir", required=True,
              type=click.Path(file_okay=False, path_type=Path))
@click.option("--skip-quality", is_flag=True, default=False,
              help="Skip material-quality rating (quality.json).")
def run(problems_path, tutor, level, k_samples, m_cases, max_turns, folds, seed,
        provider, fixtures_path, provider_config, out_dir, skip_quality) -> None:
    """Run pre-test → tutoring → post-test cross-validation and write results."""
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        problems = load_problems(problems_path, cases_per_problem=m_cases)
        config = EvalConfig(
            n_problems=len(problems),
            k_samples=k_samples,
            m_cases=m_cases,
            max_turns=max_turns,
            folds=folds,
            seed=seed,
        )
        tutors = ("baseline", "codeedu") if tutor == "both" else (tutor,)
        levels = (
            tuple(StudentLevel) if level == "all" else (StudentLevel(level),)
        )
        gateway, agent_bindings, extras, crawl_corpus = _build_actors(
            provider, provider_config, fixtures_path, problems, out_dir
        )
        click.echo(
            f"Evaluating {len(problems)} problems | tutors: {', '.join(tutors)} | "
            f"levels: {', '.join(l.value for l in levels)} | folds: {folds} | seed: {seed}"
        )
        results = cross_validate(
            problems,
            config,
            gateway=gateway,
            agent_bindings=agent_bindings,
            student_binding=extras["student"],
            baseline_binding=extras["baseline"],
            workspace_root=out_dir / "workspace",
            levels=levels,
            tutors=tutors,
            crawl_corpus=crawl_corpus,
        )
        json_path, csv_path = write_results(results, out_dir)
        click.echo(f"Wrote {json_path}")
        click.echo(f"Wrote {csv_path}")
        if "codeedu" in tutors and not skip_quality:
            quality = _rate_materials(
                gateway, agent_bindings, extras["rater"], levels, crawl_corpus, out_dir
            )
            quality_path = out_dir / "quality.json"
            quality_path.write_text(
                json.dumps({"levels": quality}, indent=2, sort_keys=True) + "\n",
                encoding="utf-8",
            )
            click.echo(f"Wrote {quality_path}")
        for run_block in results["runs"]:
            agg = run_block["aggregate"]
            click.echo(
                f"  {run_block['tutor']}/{run_block['level']}: "
                f"pre pass={agg['pre']['pass_at_k']:.3f} "
                f"post pass={agg['post']['pass_at_k']:.3f} "
                f"tir(pass)={_fmt(agg['tir']['pass_at_k'])} "
                f"tir(recall)={_fmt(agg['tir']['recall_at_k'])}"
            )
    except (CodeEduError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _fmt(value: float | None) -> str:
    return "undefined" if value is None else f"{value:.1f}%"


if __name__ == "__main__":
    main()
