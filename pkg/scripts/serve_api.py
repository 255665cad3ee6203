#!/usr/bin/env python3
"""Serve the tutoring HTTP API.

By default the server runs against the scripted mock provider with the
bundled toy problems as its exercise bank, so every endpoint works offline.
Pass --provider plus --provider-config to serve against live model
providers; API keys are read from CODEEDU_PROVIDER_<ID>_KEY.

The bind address comes from CODEEDU_BIND_ADDR (host:port, default
127.0.0.1:8000) and session workspaces go under CODEEDU_WORKSPACE_ROOT
(default ./workspace).
"""

from __future__ import annotations

import sys
from pathlib import Path

import click
import uvicorn

REPO_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_PROBLEMS = REPO_ROOT / "data" / "toy_problems.jsonl"

from codeedu.agents.profiles import ALL_ROLES  # noqa: E402
from codeedu.api.app import bind_address, create_app, workspace_root  # noqa: E402
from codeedu.errors import CodeEduError  # noqa: E402
from codeedu.evaluation.fixtures import build_default_fixture, make_crawl_corpus  # noqa: E402
from codeedu.evaluation.problems import exercise_from_problem, load_problems  # noqa: E402
from codeedu.llm.config import (  # noqa: E402
    api_key_for,
    default_temperature,
    load_provider_config,
)
from codeedu.llm.gateway import Gateway, ModelBinding, validate_bindings  # noqa: E402
from codeedu.llm.http import OpenAiChatProvider  # noqa: E402
from codeedu.llm.mock import MockProvider  # noqa: E402
from codeedu.session.orchestrator import SessionOrchestrator  # noqa: E402


def build_mock_actors(problems, workspace: Path):
    gateway = Gateway()
    gateway.register_provider("mock", MockProvider(build_default_fixture(problems)))
    bindings = {
        role: ModelBinding(
            agent_role=role,
            provider_id="mock",
            model_name="scripted",
            temperature=default_temperature(role),
        )
        for role in ALL_ROLES
    }
    crawl_corpus = workspace / "crawl_fixtures"
    make_crawl_corpus(crawl_corpus)
    return gateway, bindings, crawl_corpus


def build_live_actors(provider: str, provider_config: Path):
    gateway = Gateway()
    providers, bindings = load_provider_config(provider_config)
    if provider not in {p.provider_id for p in providers}:
        raise click.UsageError(f"provider {provider!r} is not defined in {provider_config}")
    for spec in providers:
        gateway.register_provider(
            spec.provider_id,
            OpenAiChatProvider(spec.base_url, api_key_for(spec.provider_id)),
        )
    return gateway, validate_bindings(bindings, ALL_ROLES), None


@click.command()
@click.option("--provider", default="mock", show_default=True,
              help="'mock' for the scripted offline provider, or a provider id from --provider-config.")
@click.option("--provider-config", default=None,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Provider/bindings JSON; required for non-mock providers.")
@click.option("--problems", "problems_path", default=DEFAULT_PROBLEMS, show_default=True,
              type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="JSON-lines problem file used as the exercise bank.")
@click.option("--turns", "max_turns", type=int, default=20, show_default=True,
              help="Turn budget per session.")
@click.option("--ui-dir", default=None,
              type=click.Path(exists=True, file_okay=False, path_type=Path),
              help="Serve a built web UI from this directory at /ui "
                   "(e.g. frontend/ after `npm run build`).")
def main(provider, provider_config, problems_path, max_turns, ui_dir) -> None:
    """Start the tutoring service."""
    try:
        host, port = bind_address()
        workspace = Path(workspace_root())
        workspace.mkdir(parents=True, exist_ok=True)
        problems = load_problems(problems_path)
        if provider == "mock":
            gateway, bindings, crawl_corpus = build_mock_actors(problems, workspace)
        else:
            if provider_config is None:
                raise click.UsageError("--provider-config is required when --provider is not 'mock'")
            gateway, bindings, crawl_corpus = build_live_actors(provider, provider_config)
        orchestrator = SessionOrchestrator(
            gateway=gateway,
            bindings=bindings,
            workspace_root=workspace,
            crawl_corpus=crawl_corpus,
            exercise_bank=tuple(exercise_from_problem(p) for p in problems),
            max_turns=max_turns,
        )
    except (CodeEduError, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    app = create_app(orchestrator)
    if ui_dir is not None:
        from starlette.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")
        click.echo(f"Web UI at http://{host}:{port}/ui/ (from {ui_dir})")
    click.echo(f"Serving on http://{host}:{port} (workspace: {workspace}, provider: {provider})")
    uvicorn.run(app, host=host, port=port, log_level="info")


if __name__ == "__main__":
    main()
