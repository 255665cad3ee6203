from __future__ import annotations

from pathlib import Path

import pytest

from codeedu.errors import (
    NetworkUnavailableError,
    PathEscapeError,
    SchemaMismatchError,
    UnknownToolError,
    WorkspaceFileNotFoundError,
)
from codeedu.llm.gateway import Gateway, ModelBinding
from codeedu.llm.mock import FixtureEntry, MockProvider, ScriptedFixture
from codeedu.tools import ALL_TOOLS, build_default_registry
from codeedu.tools.crawler import CrawlHit, CrawlResult, FixtureCrawler, LiveCrawler, write_crawl_fixture
from codeedu.tools.files import WorkspaceFiles, file_io
from codeedu.tools.registry import ToolDescriptor, ToolParam, ToolRegistry
from codeedu.tools.research import DeepResearch


def make_registry() -> ToolRegistry:
    registry = ToolRegistry()
    registry.register(
        ToolDescriptor(
            name="adder",
            description="adds",
            params=(ToolParam("a", "integer"), ToolParam("b", "integer"), ToolParam("label", "string", required=False)),
        ),
        lambda a, b, label="": {"sum": a + b, "label": label},
    )
    return registry


def test_invoke_happy_path() -> None:
    assert make_registry().invoke("adder", {"a": 2, "b": 3}) == {"sum": 5, "label": ""}


def test_unknown_tool() -> None:
    with pytest.raises(UnknownToolError):
        make_registry().invoke("nonexistent", {})


def test_schema_mismatches() -> None:
    registry = make_registry()
    with pytest.raises(SchemaMismatchError):
        registry.invoke("adder", {"a": 2})  # missing required
    with pytest.raises(SchemaMismatchError):
        registry.invoke("adder", {"a": 2, "b": 3, "extra": 1})
    with pytest.raises(SchemaMismatchError):
        registry.invoke("adder", {"a": "2", "b": 3})
    with pytest.raises(SchemaMismatchError):
        registry.invoke("adder", {"a": True, "b": 3})  # bool is not an integer here


def test_duplicate_tool_registration() -> None:
    registry = make_registry()
    with pytest.raises(ValueError):
        registry.register(ToolDescriptor(name="adder", description="again"), lambda: None)


def test_names_are_sorted() -> None:
    registry = make_registry()
    registry.register(ToolDescriptor(name="aaa", description=""), lambda: None)
    assert registry.names() == ("aaa", "adder")


# --- crawler ---


def test_fixture_crawler_round_trip(tmp_path: Path) -> None:
    write_crawl_fixture(
        tmp_path,
        "Python recursion",
        [
            {"url": "https://docs.example/rec", "title": "Recursion", "snippet": "s1", "fetched_text": "body one"},
            {"url": "https://blog.example/rec", "title": "More", "snippet": "s2", "fetched_text": "body two"},
        ],
    )
    crawler = FixtureCrawler(tmp_path)
    result = crawler.crawl("Python recursion")
    assert [h.rank for h in result.hits] == [1, 2]
    assert result.urls == ("https://docs.example/rec", "https://blog.example/rec")
    # fingerprint normalizes case and padding
    assert crawler.crawl("  python RECURSION ").urls == result.urls
    assert crawler.crawl("Python recursion", max_results=1).urls == ("https://docs.example/rec",)


def test_unknown_query_yields_empty_result(tmp_path: Path) -> None:
    result = FixtureCrawler(tmp_path).crawl("never recorded")
    assert result.hits == ()


def test_crawl_result_rejects_duplicate_ranks() -> None:
    hit = CrawlHit(rank=1, url="u", title="t", snippet="s", fetched_text="f")
    with pytest.raises(ValueError):
        CrawlResult(query="q", hits=(hit, hit))


def test_live_crawler_without_fetcher_is_a_typed_error() -> None:
    with pytest.raises(NetworkUnavailableError):
        LiveCrawler().crawl("anything")


# --- workspace files ---


def test_write_read_round_trip(tmp_path: Path) -> None:
    files = WorkspaceFiles(tmp_path / "ws")
    files.write("notes/today.md", "hello")
    assert files.read("notes/today.md") == "hello"
    assert files.exists("notes/today.md")
    assert not any(p.name.startswith(".tmp-write-") for p in (files.root / "notes").iterdir())


def test_path_escapes_are_refused(tmp_path: Path) -> None:
    files = WorkspaceFiles(tmp_path / "ws")
    with pytest.raises(PathEscapeError):
        files.write("../outside.txt", "x")
    with pytest.raises(PathEscapeError):
        files.read("/etc/hostname")
    outside = tmp_path / "target.txt"
    outside.write_text("secret")
    link = files.root / "link.txt"
    link.symlink_to(outside)
    with pytest.raises(PathEscapeError):
        files.read("link.txt")


def test_missing_file_error(tmp_path: Path) -> None:
    with pytest.raises(WorkspaceFileNotFoundError):
        WorkspaceFiles(tmp_path).read("ghost.txt")


def test_file_io_tool_modes(tmp_path: Path) -> None:
    files = WorkspaceFiles(tmp_path)
    assert file_io(files, "write", "a.txt", "body") == {"path": "a.txt"}
    assert file_io(files, "read", "a.txt") == {"path": "a.txt", "content": "body"}
    with pytest.raises(ValueError):
        file_io(files, "write", "b.txt", None)
    with pytest.raises(ValueError):
        file_io(files, "append", "a.txt", "x")


# --- deep research ---


class RecordingProvider:
    def __init__(self, reply: str) -> None:
        self.reply = reply
        self.seen: list = []

    def complete(self, binding, messages):
        self.seen.append(messages)
        from codeedu.llm.gateway import CompletionResult

        return CompletionResult(text=self.reply, finish_reason="stop")


def test_deep_research_embeds_context_and_question() -> None:
    provider = RecordingProvider("an answer")
    gateway = Gateway()
    gateway.register_provider("mock", provider)
    binding = ModelBinding(agent_role="tutor", provider_id="mock", model_name="m")
    answer = DeepResearch(gateway, binding).ask("CONTEXT-BLOB", "QUESTION-BLOB?")
    assert answer == "an answer"
    prompt = provider.seen[0][0].content
    assert "CONTEXT-BLOB" in prompt
    assert "QUESTION-BLOB?" in prompt


# --- stock registry ---


def test_default_registry_registers_all_four_tools(tmp_path: Path) -> None:
    gateway = Gateway()
    gateway.register_provider(
        "mock", MockProvider(ScriptedFixture([FixtureEntry(response="researched")]))
    )
    binding = ModelBinding(agent_role="tutor", provider_id="mock", model_name="m")
    write_crawl_fixture(tmp_path / "corpus", "loops", [{"url": "u1", "title": "t", "snippet": "s", "fetched_text": "f"}])
    registry = build_default_registry(
        tmp_path / "ws", gateway, binding, crawl_corpus=tmp_path / "corpus"
    )
    assert set(registry.names()) == set(ALL_TOOLS)

    hits = registry.invoke("web_crawler", {"query": "loops"})["hits"]
    assert hits[0]["url"] == "u1"

    registry.invoke("file_io", {"mode": "write", "path": "x.txt", "content": "1"})
    assert registry.invoke("file_io", {"mode": "read", "path": "x.txt"})["content"] == "1"

    run = registry.invoke("code_interpreter", {"source": "print(2 * 3)"})
    assert run["stdout"] == "6\n"
    assert run["exit_code"] == 0

    assert registry.invoke("deep_research", {"context": "c", "question": "q"}) == {"answer": "researched"}
