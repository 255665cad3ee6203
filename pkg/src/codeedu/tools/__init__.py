"""Tool pool: registry plus the four stock tools."""

from __future__ import annotations

from pathlib import Path

from codeedu.llm.gateway import Gateway, ModelBinding
from codeedu.tools.crawler import FixtureCrawler, LiveCrawler
from codeedu.tools.files import WorkspaceFiles, file_io
from codeedu.tools.registry import ToolDescriptor, ToolParam, ToolRegistry
from codeedu.tools.research import DeepResearch
from codeedu.tools.sandbox import SandboxPolicy, execute_code

TOOL_WEB_CRAWLER = "web_crawler"
TOOL_FILE_IO = "file_io"
TOOL_CODE_INTERPRETER = "code_interpreter"
TOOL_DEEP_RESEARCH = "deep_research"

ALL_TOOLS = (TOOL_WEB_CRAWLER, TOOL_FILE_IO, TOOL_CODE_INTERPRETER, TOOL_DEEP_RESEARCH)


def build_default_registry(
    workspace_root: str | Path,
    gateway: Gateway,
    research_binding: ModelBinding,
    crawl_corpus: str | Path | None = None,
    sandbox_policy: SandboxPolicy | None = None,
    live_fetcher=None,
    crawl_observer=None,
) -> ToolRegistry:
    """Assemble the stock tool pool for one workspace.

    The crawler answers from the fixture corpus when a corpus dir is given,
    otherwise from the injected live fetcher. crawl_observer, when set, sees
    every crawl result dict; the session layer uses it to ground material
    source references in what was actually fetched.
    """
    workspace_root = Path(workspace_root)
    registry = ToolRegistry()
    files = WorkspaceFiles(workspace_root)
    crawler = FixtureCrawler(crawl_corpus) if crawl_corpus is not None else LiveCrawler(live_fetcher)
    research = DeepResearch(gateway, research_binding)
    policy = sandbox_policy or SandboxPolicy()
    scratch_root = workspace_root / "sandbox"

    def run_crawl(query: str, max_results: int = 5) -> dict:
        result = crawler.crawl(query, max_results)
        payload = {
            "query": result.query,
            "hits": [
                {
                    "rank": h.rank,
                    "url": h.url,
                    "title": h.title,
                    "snippet": h.snippet,
                    "fetched_text": h.fetched_text,
                }
                for h in result.hits
            ],
        }
        if crawl_observer is not None:
            crawl_observer(payload)
        return payload

    def run_code(source: str, stdin: str = "") -> dict:
        run = execute_code(source, stdin, policy=policy, scratch_root=scratch_root)
        return {
            "stdout": run.stdout,
            "stderr": run.stderr,
            "exit_code": run.exit_code,
            "timed_out": run.timed_out,
            "memory_exceeded": run.memory_exceeded,
        }

    registry.register(
        ToolDescriptor(
            name=TOOL_WEB_CRAWLER,
            description="Search the document corpus and return ranked pages with fetched text.",
            params=(ToolParam("query", "string"), ToolParam("max_results", "integer", required=False)),
        ),
        run_crawl,
    )
    registry.register(
        ToolDescriptor(
            name=TOOL_FILE_IO,
            description="Read or write a file inside the session workspace.",
            params=(
                ToolParam("mode", "string"),
                ToolParam("path", "string"),
                ToolParam("content", "string", required=False),
            ),
        ),
        lambda mode, path, content=None: file_io(files, mode, path, content),
    )
    registry.register(
        ToolDescriptor(
            name=TOOL_CODE_INTERPRETER,
            description="Execute Python 3 source in an isolated sandbox and capture its output.",
            params=(ToolParam("source", "string"), ToolParam("stdin", "string", required=False)),
        ),
        run_code,
    )
    registry.register(
        ToolDescriptor(
            name=TOOL_DEEP_RESEARCH,
            description="Answer a focused question grounded in the supplied context.",
            params=(ToolParam("context", "string"), ToolParam("question", "string")),
        ),
        lambda context, question: {"answer": research.ask(context, question)},
    )
    return registry
