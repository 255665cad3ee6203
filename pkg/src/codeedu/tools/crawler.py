"""Web crawling behind an offline-first fixture corpus.

The corpus is a directory of JSON files, one per query fingerprint, so
tests and scripted eval runs never touch the network. A live fetcher can
be injected where real crawling is wanted; without one, live mode is a
typed error instead of a silent empty result.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from codeedu.errors import NetworkUnavailableError


@dataclass(frozen=True)
class CrawlHit:
    rank: int
    url: str
    title: str
    snippet: str
    fetched_text: str


@dataclass(frozen=True)
class CrawlResult:
    query: str
    hits: tuple[CrawlHit, ...]

    def __post_init__(self) -> None:
        ranks = [h.rank for h in self.hits]
        if len(set(ranks)) != len(ranks):
            raise ValueError("crawl hits must have unique ranks")

    @property
    def urls(self) -> tuple[str, ...]:
        return tuple(h.url for h in self.hits)


def query_fingerprint(query: str) -> str:
    return hashlib.sha256(query.strip().lower().encode()).hexdigest()[:16]


class FixtureCrawler:
    """Crawler that answers only from the on-disk corpus."""

    def __init__(self, corpus_dir: str | Path) -> None:
        self.corpus_dir = Path(corpus_dir)

    def crawl(self, query: str, max_results: int = 5) -> CrawlResult:
        if max_results <= 0:
            raise ValueError("max_results must be positive")
        path = self.corpus_dir / f"{query_fingerprint(query)}.json"
        if not path.is_file():
            return CrawlResult(query=query, hits=())
        payload = json.loads(path.read_text())
        hits = tuple(
            CrawlHit(
                rank=index + 1,
                url=item["url"],
                title=item.get("title", ""),
                snippet=item.get("snippet", ""),
                fetched_text=item.get("fetched_text", ""),
            )
            for index, item in enumerate(payload.get("results", [])[:max_results])
        )
        return CrawlResult(query=query, hits=hits)


def write_crawl_fixture(corpus_dir: str | Path, query: str, results: Sequence[dict]) -> Path:
    """Record a corpus entry; used by tests and dataset preparation."""
    corpus_dir = Path(corpus_dir)
    corpus_dir.mkdir(parents=True, exist_ok=True)
    path = corpus_dir / f"{query_fingerprint(query)}.json"
    path.write_text(json.dumps({"query": query, "results": list(results)}, indent=2))
    return path


class LiveCrawler:
    """Thin shell around an injected fetcher for online deployments."""

    def __init__(self, fetcher: Callable[[str, int], CrawlResult] | None = None) -> None:
        self._fetcher = fetcher

    def crawl(self, query: str, max_results: int = 5) -> CrawlResult:
        if self._fetcher is None:
            raise NetworkUnavailableError(
                "live crawling needs an injected fetcher; use FixtureCrawler for offline runs"
            )
        return self._fetcher(query, max_results)
