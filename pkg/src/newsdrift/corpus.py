"""News corpus ingestion and per-year indexing.

Input is JSON Lines, one article per line. An article is accepted only if
its headline or subheader mentions China (or Chinese); rejected rows are
counted by reason. Per-year id lists are kept sorted so the index is
invariant to input line order.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

from .errors import CorpusError

log = logging.getLogger(__name__)

_CRITERION = re.compile(r"\bchina\b|\bchinese\b", re.IGNORECASE)

REJECT_REASONS = ("criterion", "year_out_of_range", "empty_full_text", "malformed")


@dataclass(frozen=True)
class Article:
    article_id: str
    year: int
    source: str
    headline: str
    subheader: str = ""
    category: str = ""
    full_text: str = ""


@dataclass(frozen=True)
class CorpusConfig:
    year_min: int = 2005
    year_max: int = 2025
    headline_only: bool = False
    reject_warn_fraction: float = 0.10


@dataclass
class IngestReport:
    accepted: int = 0
    rejected: dict = None

    def __post_init__(self):
        if self.rejected is None:
            self.rejected = {reason: 0 for reason in REJECT_REASONS}

    @property
    def total(self) -> int:
        return self.accepted + sum(self.rejected.values())


class CorpusIndex:
    def __init__(self, store: dict[str, Article]):
        self.store = store
        self.by_year: dict[int, list[str]] = {}
        for article in store.values():
            self.by_year.setdefault(article.year, []).append(article.article_id)
        for ids in self.by_year.values():
            ids.sort()

    def __len__(self) -> int:
        return len(self.store)

    def years(self) -> list[int]:
        return sorted(self.by_year)

    def get(self, article_id: str) -> Article:
        try:
            return self.store[article_id]
        except KeyError:
            raise CorpusError(f"article id not in index: {article_id!r}") from None


def satisfies_criterion(headline: str, subheader: str) -> bool:
    return bool(_CRITERION.search(headline) or _CRITERION.search(subheader))


def ingest(path: str | Path, config: CorpusConfig | None = None) -> tuple[CorpusIndex, IngestReport]:
    config = config or CorpusConfig()
    report = IngestReport()
    store: dict[str, Article] = {}
    if not Path(path).is_file():
        raise CorpusError(f"corpus file not found: {path}")
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
                article = Article(
                    article_id=str(doc["article_id"]),
                    year=int(doc["year"]),
                    source=str(doc["source"]),
                    headline=str(doc["headline"]),
                    subheader=str(doc.get("subheader") or ""),
                    category=str(doc.get("category") or ""),
                    full_text=str(doc.get("full_text") or ""),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                report.rejected["malformed"] += 1
                log.warning("skipping corpus line %d (%s)", lineno, exc)
                continue
            if article.article_id in store:
                raise CorpusError(f"duplicate article_id {article.article_id!r} at line {lineno}")
            if not satisfies_criterion(article.headline, article.subheader):
                report.rejected["criterion"] += 1
                continue
            if not (config.year_min <= article.year <= config.year_max):
                report.rejected["year_out_of_range"] += 1
                continue
            if not article.full_text.strip() and not config.headline_only:
                report.rejected["empty_full_text"] += 1
                continue
            store[article.article_id] = article
            report.accepted += 1
    if report.total and sum(report.rejected.values()) > config.reject_warn_fraction * report.total:
        log.warning(
            "corpus rejects exceed %.0f%%: %s of %s rows",
            config.reject_warn_fraction * 100,
            sum(report.rejected.values()),
            report.total,
        )
    return CorpusIndex(store), report


def articles_for_year(index: CorpusIndex, year: int) -> list[str]:
    return list(index.by_year.get(year, []))


def corpus_stats(index: CorpusIndex) -> dict:
    if not index.store:
        raise CorpusError("cannot compute statistics for an empty corpus")
    total = len(index.store)
    by_source: dict[str, int] = {}
    by_year: dict[int, int] = {}
    by_category: dict[str, int] = {}
    for article in index.store.values():
        by_source[article.source] = by_source.get(article.source, 0) + 1
        by_year[article.year] = by_year.get(article.year, 0) + 1
        key = article.category or "uncategorized"
        by_category[key] = by_category.get(key, 0) + 1
    source_pct = {
        source: round(100.0 * count / total, 2)
        for source, count in sorted(by_source.items())
    }
    return {
        "total": total,
        "source_pct": source_pct,
        "year_counts": {str(y): by_year[y] for y in sorted(by_year)},
        "category_counts": dict(sorted(by_category.items())),
    }
