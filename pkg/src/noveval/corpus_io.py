"""Parsers and writers for run files, relevance judgments, and topic metadata.

File formats:
  run file   - 6 whitespace-separated columns per line:
               query-id  dummy  doc-id  rank  score  system-id
               The dummy column is read and discarded; lines starting with
               "#" and blank lines are skipped.
  judgments  - 4 whitespace-separated columns per line:
               query-id  iter  doc-id  grade
               The iter column is ignored; the integer grade is translated
               through a configurable grade map.
  topics     - SGML-style <TOPIC> elements containing <TOPIC-ID>,
               <DESCRIPTION> and <NARRATIVE>.

All parsed structures are immutable after construction and safe to share
across threads.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping

from .errors import ConfigError, ParseError, ValidationError


def _check_token(value: str, what: str) -> str:
    if not value or any(ch.isspace() for ch in value):
        raise ValidationError(f"{what} must be a non-empty token without whitespace: {value!r}")
    return value


@dataclass(frozen=True)
class RunEntry:
    """One retrieved document: (query, doc) at a 1-based rank with a system score."""

    query: str
    doc: str
    rank: int
    score: float
    system: str


class RunSet:
    """All ranked retrieval results, grouped by (system, query).

    Within each (system, query) group, ranks are exactly 1..n with no gaps
    or duplicates and document ids are unique. Construction validates this;
    instances are immutable afterward.
    """

    def __init__(self, entries: Iterable[RunEntry], strict_scores: bool = False):
        groups: dict[tuple[str, str], dict[int, RunEntry]] = {}
        for e in entries:
            key = (e.system, e.query)
            group = groups.setdefault(key, {})
            if e.rank in group:
                raise ValidationError(
                    f"duplicate rank {e.rank} for system {e.system!r}, query {e.query!r}"
                )
            group[e.rank] = e
        self._groups: dict[tuple[str, str], tuple[RunEntry, ...]] = {}
        for (system, query), by_rank in groups.items():
            n = len(by_rank)
            if set(by_rank) != set(range(1, n + 1)):
                missing = sorted(set(range(1, n + 1)) - set(by_rank))
                raise ValidationError(
                    f"ranks for system {system!r}, query {query!r} are not contiguous "
                    f"1..{n} (missing {missing[:5]})"
                )
            ordered = tuple(by_rank[r] for r in range(1, n + 1))
            seen_docs: set[str] = set()
            for e in ordered:
                if e.doc in seen_docs:
                    raise ValidationError(
                        f"duplicate document {e.doc!r} for system {system!r}, query {query!r}"
                    )
                seen_docs.add(e.doc)
            if strict_scores:
                for a, b in zip(ordered, ordered[1:]):
                    if b.score > a.score:
                        raise ValidationError(
                            f"score increases from rank {a.rank} to {b.rank} for system "
                            f"{system!r}, query {query!r} (strict mode)"
                        )
            self._groups[(system, query)] = ordered

    def systems(self) -> list[str]:
        return sorted({s for s, _ in self._groups})

    def queries(self) -> list[str]:
        return sorted({q for _, q in self._groups})

    def has_system(self, system: str) -> bool:
        return any(s == system for s, _ in self._groups)

    def entries(self) -> Iterator[RunEntry]:
        """All entries in deterministic (system, query, rank) order."""
        for key in sorted(self._groups):
            yield from self._groups[key]

    def group(self, system: str, query: str) -> tuple[RunEntry, ...]:
        return self._groups.get((system, query), ())

    def ranking(self, system: str, query: str, depth: int | None = None) -> dict[str, int]:
        """Document -> rank map for one (system, query), truncated to `depth`."""
        entries = self._groups.get((system, query), ())
        if depth is not None:
            entries = entries[:depth]
        return {e.doc: e.rank for e in entries}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RunSet):
            return NotImplemented
        return self._groups == other._groups

    def __len__(self) -> int:
        return sum(len(g) for g in self._groups.values())


class Relevance(Enum):
    RELEVANT = "relevant"
    PARTIALLY_RELEVANT = "partially_relevant"
    IRRELEVANT = "irrelevant"


#: Community-conventional integer grades for the three-level scale.
DEFAULT_GRADE_MAP: dict[int, Relevance] = {
    2: Relevance.RELEVANT,
    1: Relevance.PARTIALLY_RELEVANT,
    0: Relevance.IRRELEVANT,
}


class JudgmentSet:
    """Graded relevance assessments; absence of a (query, doc) pair means unjudged."""

    def __init__(self, grades: Mapping[tuple[str, str], Relevance]):
        self._grades = dict(grades)

    def grade(self, query: str, doc: str) -> Relevance | None:
        return self._grades.get((query, doc))

    def queries(self) -> list[str]:
        return sorted({q for q, _ in self._grades})

    def relevant_docs(self, query: str, include_partial: bool = False) -> set[str]:
        wanted = {Relevance.RELEVANT}
        if include_partial:
            wanted.add(Relevance.PARTIALLY_RELEVANT)
        return {d for (q, d), g in self._grades.items() if q == query and g in wanted}

    def items(self) -> Iterator[tuple[str, str, Relevance]]:
        for (q, d) in sorted(self._grades):
            yield q, d, self._grades[(q, d)]

    def __len__(self) -> int:
        return len(self._grades)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JudgmentSet):
            return NotImplemented
        return self._grades == other._grades


@dataclass(frozen=True)
class TopicMeta:
    query: str
    description: str
    narrative: str


def _iter_records(stream: IO[str], n_cols: int) -> Iterator[tuple[int, list[str]]]:
    """Yield (line_number, fields) for every data line; skip blanks and # comments."""
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) != n_cols:
            raise ParseError(
                f"expected {n_cols} whitespace-separated fields, got {len(fields)}", lineno
            )
        yield lineno, fields


def parse_run_file(stream: IO[str], strict_scores: bool = False) -> RunSet:
    """Parse a 6-column run file; may contain any number of systems."""
    entries = list(iter_run_entries(stream))
    return RunSet(entries, strict_scores=strict_scores)


def iter_run_entries(stream: IO[str]) -> Iterator[RunEntry]:
    seen: set[tuple[str, str, str]] = set()
    for lineno, fields in _iter_records(stream, 6):
        query, _dummy, doc, rank_s, score_s, system = fields
        try:
            rank = int(rank_s)
        except ValueError:
            raise ParseError(f"rank is not an integer: {rank_s!r}", lineno) from None
        if rank < 1:
            raise ParseError(f"rank must be >= 1, got {rank}", lineno)
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(f"score is not a number: {score_s!r}", lineno) from None
        if not math.isfinite(score):
            raise ParseError(f"score is not finite: {score_s!r}", lineno)
        key = (system, query, doc)
        if key in seen:
            raise ValidationError(
                f"duplicate document {doc!r} for system {system!r}, query {query!r} "
                f"(line {lineno})"
            )
        seen.add(key)
        yield RunEntry(query=query, doc=doc, rank=rank, score=score, system=system)


def parse_judgments(stream: IO[str], grade_map: Mapping[int, Relevance] | None = None) -> JudgmentSet:
    """Parse a 4-column judgment file through `grade_map` (default 2/1/0)."""
    if grade_map is None:
        grade_map = DEFAULT_GRADE_MAP
    grades: dict[tuple[str, str], Relevance] = {}
    for lineno, fields in _iter_records(stream, 4):
        query, _iter, doc, grade_s = fields
        try:
            grade_val = int(grade_s)
        except ValueError:
            raise ParseError(f"grade is not an integer: {grade_s!r}", lineno) from None
        if grade_val not in grade_map:
            raise ConfigError(
                f"line {lineno}: grade value {grade_val} has no mapping "
                f"(known: {sorted(grade_map)})"
            )
        grade = grade_map[grade_val]
        key = (query, doc)
        if key in grades and grades[key] is not grade:
            raise ValidationError(
                f"conflicting grades for query {query!r}, doc {doc!r} (line {lineno})"
            )
        grades[key] = grade
    return JudgmentSet(grades)


_TOPIC_RE = re.compile(r"<TOPIC>(.*?)</TOPIC>", re.DOTALL)


def _tag_content(block: str, tag: str, required: bool) -> str:
    open_t, close_t = f"<{tag}>", f"</{tag}>"
    start = block.find(open_t)
    if start == -1:
        if required:
            raise ParseError(f"missing <{tag}> element")
        return ""
    end = block.find(close_t, start)
    if end == -1:
        raise ParseError(f"unclosed <{tag}> element")
    return " ".join(block[start + len(open_t):end].split())


def parse_topics(stream: IO[str], lenient: bool = False) -> list[TopicMeta]:
    """Parse SGML-style topic elements, preserving document order."""
    text = stream.read()
    blocks = _TOPIC_RE.findall(text)
    if text.count("<TOPIC>") != len(blocks):
        raise ParseError("unclosed <TOPIC> element")
    topics = []
    for block in blocks:
        query = _tag_content(block, "TOPIC-ID", required=True)
        description = _tag_content(block, "DESCRIPTION", required=False)
        narrative = _tag_content(block, "NARRATIVE", required=False)
        if not query:
            raise ParseError("empty <TOPIC-ID> element")
        if not description and not lenient:
            raise ParseError(f"topic {query!r} has an empty description (lenient mode off)")
        topics.append(TopicMeta(query=query, description=description, narrative=narrative))
    return topics


def write_run_file(runs: RunSet, sink: IO[str]) -> None:
    """Emit the 6-column format with dummy column "0" and 6-decimal scores."""
    for e in runs.entries():
        _check_token(e.query, "query id")
        _check_token(e.doc, "doc id")
        _check_token(e.system, "system id")
        sink.write(f"{e.query} 0 {e.doc} {e.rank} {e.score:.6f} {e.system}\n")


#: Inverse of DEFAULT_GRADE_MAP, used when serializing judgments.
DEFAULT_GRADE_VALUES: dict[Relevance, int] = {
    Relevance.RELEVANT: 2,
    Relevance.PARTIALLY_RELEVANT: 1,
    Relevance.IRRELEVANT: 0,
}


def write_judgments(
    judgments: JudgmentSet,
    sink: IO[str],
    grade_values: Mapping[Relevance, int] | None = None,
) -> None:
    """Emit the 4-column judgment format with iter column "0"."""
    if grade_values is None:
        grade_values = DEFAULT_GRADE_VALUES
    for query, doc, grade in judgments.items():
        sink.write(f"{query} 0 {doc} {grade_values[grade]}\n")


def load_runs(path: str | Path, strict_scores: bool = False) -> RunSet:
    """Load runs from a single file or from every regular file in a directory."""
    path = Path(path)
    entries: list[RunEntry] = []
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.is_file())
        if not files:
            raise ConfigError(f"runs directory {path} contains no files")
    else:
        files = [path]
    for f in files:
        with open(f, "r", encoding="utf-8") as fh:
            try:
                entries.extend(iter_run_entries(fh))
            except ParseError as exc:
                raise ParseError(f"{f.name}: {exc}") from exc
    return RunSet(entries, strict_scores=strict_scores)


def load_judgments(path: str | Path, grade_map: Mapping[int, Relevance] | None = None) -> JudgmentSet:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_judgments(fh, grade_map)
