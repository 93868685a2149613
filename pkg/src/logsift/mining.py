"""Desk-scale log analytics: fingerprints, severity, time windows, job joins,
category/domain clustering, and helpers for the error-category taxonomy.

Everything here consumes parsed events. Functions only touch the attributes
``template_id``, ``severity``, ``timestamp``, ``host`` (and ``line_no`` for
reporting), so both ParsedEvent and the lightweight EventView loaded from a
JSONL file work.
"""

from __future__ import annotations

import csv
import math
import re
from bisect import bisect_right
from dataclasses import dataclass
from importlib import resources
from typing import Callable, Iterable, Mapping

import numpy as np

from .cluster import Dendrogram, ward_linkage
from .core import CLASSIFY_PRIORITY, Severity
from .errors import DataError


class NoTimestamps(DataError):
    """Temporal analysis needs at least one timestamped event."""


class OverlappingAllocations(DataError):
    """Two jobs claim the same node at the same time."""

    def __init__(self, offenders):
        self.offenders = tuple(offenders)
        first = ", ".join(
            f"{a} overlaps {b} on {node}" for a, b, node in self.offenders[:5]
        )
        super().__init__(f"exclusive-allocation violation: {first}")


_SEVERITY_PRIORITY_INDEX = {sev: i for i, sev in enumerate(CLASSIFY_PRIORITY)}
_SEVERITY_PRIORITY_INDEX[Severity.UNKNOWN] = len(CLASSIFY_PRIORITY)


@dataclass(frozen=True, slots=True)
class EventView:
    """Minimal event shape reloaded from a parsed-events JSONL file."""

    line_no: int
    template_id: str
    variables: dict[str, str]
    severity: Severity
    timestamp: float | None = None
    host: str | None = None


@dataclass(frozen=True, slots=True)
class FingerprintRow:
    template_id: str
    pattern: str
    count: int
    first_seen: float | None
    last_seen: float | None
    severity: Severity
    distinct_hosts: int


def fingerprint(events, patterns: Mapping[str, str] | None = None) -> list[FingerprintRow]:
    """Aggregate events into one row per template id.

    ``patterns`` maps template ids to their pattern strings (e.g. from a
    CompiledTemplateSet); ids without a known pattern fall back to the id
    itself. The row severity is the most severe one observed for the
    template. Rows come back sorted by descending count.
    """

    class _Agg:
        __slots__ = ("count", "first", "last", "severity", "hosts")

        def __init__(self):
            self.count = 0
            self.first = None
            self.last = None
            self.severity = Severity.UNKNOWN
            self.hosts = set()

    aggs: dict[str, _Agg] = {}
    for ev in events:
        agg = aggs.get(ev.template_id)
        if agg is None:
            agg = aggs[ev.template_id] = _Agg()
        agg.count += 1
        t = ev.timestamp
        if t is not None:
            if agg.first is None or t < agg.first:
                agg.first = t
            if agg.last is None or t > agg.last:
                agg.last = t
        if _SEVERITY_PRIORITY_INDEX[ev.severity] < _SEVERITY_PRIORITY_INDEX[agg.severity]:
            agg.severity = ev.severity
        if ev.host is not None:
            agg.hosts.add(ev.host)
    rows = [
        FingerprintRow(
            template_id=tid,
            pattern=(patterns or {}).get(tid, tid),
            count=agg.count,
            first_seen=agg.first,
            last_seen=agg.last,
            severity=agg.severity,
            distinct_hosts=len(agg.hosts),
        )
        for tid, agg in aggs.items()
    ]
    rows.sort(key=lambda r: (-r.count, r.template_id))
    return rows


def severity_distribution(events) -> list[tuple[Severity, int, float]]:
    """(severity, count, percent) rows, most frequent first."""
    counts: dict[Severity, int] = {}
    total = 0
    for ev in events:
        counts[ev.severity] = counts.get(ev.severity, 0) + 1
        total += 1
    rows = [
        (sev, count, 100.0 * count / total if total else 0.0)
        for sev, count in counts.items()
    ]
    rows.sort(key=lambda r: (-r[1], r[0].sort_key()))
    return rows


@dataclass(frozen=True)
class TemporalSeries:
    """Per-category counts over consecutive half-open windows [k*w, (k+1)*w)."""

    window_seconds: float
    window_starts: tuple[float, ...]
    categories: tuple[str, ...]
    counts: dict[str, tuple[int, ...]]

    def totals(self) -> tuple[int, ...]:
        return tuple(
            sum(self.counts[c][i] for c in self.categories)
            for i in range(len(self.window_starts))
        )


def temporal_histogram(
    events,
    window_seconds: float = 300.0,
    category: Callable[[object], str] | None = None,
) -> TemporalSeries:
    """Bucket timestamped events into fixed windows, zero-filling gaps.

    ``category`` maps an event to a series label; the default is the
    severity name. Events without timestamps are ignored; if none carry a
    timestamp, NoTimestamps is raised.
    """
    if window_seconds <= 0:
        raise ValueError("window_seconds must be positive")
    if category is None:
        category = lambda ev: ev.severity.value
    raw: dict[str, dict[int, int]] = {}
    k_min = k_max = None
    seen = False
    for ev in events:
        t = ev.timestamp
        if t is None:
            continue
        seen = True
        k = math.floor(t / window_seconds)
        if k_min is None or k < k_min:
            k_min = k
        if k_max is None or k > k_max:
            k_max = k
        label = category(ev)
        bucket = raw.setdefault(label, {})
        bucket[k] = bucket.get(k, 0) + 1
    if not seen:
        raise NoTimestamps("no event carries a timestamp")
    categories = tuple(sorted(raw))
    ks = range(k_min, k_max + 1)
    counts = {
        label: tuple(raw[label].get(k, 0) for k in ks) for label in categories
    }
    return TemporalSeries(
        window_seconds=float(window_seconds),
        window_starts=tuple(k * float(window_seconds) for k in ks),
        categories=categories,
        counts=counts,
    )


def category_cdf(series: TemporalSeries) -> dict[str, tuple[float, ...]]:
    """Cumulative fraction per category; monotone, ends at exactly 1.0."""
    out = {}
    for label in series.categories:
        values = series.counts[label]
        total = sum(values)
        running = 0
        curve = []
        for v in values:
            running += v
            curve.append(running / total)
        out[label] = tuple(curve)
    return out


@dataclass(frozen=True, slots=True)
class JobRecord:
    job_id: str
    account: str
    nodes: frozenset[str]
    start: float
    end: float

    def __post_init__(self):
        if not self.nodes:
            raise ValueError(f"job {self.job_id} has no nodes")
        if not self.start < self.end:
            raise ValueError(f"job {self.job_id} has start >= end")


_RANGE_RE = re.compile(r"^(.*?)\[([0-9,\-]+)\]$")


def expand_nodelist(spec: str) -> list[str]:
    """Expand ``nid[0001-0004,0007]``-style node expressions.

    Accepts comma-separated expressions; commas inside brackets delimit
    ranges. Zero padding of the range bounds is preserved.
    """
    out: list[str] = []
    depth = 0
    part = []
    parts = []
    for ch in spec:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(part))
            part = []
        else:
            part.append(ch)
    parts.append("".join(part))
    for expr in parts:
        expr = expr.strip()
        if not expr:
            continue
        m = _RANGE_RE.match(expr)
        if m is None:
            out.append(expr)
            continue
        prefix, body = m.group(1), m.group(2)
        for piece in body.split(","):
            if "-" in piece:
                lo, hi = piece.split("-", 1)
                width = len(lo)
                for v in range(int(lo), int(hi) + 1):
                    out.append(f"{prefix}{v:0{width}d}")
            else:
                out.append(f"{prefix}{piece}")
    return out


def read_jobs_csv(path: str) -> list[JobRecord]:
    """Read ``job_id,account,start_epoch,end_epoch,node_list`` rows."""
    jobs = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            if row[0].strip().lower() == "job_id":
                continue
            if len(row) < 5:
                raise DataError(f"jobs row needs 5 fields: {row!r}")
            job_id, account, start, end, nodelist = (f.strip() for f in row[:5])
            jobs.append(
                JobRecord(
                    job_id=job_id,
                    account=account,
                    nodes=frozenset(expand_nodelist(nodelist)),
                    start=float(start),
                    end=float(end),
                )
            )
    return jobs


def validate_jobs(jobs: Iterable[JobRecord]) -> None:
    """Check the exclusive-allocation invariant; raise on any overlap."""
    per_node: dict[str, list[tuple[float, float, str]]] = {}
    for job in jobs:
        for node in job.nodes:
            per_node.setdefault(node, []).append((job.start, job.end, job.job_id))
    offenders = []
    for node, intervals in per_node.items():
        intervals.sort()
        for prev, curr in zip(intervals, intervals[1:]):
            if curr[0] < prev[1]:
                offenders.append((prev[2], curr[2], node))
    if offenders:
        raise OverlappingAllocations(sorted(offenders))


@dataclass(frozen=True, slots=True)
class JoinedEvent:
    event: object
    job_id: str | None
    account: str | None

    @property
    def matched(self) -> bool:
        return self.job_id is not None


def join_jobs(events, jobs: Iterable[JobRecord]) -> list[JoinedEvent]:
    """Join each event to the unique job holding its node at its timestamp.

    Jobs are validated for exclusive allocation first. An event joins job J
    when event.host is one of J's nodes and J.start <= t < J.end; events
    with no such job (or without host/timestamp) are flagged, not dropped.
    """
    jobs = list(jobs)
    validate_jobs(jobs)
    index: dict[str, list[tuple[float, float, str, str]]] = {}
    for job in jobs:
        for node in job.nodes:
            index.setdefault(node, []).append(
                (job.start, job.end, job.job_id, job.account)
            )
    starts: dict[str, list[float]] = {}
    for node, intervals in index.items():
        intervals.sort()
        starts[node] = [iv[0] for iv in intervals]
    out = []
    for ev in events:
        job_id = account = None
        host, t = ev.host, ev.timestamp
        if host is not None and t is not None and host in index:
            intervals = index[host]
            i = bisect_right(starts[host], t) - 1
            if i >= 0:
                start, end, jid, acct = intervals[i]
                if start <= t < end:
                    job_id, account = jid, acct
        out.append(JoinedEvent(event=ev, job_id=job_id, account=account))
    return out


class CategoryRules:
    """First-match keyword rules mapping a pattern string to a category id.

    File format: ``ID<TAB>name<TAB>pattern`` where the pattern is one or
    more lowercase substrings joined by ``&`` (all must occur). Unmatched
    patterns map to the reserved id ``ZZ`` ("Other").
    """

    FALLBACK_ID = "ZZ"
    FALLBACK_NAME = "Other"

    def __init__(self, rules: list[tuple[str, str, tuple[str, ...]]]):
        self._rules = list(rules)
        self._names = {cid: name for cid, name, _ in rules}
        self._names.setdefault(self.FALLBACK_ID, self.FALLBACK_NAME)

    @classmethod
    def from_text(cls, text: str) -> "CategoryRules":
        rules = []
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise ValueError(f"bad category rule on line {ln}: {line!r}")
            cid, name, pattern = (f.strip() for f in fields)
            subs = tuple(s.strip().lower() for s in pattern.split("&") if s.strip())
            if not cid or not subs:
                raise ValueError(f"bad category rule on line {ln}: {line!r}")
            rules.append((cid, name, subs))
        return cls(rules)

    @classmethod
    def load(cls, path) -> "CategoryRules":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    @property
    def ids(self) -> tuple[str, ...]:
        seen = dict.fromkeys(cid for cid, _, _ in self._rules)
        return tuple(seen)

    def name_of(self, cid: str) -> str:
        return self._names.get(cid, self.FALLBACK_NAME)

    def categorize(self, pattern: str) -> str:
        low = pattern.lower()
        for cid, _, subs in self._rules:
            if all(sub in low for sub in subs):
                return cid
        return self.FALLBACK_ID


_DEFAULT_CATEGORY_RULES: CategoryRules | None = None


def default_category_rules() -> CategoryRules:
    global _DEFAULT_CATEGORY_RULES
    if _DEFAULT_CATEGORY_RULES is None:
        text = (
            resources.files("logsift.data")
            .joinpath("category_rules.tsv")
            .read_text(encoding="utf-8")
        )
        _DEFAULT_CATEGORY_RULES = CategoryRules.from_text(text)
    return _DEFAULT_CATEGORY_RULES


def categorize(pattern: str, rules: CategoryRules | None = None) -> str:
    """Category id for one pattern string; ``ZZ`` when nothing matches."""
    return (rules or default_category_rules()).categorize(pattern)


@dataclass(frozen=True)
class CategoryDomainMatrix:
    """Counts of (log category, science domain) pairs."""

    rows: tuple[str, ...]  # category ids
    cols: tuple[str, ...]  # domains
    cells: np.ndarray  # (len(rows), len(cols)) non-negative counts

    def __post_init__(self):
        if self.cells.shape != (len(self.rows), len(self.cols)):
            raise ValueError("cells shape does not match labels")


def build_category_domain_matrix(
    joined_events,
    patterns: Mapping[str, str],
    rules: CategoryRules | None = None,
) -> CategoryDomainMatrix:
    """Count joined events by (category of their pattern, job domain)."""
    rules = rules or default_category_rules()
    counts: dict[tuple[str, str], int] = {}
    cat_cache: dict[str, str] = {}
    for je in joined_events:
        if not je.matched:
            continue
        tid = je.event.template_id
        cat = cat_cache.get(tid)
        if cat is None:
            cat = cat_cache[tid] = rules.categorize(patterns.get(tid, tid))
        key = (cat, je.account)
        counts[key] = counts.get(key, 0) + 1
    if not counts:
        raise DataError("no joined events to tabulate")
    rows = tuple(sorted({cat for cat, _ in counts}))
    cols = tuple(sorted({dom for _, dom in counts}))
    cells = np.zeros((len(rows), len(cols)), dtype=np.int64)
    row_pos = {r: i for i, r in enumerate(rows)}
    col_pos = {c: j for j, c in enumerate(cols)}
    for (cat, dom), n in counts.items():
        cells[row_pos[cat], col_pos[dom]] = n
    return CategoryDomainMatrix(rows=rows, cols=cols, cells=cells)


@dataclass(frozen=True)
class ClusteredMatrix:
    matrix: CategoryDomainMatrix
    row_order: tuple[int, ...]
    col_order: tuple[int, ...]
    row_dendrogram: Dendrogram
    col_dendrogram: Dendrogram

    def reordered_cells(self) -> np.ndarray:
        return self.matrix.cells[np.ix_(self.row_order, self.col_order)]


def ward_cluster(matrix: CategoryDomainMatrix) -> ClusteredMatrix:
    """Ward-cluster rows and columns independently on log10(1+count).

    The log transform compresses the many-orders-of-magnitude spread of log
    volumes so clustering follows the same structure the heatmap color scale
    shows. Counts themselves are only permuted, never altered.
    """
    if matrix.cells.size == 0:
        raise ValueError("matrix must be non-empty")
    transformed = np.log10(1.0 + matrix.cells.astype(float))
    row_dendro = ward_linkage(transformed)
    col_dendro = ward_linkage(transformed.T)
    return ClusteredMatrix(
        matrix=matrix,
        row_order=row_dendro.leaf_order,
        col_order=col_dendro.leaf_order,
        row_dendrogram=row_dendro,
        col_dendrogram=col_dendro,
    )
