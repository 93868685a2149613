"""Stage 3: compile templates, bind raw lines to them, compute coverage.

Matching is token-wise: runs of spaces/tabs collapse to single token
boundaries, a pure-literal template word must equal the message token
exactly, and each placeholder consumes exactly one whitespace-delimited
token (or, inside a word like ``(<id>)``, the non-empty span up to the next
literal fragment, leftmost-shortest). When several templates match a line,
the one with the most pure-literal words wins; ties go to the
lexicographically smallest template id so results never depend on
insertion order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    LogTemplate,
    ParsedEvent,
    Placeholder,
    RawLogRecord,
    SeverityRules,
    classify_severity,
    parse_template,
)
from .errors import DataError

_WILDCARD = ""


class EmptyTemplateSet(DataError):
    """compile_templates() needs at least one template."""


@dataclass(frozen=True, slots=True)
class _CompiledTemplate:
    template: LogTemplate
    # one entry per whitespace word: a str for pure literals, else a tuple of
    # ("l", text) / ("p", name) segments
    words: tuple
    specificity: int


def _compile_word(word: str):
    tokens = parse_template(word).tokens
    if len(tokens) == 1 and not isinstance(tokens[0], Placeholder):
        return word
    return tuple(
        ("p", t.name) if isinstance(t, Placeholder) else ("l", t.text) for t in tokens
    )


def _match_word(segments, token: str, bindings: dict[str, str]) -> bool:
    pos = 0
    end = len(token)
    last = len(segments) - 1
    for i, (kind, text) in enumerate(segments):
        if kind == "l":
            if not token.startswith(text, pos):
                return False
            pos += len(text)
        else:
            if i == last:
                value = token[pos:]
                pos = end
            else:
                nxt = segments[i + 1][1]
                j = token.find(nxt, pos + 1)
                if j < 0:
                    return False
                value = token[pos:j]
                pos = j
            if not value:
                return False
            bound = bindings.get(text)
            if bound is None:
                bindings[text] = value
            elif bound != value:
                return False
    return pos == end


@dataclass(frozen=True)
class CompiledTemplateSet:
    """Immutable, shareable matcher over a deduplicated template set."""

    templates: tuple[LogTemplate, ...]
    _index: dict = field(repr=False)
    _by_id: dict = field(repr=False)

    def pattern_of(self, template_id: str) -> str | None:
        entry = self._by_id.get(template_id)
        return entry.template.raw if entry else None

    def candidates(self, first_token: str, n_tokens: int):
        lit = self._index.get((first_token, n_tokens))
        wild = self._index.get((_WILDCARD, n_tokens))
        if lit is None:
            return wild or ()
        if wild is None:
            return lit
        merged = list(lit) + list(wild)
        merged.sort(key=lambda c: (-c.specificity, c.template.id))
        return merged


def compile_templates(templates) -> CompiledTemplateSet:
    """Build the match index; duplicates (same id) collapse to one entry."""
    by_id: dict[str, _CompiledTemplate] = {}
    for tmpl in templates:
        if tmpl.id in by_id:
            continue
        words = tuple(_compile_word(w) for w in tmpl.raw.split())
        specificity = sum(1 for w in words if isinstance(w, str))
        by_id[tmpl.id] = _CompiledTemplate(tmpl, words, specificity)
    if not by_id:
        raise EmptyTemplateSet("no templates to compile")
    index: dict[tuple[str, int], list[_CompiledTemplate]] = {}
    for entry in by_id.values():
        first = entry.words[0]
        bucket_key = (first if isinstance(first, str) else _WILDCARD, len(entry.words))
        index.setdefault(bucket_key, []).append(entry)
    for bucket in index.values():
        bucket.sort(key=lambda c: (-c.specificity, c.template.id))
    ordered = tuple(
        e.template for e in sorted(by_id.values(), key=lambda c: c.template.id)
    )
    return CompiledTemplateSet(templates=ordered, _index=index, _by_id=by_id)


def load_templates_file(path: str) -> list[LogTemplate]:
    """Read a templates file: one template per line, ``#`` comments."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            out.append(parse_template(line))
    return out


def _match_tokens(cset: CompiledTemplateSet, tokens: list[str]):
    for entry in cset.candidates(tokens[0], len(tokens)):
        bindings: dict[str, str] = {}
        words = entry.words
        ok = True
        for word, token in zip(words, tokens):
            if isinstance(word, str):
                if word != token:
                    ok = False
                    break
            elif not _match_word(word, token, bindings):
                ok = False
                break
        if ok:
            return entry.template, bindings
    return None


def best_match(cset: CompiledTemplateSet, message: str):
    """(template, variables) for the winning template, or None."""
    tokens = message.split()
    if not tokens:
        return None
    return _match_tokens(cset, tokens)


def match_line(
    cset: CompiledTemplateSet,
    message: str,
    record: RawLogRecord | None = None,
    severity_rules: SeverityRules | None = None,
) -> ParsedEvent | None:
    """Match one message against the set; None when nothing matches."""
    tokens = message.split()
    if not tokens:
        return None
    hit = _match_tokens(cset, tokens)
    if hit is None:
        return None
    template, variables = hit
    if record is None:
        record = RawLogRecord(line_no=1, message=message)
    return ParsedEvent(
        record=record,
        template_id=template.id,
        variables=variables,
        severity=classify_severity(message, severity_rules),
    )


def match_record(
    cset: CompiledTemplateSet,
    record: RawLogRecord,
    severity_rules: SeverityRules | None = None,
) -> ParsedEvent | None:
    return match_line(cset, record.message, record=record, severity_rules=severity_rules)


@dataclass(frozen=True, slots=True)
class CoverageReport:
    """Successfully-parsed share of a record stream."""

    total: int
    parsed: int
    coverage_pct: float
    unmatched_examples: tuple[str, ...]
    empty_input: bool = False

    def merge(self, other: "CoverageReport", cap: int = 100) -> "CoverageReport":
        total = self.total + other.total
        parsed = self.parsed + other.parsed
        examples = (self.unmatched_examples + other.unmatched_examples)[:cap]
        return _make_report(total, parsed, examples)


def _make_report(total: int, parsed: int, examples) -> CoverageReport:
    if total == 0:
        return CoverageReport(0, 0, 0.0, tuple(examples), empty_input=True)
    return CoverageReport(total, parsed, 100.0 * parsed / total, tuple(examples))


def coverage(cset: CompiledTemplateSet, records, max_unmatched: int = 100) -> CoverageReport:
    """Count matched records; keeps the first ``max_unmatched`` misses."""
    total = 0
    parsed = 0
    misses: list[str] = []
    for record in records:
        message = record if isinstance(record, str) else record.message
        total += 1
        tokens = message.split()
        if tokens and _match_tokens(cset, tokens) is not None:
            parsed += 1
        elif len(misses) < max_unmatched:
            misses.append(message)
    return _make_report(total, parsed, misses)


def merge_coverage(reports, max_unmatched: int = 100) -> CoverageReport:
    """Associative merge of shard reports, in shard order."""
    merged = CoverageReport(0, 0, 0.0, (), empty_input=True)
    for report in reports:
        merged = merged.merge(report, cap=max_unmatched)
    return merged
