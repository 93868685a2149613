"""Shared data model: raw records, templates, the placeholder grammar, severity.

Templates mix literal text with named placeholders written ``<name>``
(lowercase snake_case). Parsing is strict: any ``<`` must open a valid
placeholder, and two placeholders may never touch without literal text
between them, which keeps downstream matching linear and unambiguous.
"""

from __future__ import annotations

import enum
import hashlib
import math
import re
from dataclasses import dataclass
from importlib import resources

from .errors import DataError

PLACEHOLDER_RE = re.compile(r"<([a-z][a-z0-9_]*)>")

# epoch seconds must stay representable as a signed 64-bit nanosecond count
_MAX_EPOCH_SECONDS = 2**63 / 1e9


class MalformedPlaceholder(DataError):
    """A ``<`` that does not open a well-formed ``<snake_case>`` placeholder."""


class AdjacentPlaceholders(DataError):
    """Two placeholders with no literal text between them."""


@dataclass(frozen=True, slots=True)
class RawLogRecord:
    """One ingested log line plus optional syslog-style metadata."""

    line_no: int
    message: str
    timestamp: float | None = None
    host: str | None = None
    source_file: str | None = None

    def __post_init__(self):
        if self.line_no < 1:
            raise ValueError(f"line_no must be >= 1, got {self.line_no}")
        if not self.message:
            raise ValueError("message must be non-empty")
        if "\n" in self.message or "\r" in self.message:
            raise ValueError("message must not contain newline characters")
        if self.timestamp is not None:
            t = self.timestamp
            if not math.isfinite(t) or abs(t) >= _MAX_EPOCH_SECONDS:
                raise ValueError(f"timestamp {t!r} is not a representable epoch instant")


@dataclass(frozen=True, slots=True)
class Literal:
    text: str


@dataclass(frozen=True, slots=True)
class Placeholder:
    name: str


Token = Literal | Placeholder


def template_id(raw: str) -> str:
    """Stable content hash of a template's canonical string form."""
    return hashlib.blake2b(raw.encode("utf-8"), digest_size=8).hexdigest()


@dataclass(frozen=True, slots=True)
class LogTemplate:
    """A pattern string mixing literal tokens and named placeholders."""

    raw: str
    tokens: tuple[Token, ...]
    id: str

    @property
    def placeholder_names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.tokens if isinstance(t, Placeholder))

    def render(self, variables: dict[str, str]) -> str:
        """Substitute placeholder values back into the pattern."""
        parts = []
        for tok in self.tokens:
            if isinstance(tok, Literal):
                parts.append(tok.text)
            else:
                parts.append(variables[tok.name])
        return "".join(parts)


def parse_template(raw: str) -> LogTemplate:
    """Parse a template string into its token sequence.

    Raises MalformedPlaceholder for an unclosed ``<`` or an illegal name,
    AdjacentPlaceholders when two placeholders touch, and ValueError for
    empty / whitespace-only input.
    """
    if not raw or not raw.strip():
        raise ValueError("template must be non-empty")
    tokens: list[Token] = []
    pos = 0
    prev_was_placeholder = False
    n = len(raw)
    while pos < n:
        lt = raw.find("<", pos)
        if lt < 0:
            tokens.append(Literal(raw[pos:]))
            break
        if lt > pos:
            tokens.append(Literal(raw[pos:lt]))
            prev_was_placeholder = False
        m = PLACEHOLDER_RE.match(raw, lt)
        if m is None:
            raise MalformedPlaceholder(
                f"bad placeholder at column {lt + 1} in template {raw!r}"
            )
        if prev_was_placeholder:
            raise AdjacentPlaceholders(
                f"placeholders must be separated by literal text: {raw!r}"
            )
        tokens.append(Placeholder(m.group(1)))
        prev_was_placeholder = True
        pos = m.end()
    return LogTemplate(raw=raw, tokens=tuple(tokens), id=template_id(raw))


def render_tokens(tokens: tuple[Token, ...]) -> str:
    """Inverse of parse_template: reconstruct the canonical raw string."""
    return "".join(
        t.text if isinstance(t, Literal) else f"<{t.name}>" for t in tokens
    )


class Severity(enum.Enum):
    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"
    DISK_ERROR = "DISK_ERROR"
    HARDWARE_ERROR = "HARDWARE_ERROR"
    CRITICAL_FATAL = "CRITICAL_FATAL"
    KERNEL_PANIC_CRASH = "KERNEL_PANIC_CRASH"
    UNKNOWN = "UNKNOWN"

    @property
    def rank(self) -> int:
        """Reporting order; ERROR and DISK_ERROR share a rank, UNKNOWN sorts last."""
        return _REPORT_RANK[self]

    def sort_key(self) -> tuple[int, str]:
        return (self.rank, self.value)


_REPORT_RANK = {
    Severity.INFO: 0,
    Severity.WARNING: 1,
    Severity.ERROR: 2,
    Severity.DISK_ERROR: 2,
    Severity.HARDWARE_ERROR: 3,
    Severity.CRITICAL_FATAL: 4,
    Severity.KERNEL_PANIC_CRASH: 5,
    Severity.UNKNOWN: 6,
}

# rule-matching priority: first severity whose rule matches wins
CLASSIFY_PRIORITY = (
    Severity.KERNEL_PANIC_CRASH,
    Severity.CRITICAL_FATAL,
    Severity.HARDWARE_ERROR,
    Severity.DISK_ERROR,
    Severity.ERROR,
    Severity.WARNING,
    Severity.INFO,
)


class SeverityRules:
    """Case-insensitive substring rules for classifying message severity.

    Rules live in an editable data file, one per line: SEVERITY<TAB>substring,
    with ``#`` comments. The match order is the fixed classification priority,
    not file order; within one severity, substrings keep file order.
    """

    def __init__(self, rules: list[tuple[Severity, str]]):
        buckets: dict[Severity, list[str]] = {s: [] for s in CLASSIFY_PRIORITY}
        for sev, sub in rules:
            if sev not in buckets:
                raise ValueError(f"cannot ship rules for severity {sev.value}")
            if not sub:
                raise ValueError("empty rule substring")
            buckets[sev].append(sub.lower())
        self._buckets = [(sev, tuple(buckets[sev])) for sev in CLASSIFY_PRIORITY]

    @classmethod
    def from_text(cls, text: str) -> "SeverityRules":
        rules = []
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                name, sub = line.split("\t", 1)
                rules.append((Severity[name.strip()], sub.strip()))
            except (ValueError, KeyError) as exc:
                raise ValueError(f"bad severity rule on line {ln}: {line!r}") from exc
        return cls(rules)

    @classmethod
    def load(cls, path) -> "SeverityRules":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    def classify(self, message: str) -> Severity:
        low = message.lower()
        for sev, subs in self._buckets:
            for sub in subs:
                if sub in low:
                    return sev
        return Severity.UNKNOWN


_DEFAULT_RULES: SeverityRules | None = None


def default_severity_rules() -> SeverityRules:
    global _DEFAULT_RULES
    if _DEFAULT_RULES is None:
        text = (
            resources.files("logsift.data")
            .joinpath("severity_rules.tsv")
            .read_text(encoding="utf-8")
        )
        _DEFAULT_RULES = SeverityRules.from_text(text)
    return _DEFAULT_RULES


def classify_severity(message: str, rules: SeverityRules | None = None) -> Severity:
    """Classify one message; deterministic, UNKNOWN when no rule matches."""
    return (rules or default_severity_rules()).classify(message)


@dataclass(frozen=True, slots=True)
class ParsedEvent:
    """A raw line bound to its matched template plus extracted variables."""

    record: RawLogRecord
    template_id: str
    variables: dict[str, str]
    severity: Severity

    @property
    def line_no(self) -> int:
        return self.record.line_no

    @property
    def timestamp(self) -> float | None:
        return self.record.timestamp

    @property
    def host(self) -> str | None:
        return self.record.host
