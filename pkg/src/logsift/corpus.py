"""Synthetic log corpus generator with gold templates and pattern map.

Stands in for production or benchmark logs: K random templates (2-12 tokens,
0-4 placeholders typed by masking class) sampled with Zipf(s=1.1) weights
and fresh variable values per line. Every generated artifact is a pure
function of the seed, so tests can freeze expectations.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass
from typing import Iterator

from .core import LogTemplate, RawLogRecord, parse_template
from .signatures import MASK_HEX, MASK_IP, MASK_NUM, MASK_PATH, MASK_TS, MASK_VAL

# literal vocabulary; nothing here may look maskable (no digits, no '=', no
# '/', no pure-hex-alphabet words like "dead")
WORDS = (
    "alloc", "attach", "binding", "bridge", "broker", "buffer", "bus",
    "channel", "check", "child", "client", "closing", "cluster", "compute",
    "config", "core", "daemon", "detach", "down", "driver", "drop", "entry",
    "event", "expired", "export", "flush", "group", "handler", "health",
    "heartbeat", "host", "idle", "import", "init", "input", "job", "kernel",
    "launch", "limit", "link", "listen", "lock", "loop", "manager", "mark",
    "member", "memory", "mount", "nic", "node", "output", "owner", "partition",
    "peer", "pending", "policy", "pool", "port", "probe", "process", "query",
    "queue", "quota", "rank", "reason", "recv", "register", "reply", "report",
    "request", "reset", "route", "runtime", "scan", "sent", "service",
    "session", "slot", "socket", "spawn", "state", "status", "stream",
    "switch", "sync", "target", "task", "thread", "track", "unit", "up",
    "uplink", "user", "watch", "worker", "zone",
)

VALUE_CLASSES = (MASK_NUM, MASK_HEX, MASK_IP, MASK_TS, MASK_PATH)

_PATH_DIRS = ("var", "opt", "tmp", "scratch", "proc", "sys", "data")


def random_value(marker: str, rng: random.Random) -> str:
    """A fresh token of the given masking class."""
    if marker == MASK_NUM:
        if rng.random() < 0.25:
            return f"{rng.randint(0, 9999)}.{rng.randint(0, 999):03d}"
        return str(rng.randint(0, 999999))
    if marker == MASK_HEX:
        digits = rng.randint(4, 10)
        return "0x" + "".join(rng.choice("0123456789abcdef") for _ in range(digits))
    if marker == MASK_IP:
        return ".".join(str(rng.randint(0, 255)) for _ in range(4))
    if marker == MASK_TS:
        return (
            f"2025-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
            f"T{rng.randint(0, 23):02d}:{rng.randint(0, 59):02d}:{rng.randint(0, 59):02d}"
        )
    if marker == MASK_PATH:
        return (
            f"/{rng.choice(_PATH_DIRS)}/{rng.choice(WORDS)}"
            f"/{rng.choice(WORDS)}{rng.randint(0, 99999)}.log"
        )
    if marker == MASK_VAL:
        return rng.choice(WORDS) + str(rng.randint(0, 999))
    raise ValueError(f"unknown masking class {marker!r}")


@dataclass(frozen=True)
class GoldTemplate:
    template: LogTemplate
    placeholder_classes: tuple[str, ...]  # class marker per placeholder, in order


def _make_template(rng: random.Random) -> GoldTemplate:
    n_tokens = rng.randint(2, 12)
    n_placeholders = rng.randint(0, min(4, n_tokens))
    positions = sorted(rng.sample(range(n_tokens), n_placeholders))
    position_set = set(positions)
    words = []
    classes = []
    counter = 0
    for pos in range(n_tokens):
        if pos in position_set:
            counter += 1
            words.append(f"<v{counter}>")
            classes.append(rng.choice(VALUE_CLASSES))
        else:
            words.append(rng.choice(WORDS))
    return GoldTemplate(parse_template(" ".join(words)), tuple(classes))


def make_templates(k: int, rng: random.Random) -> list[GoldTemplate]:
    """K distinct gold templates (by raw string)."""
    out: list[GoldTemplate] = []
    seen: set[str] = set()
    while len(out) < k:
        gold = _make_template(rng)
        if gold.template.raw not in seen:
            seen.add(gold.template.raw)
            out.append(gold)
    return out


def zipf_cumulative(k: int, s: float = 1.1) -> list[float]:
    weights = [1.0 / (i + 1) ** s for i in range(k)]
    cum = []
    total = 0.0
    for w in weights:
        total += w
        cum.append(total)
    return cum


@dataclass(frozen=True)
class CorpusSpec:
    k_templates: int
    n_lines: int
    seed: int
    n_hosts: int = 64
    start_epoch: float = 1735689600.0  # 2025-01-01T00:00:00Z
    duration: float = 86400.0


class CorpusGenerator:
    """Deterministic corpus stream for a CorpusSpec."""

    def __init__(self, spec: CorpusSpec):
        if spec.k_templates < 1:
            raise ValueError("need at least one template")
        if spec.n_lines < spec.k_templates:
            raise ValueError("need at least as many lines as templates")
        self.spec = spec
        rng = random.Random(spec.seed)
        self.golds = make_templates(spec.k_templates, rng)
        self._cum = zipf_cumulative(spec.k_templates)
        self._line_rng = random.Random(spec.seed ^ 0x5EED)

    @property
    def templates(self) -> list[LogTemplate]:
        return [g.template for g in self.golds]

    def lines(self) -> Iterator[tuple[RawLogRecord, LogTemplate]]:
        """Yield (record, gold template) pairs, timestamps increasing."""
        spec = self.spec
        rng = self._line_rng
        cum = self._cum
        total = cum[-1]
        golds = self.golds
        dt = spec.duration / spec.n_lines
        for i in range(spec.n_lines):
            gold = golds[bisect.bisect_left(cum, rng.random() * total)]
            template = gold.template
            if gold.placeholder_classes:
                values = {
                    f"v{j + 1}": random_value(marker, rng)
                    for j, marker in enumerate(gold.placeholder_classes)
                }
                message = template.render(values)
            else:
                message = template.raw
            record = RawLogRecord(
                line_no=i + 1,
                message=message,
                timestamp=spec.start_epoch + i * dt,
                host=f"node{rng.randint(1, spec.n_hosts):04d}",
            )
            yield record, template


def write_corpus(out_dir, spec: CorpusSpec) -> dict[str, str]:
    """Write corpus.log, gold_templates.txt and gold_map.jsonl under out_dir.

    corpus.log lines carry the ``epoch_seconds<TAB>host<TAB>message`` prefix
    so downstream stages see timestamps and hosts. The gold map records one
    JSON object per line: {"line_no": ..., "template_id": ..., "pattern": ...}.
    """
    import json
    import os

    os.makedirs(out_dir, exist_ok=True)
    gen = CorpusGenerator(spec)
    corpus_path = os.path.join(out_dir, "corpus.log")
    templates_path = os.path.join(out_dir, "gold_templates.txt")
    map_path = os.path.join(out_dir, "gold_map.jsonl")
    with open(templates_path, "w", encoding="utf-8") as fh:
        for template in gen.templates:
            fh.write(template.raw + "\n")
    with open(corpus_path, "w", encoding="utf-8") as cfh, open(
        map_path, "w", encoding="utf-8"
    ) as mfh:
        for record, template in gen.lines():
            cfh.write(f"{record.timestamp:.3f}\t{record.host}\t{record.message}\n")
            mfh.write(
                json.dumps(
                    {
                        "line_no": record.line_no,
                        "template_id": template.id,
                        "pattern": template.raw,
                    },
                    separators=(",", ":"),
                )
                + "\n"
            )
    return {
        "corpus": corpus_path,
        "templates": templates_path,
        "gold_map": map_path,
    }
