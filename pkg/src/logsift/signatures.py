"""Stage 1: mask variable tokens, group lines by masked signature, sample reps.

Masking replaces whitespace-delimited tokens that look like variable data
(numbers, hex literals, IP addresses, timestamps, paths, key=value values)
with class markers, so that lines differing only in those fields collapse
onto one signature. Grouping is a single streaming pass; each group keeps a
seeded reservoir sample of representative lines for template generation.
"""

from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass

from .core import RawLogRecord
from .errors import EmptyInput

MASK_NUM = "§NUM"
MASK_HEX = "§HEX"
MASK_IP = "§IP"
MASK_TS = "§TS"
MASK_PATH = "§PATH"
MASK_VAL = "§VAL"

MARKERS = frozenset({MASK_NUM, MASK_HEX, MASK_IP, MASK_TS, MASK_PATH, MASK_VAL})

# punctuation treated as token edges, kept verbatim around a masked core
_EDGE_PUNCT = "()[]{}<>,;:.!?\"'`"

_NUM_RE = re.compile(r"[+-]?\d+(?:\.\d+)?")
_HEX_RE = re.compile(r"(?:0[xX])?[0-9a-fA-F]{4,}")
_IP4_RE = re.compile(r"\d{1,3}(?:\.\d{1,3}){3}")
_IP6_CHARS_RE = re.compile(r"[0-9a-fA-F:]{3,45}")
_TS_RE = re.compile(
    r"\d{4}-\d{2}-\d{2}(?:[T ]\d{2}:\d{2}:\d{2}(?:\.\d+)?(?:Z|[+-]\d{2}:?\d{2})?)?"
    r"|\d{2}:\d{2}:\d{2}(?:\.\d+)?"
)

_TOKEN_CACHE: dict[str, str] = {}
_TOKEN_CACHE_LIMIT = 1 << 20


def classify_token(core: str) -> str | None:
    """Return the mask marker for a bare token core, or None if it is literal.

    Order matters: timestamps are checked before numbers (dates are digit
    runs with separators), IPs before hex (colon-hex groups), and numbers
    before hex so a pure decimal run never counts as hex digits.
    """
    if not core:
        return None
    if core in MARKERS:
        return core
    if _TS_RE.fullmatch(core):
        return MASK_TS
    if _IP4_RE.fullmatch(core):
        return MASK_IP
    if core.count(":") >= 2 and _IP6_CHARS_RE.fullmatch(core):
        return MASK_IP
    if _NUM_RE.fullmatch(core):
        return MASK_NUM
    if _HEX_RE.fullmatch(core):
        return MASK_HEX
    if core[0] == "/" and any(ch.isdigit() for ch in core):
        return MASK_PATH
    return None


def _mask_core(token: str) -> str:
    """Mask one token, honoring punctuation edges."""
    core = token.strip(_EDGE_PUNCT)
    if not core:
        return token
    marker = classify_token(core)
    if marker is None:
        return token
    if marker == core:
        return token  # already masked
    start = token.index(core)
    return token[:start] + marker + token[start + len(core):]


def mask_token(token: str) -> str:
    cached = _TOKEN_CACHE.get(token)
    if cached is not None:
        return cached
    eq = token.find("=")
    if eq > 0 and eq < len(token) - 1:
        # key=value: keep the key, mask the value
        key, value = token[: eq + 1], token[eq + 1 :]
        masked_value = _mask_core(value)
        if masked_value == value:
            core = value.strip(_EDGE_PUNCT)
            if core and core not in MARKERS:
                start = value.index(core)
                masked_value = value[:start] + MASK_VAL + value[start + len(core):]
        out = key + masked_value
    else:
        out = _mask_core(token)
    if len(_TOKEN_CACHE) < _TOKEN_CACHE_LIMIT:
        _TOKEN_CACHE[token] = out
    return out


def mask(message: str) -> str:
    """Masked form of a message; idempotent, whitespace-normalizing."""
    return " ".join(map(mask_token, message.split()))


def signature_key(masked_form: str) -> int:
    """64-bit hash of the masked token sequence."""
    digest = hashlib.blake2b(masked_form.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


@dataclass(frozen=True, slots=True)
class Signature:
    key: int
    masked_form: str
    token_count: int


@dataclass(frozen=True, slots=True)
class SignatureGroup:
    """A cluster of raw lines sharing one masked signature."""

    signature: Signature
    member_count: int
    representatives: tuple[RawLogRecord, ...]
    reservoir_seed: int


def _group_seed(seed: int, masked_form: str) -> int:
    payload = f"{seed}:{masked_form}".encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


class _GroupBuilder:
    __slots__ = ("count", "reservoir", "rng", "seed", "n_samples")

    def __init__(self, seed: int, n_samples: int):
        self.count = 0
        self.reservoir: list[RawLogRecord] = []
        self.seed = seed
        self.rng = random.Random(seed)
        self.n_samples = n_samples

    def add(self, record: RawLogRecord) -> None:
        # Algorithm R, per-group arrival order
        self.count += 1
        if len(self.reservoir) < self.n_samples:
            self.reservoir.append(record)
        else:
            j = self.rng.randrange(self.count)
            if j < self.n_samples:
                self.reservoir[j] = record


def group_records(records, n_samples: int = 5, seed: int = 42) -> list[SignatureGroup]:
    """Single-pass grouping of a record stream by masked signature.

    Args:
        records: iterable of RawLogRecord (consumed once).
        n_samples: reservoir size per group.
        seed: base seed; each group derives its own reservoir seed from it.

    Returns groups sorted by descending member count (ties by masked form).
    Raises EmptyInput when the stream yields no records.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    builders: dict[str, _GroupBuilder] = {}
    for record in records:
        masked = mask(record.message)
        builder = builders.get(masked)
        if builder is None:
            builder = _GroupBuilder(_group_seed(seed, masked), n_samples)
            builders[masked] = builder
        builder.add(record)
    if not builders:
        raise EmptyInput("no records to group")
    groups = [
        SignatureGroup(
            signature=Signature(
                key=signature_key(masked),
                masked_form=masked,
                token_count=len(masked.split()),
            ),
            member_count=b.count,
            representatives=tuple(b.reservoir),
            reservoir_seed=b.seed,
        )
        for masked, b in builders.items()
    ]
    groups.sort(key=lambda g: (-g.member_count, g.signature.masked_form))
    return groups


def parse_input_line(
    line: str, line_no: int, source_file: str | None = None
) -> RawLogRecord | None:
    """Parse one input line; optional leading ``epoch_seconds<TAB>host<TAB>``.

    Blank lines yield None. A line whose first tab-separated field parses as
    a finite float is treated as prefixed; anything else is a bare message.
    """
    line = line.rstrip("\r\n")
    if not line.strip():
        return None
    parts = line.split("\t", 2)
    if len(parts) == 3:
        try:
            ts = float(parts[0])
        except ValueError:
            ts = None
        if ts is not None and abs(ts) < 2**53:
            message = parts[2]
            if not message.strip():
                return None
            return RawLogRecord(
                line_no=line_no,
                message=message,
                timestamp=ts,
                host=parts[1] or None,
                source_file=source_file,
            )
    return RawLogRecord(line_no=line_no, message=line, source_file=source_file)


def read_records(path: str):
    """Yield RawLogRecord from a log file, skipping blank lines."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        for line_no, line in enumerate(fh, start=1):
            record = parse_input_line(line, line_no, source_file=path)
            if record is not None:
                yield record
