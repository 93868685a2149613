"""Robustness lab: seven noise perturbations plus the evaluation battery.

Each perturbation is deterministic given (kind, seed, params) and the input
message: the working RNG is seeded from all of them together, so re-running
a sample reproduces it exactly while different messages still perturb
independently. Samples a perturbation cannot apply to (e.g. a parameter
change on a message with no variable-looking token) raise Inapplicable and
are excluded from the evaluation denominator but reported.
"""

from __future__ import annotations

import enum
import hashlib
import random
import string
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .core import LogTemplate
from .errors import LogsiftError
from .matching import CompiledTemplateSet, best_match, compile_templates
from .metrics import avg_similarity, levenshtein_norm, word_error_rate
from .signatures import classify_token


class Inapplicable(LogsiftError):
    """This perturbation has nothing to act on in this message."""


class PerturbationKind(enum.Enum):
    PARAM_CHANGE = "Param Change"
    TYPO = "Typo"
    WHITESPACE = "Whitespace"
    WORD_REORDER = "Word Reorder"
    PUNCTUATION = "Punctuation"
    MISSING_WORDS = "Missing Words"
    EXTRA_WORDS = "Extra Words"


ALL_KINDS = tuple(PerturbationKind)

_DELIMITER_PAIRS = (("(", ")"), ("[", "]"), ("{", "}"))
_EXTRA_WORDS = ("warning:", "note:", "debug:")


@dataclass(frozen=True)
class Perturbation:
    """One noise recipe. ``params`` may pin kind-specific choices:

    Whitespace: {"op": "remove" | "double" | "tab"}
    Punctuation: {"target": "[]" | "()" | "{}"}
    ExtraWords: {"words": (...,), "position": "prefix" | "suffix"}
    """

    kind: PerturbationKind
    seed: int = 0
    params: Mapping = field(default_factory=dict)

    def rng_for(self, message: str) -> random.Random:
        extra = ",".join(f"{k}={self.params[k]}" for k in sorted(self.params))
        payload = f"{self.seed}:{self.kind.value}:{extra}:{message}".encode("utf-8")
        digest = hashlib.blake2b(payload, digest_size=8).digest()
        return random.Random(int.from_bytes(digest, "big"))


def _fresh_value(marker: str, rng: random.Random) -> str:
    # deferred import: corpus pulls in this module's siblings
    from .corpus import random_value

    return random_value(marker, rng)


def _param_change(message: str, rng: random.Random) -> str:
    tokens = message.split()
    maskable = []
    for i, tok in enumerate(tokens):
        core = tok.strip("()[]{}<>,;:.!?\"'`")
        marker = classify_token(core)
        if marker is not None and marker != core:
            maskable.append((i, core, marker))
    if not maskable:
        raise Inapplicable("no variable-class token to change")
    i, core, marker = maskable[rng.randrange(len(maskable))]
    fresh = core
    for _ in range(16):
        fresh = _fresh_value(marker, rng)
        if fresh != core:
            break
    tokens[i] = tokens[i].replace(core, fresh, 1)
    return " ".join(tokens)


def _typo(message: str, rng: random.Random) -> str:
    positions = [i for i, ch in enumerate(message) if ch.isalpha()]
    if not positions:
        raise Inapplicable("no alphabetic character to mutate")
    i = positions[rng.randrange(len(positions))]
    old = message[i]
    alphabet = string.ascii_lowercase if old.islower() else string.ascii_uppercase
    new = old
    while new == old:
        new = alphabet[rng.randrange(len(alphabet))]
    return message[:i] + new + message[i + 1 :]


def _whitespace(message: str, rng: random.Random, params: Mapping) -> str:
    spaces = [i for i, ch in enumerate(message) if ch == " "]
    if not spaces:
        raise Inapplicable("no space to manipulate")
    op = params.get("op") or ("remove", "double", "tab")[rng.randrange(3)]
    if op not in ("remove", "double", "tab"):
        raise ValueError(f"unknown whitespace op {op!r}")
    i = spaces[rng.randrange(len(spaces))]
    if op == "remove":
        return message[:i] + message[i + 1 :]
    if op == "double":
        return message[:i] + " " + message[i:]
    return message[:i] + "\t" + message[i + 1 :]


def _word_reorder(message: str, rng: random.Random) -> str:
    tokens = message.split()
    if len(tokens) < 2:
        raise Inapplicable("need at least two tokens to reorder")
    i = rng.randrange(1, len(tokens))
    moved = tokens.pop(i)
    return " ".join([moved] + tokens)


def _punctuation(message: str, rng: random.Random, params: Mapping) -> str:
    present = [
        pair for pair in _DELIMITER_PAIRS if pair[0] in message or pair[1] in message
    ]
    if not present:
        raise Inapplicable("no delimiter pair present")
    src = present[rng.randrange(len(present))]
    target = params.get("target")
    if target is not None:
        dst = (target[0], target[1])
        if dst not in _DELIMITER_PAIRS:
            raise ValueError(f"unknown delimiter pair {target!r}")
        if dst == src:
            raise Inapplicable("target pair equals the pair being replaced")
    else:
        others = [pair for pair in _DELIMITER_PAIRS if pair != src]
        dst = others[rng.randrange(len(others))]
    table = str.maketrans({src[0]: dst[0], src[1]: dst[1]})
    return message.translate(table)


def _missing_words(message: str, rng: random.Random) -> str:
    tokens = message.split()
    if len(tokens) < 2:
        raise Inapplicable("need at least two tokens to drop one")
    del tokens[rng.randrange(len(tokens))]
    return " ".join(tokens)


def _extra_words(message: str, rng: random.Random, params: Mapping) -> str:
    words = tuple(params.get("words", _EXTRA_WORDS))
    word = words[rng.randrange(len(words))]
    position = params.get("position") or ("prefix", "suffix")[rng.randrange(2)]
    if position == "prefix":
        return f"{word} {message}"
    if position == "suffix":
        return f"{message} {word}"
    raise ValueError(f"unknown position {position!r}")


def perturb(message: str, p: Perturbation) -> str:
    """Apply one perturbation; deterministic for fixed (kind, seed, params)."""
    if not message:
        raise ValueError("message must be non-empty")
    rng = p.rng_for(message)
    kind = p.kind
    if kind is PerturbationKind.PARAM_CHANGE:
        return _param_change(message, rng)
    if kind is PerturbationKind.TYPO:
        return _typo(message, rng)
    if kind is PerturbationKind.WHITESPACE:
        return _whitespace(message, rng, p.params)
    if kind is PerturbationKind.WORD_REORDER:
        return _word_reorder(message, rng)
    if kind is PerturbationKind.PUNCTUATION:
        return _punctuation(message, rng, p.params)
    if kind is PerturbationKind.MISSING_WORDS:
        return _missing_words(message, rng)
    if kind is PerturbationKind.EXTRA_WORDS:
        return _extra_words(message, rng, p.params)
    raise ValueError(f"unknown perturbation kind {kind!r}")


@dataclass(frozen=True)
class RobustnessRow:
    """Aggregate metrics for one perturbation kind."""

    kind: PerturbationKind
    accuracy_pct: float
    avg_similarity: float
    levenshtein_norm: float
    wer_pct: float
    sample_count: int
    skipped_count: int = 0
    failure_examples: tuple[tuple[str, str], ...] = ()


def evaluate(
    templates_gold: Iterable[LogTemplate],
    messages: Iterable[str],
    kinds: Iterable[PerturbationKind] = ALL_KINDS,
    extractor: Callable[[str], str] | None = None,
    seed: int = 42,
    metric_level: str = "pattern",
    max_failure_examples: int = 5,
) -> list[RobustnessRow]:
    """Perturb every message per kind, re-extract patterns, score them.

    The extractor maps a (perturbed) message to a pattern string; extractor
    exceptions count as failures scored against empty output. Accuracy is
    exact string equality with the message's gold pattern. Similarity
    metrics compare extracted vs gold pattern by default; pass
    metric_level="message" to compare the perturbed message against the
    original one instead.

    Every input message must match one of the gold templates, otherwise its
    original pattern would be undefined.
    """
    if metric_level not in ("pattern", "message"):
        raise ValueError(f"metric_level must be 'pattern' or 'message', got {metric_level!r}")
    if extractor is None:
        raise ValueError("an extractor function is required")
    cset = compile_templates(templates_gold)
    samples: list[tuple[str, str]] = []
    for message in messages:
        hit = best_match(cset, message)
        if hit is None:
            raise ValueError(f"message matches no gold template: {message!r}")
        samples.append((message, hit[0].raw))

    rows = []
    for kind in kinds:
        p = Perturbation(kind=kind, seed=seed)
        exact = 0
        evaluated = 0
        skipped = 0
        sim_sum = 0.0
        lev_sum = 0.0
        wer_sum = 0.0
        failures: list[tuple[str, str]] = []
        for message, gold_pattern in samples:
            try:
                perturbed = perturb(message, p)
            except Inapplicable:
                skipped += 1
                continue
            evaluated += 1
            try:
                extracted = extractor(perturbed)
            except Exception:
                extracted = ""
            if extracted == gold_pattern:
                exact += 1
            elif len(failures) < max_failure_examples:
                failures.append((gold_pattern, extracted))
            if metric_level == "pattern":
                a, b = gold_pattern, extracted
            else:
                a, b = message, perturbed
            sim_sum += avg_similarity(a, b)
            lev_sum += levenshtein_norm(a, b)
            wer_sum += word_error_rate(a, b)
        if evaluated:
            rows.append(
                RobustnessRow(
                    kind=kind,
                    accuracy_pct=100.0 * exact / evaluated,
                    avg_similarity=sim_sum / evaluated,
                    levenshtein_norm=lev_sum / evaluated,
                    wer_pct=100.0 * wer_sum / evaluated,
                    sample_count=evaluated,
                    skipped_count=skipped,
                    failure_examples=tuple(failures),
                )
            )
        else:
            rows.append(
                RobustnessRow(kind, 0.0, 0.0, 0.0, 0.0, 0, skipped, ())
            )
    return rows


def matcher_extractor(cset: CompiledTemplateSet) -> Callable[[str], str]:
    """Extractor that looks a message up in a compiled template set.

    Unmatched messages yield an empty pattern, which the evaluation scores
    as a failure.
    """

    def extract(message: str) -> str:
        hit = best_match(cset, message)
        return hit[0].raw if hit else ""

    return extract


def robustness_csv(rows: Iterable[RobustnessRow]) -> str:
    """Render rows in the report column layout (percentages, 3-digit ratios)."""
    out = ["Type,Acc.,Avg. Sim.,Lev.,WER,Samples,Skipped"]
    for row in rows:
        out.append(
            f"{row.kind.value},{row.accuracy_pct:.1f}%,{row.avg_similarity:.3f},"
            f"{row.levenshtein_norm:.3f},{row.wer_pct:.1f}%,"
            f"{row.sample_count},{row.skipped_count}"
        )
    return "\n".join(out) + "\n"
