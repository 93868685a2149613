"""Stage 2: prompt construction, LLM endpoint calls, template extraction.

The endpoint is an external black box speaking the de-facto local-inference
wire shape (POST .../chat/completions with a JSON chat body). The model is
told to reason first and then emit its final answer inside one fenced code
block, one template per line, so the chain-of-thought prose can be discarded
mechanically. For offline runs, heuristic_templates() is a deterministic
stand-in built on token-position voting.

The default instruction and reasoning text below is this package's own
wording; override it through PromptSpec if a deployment needs different
phrasing.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import requests

from .core import (
    AdjacentPlaceholders,
    LogTemplate,
    MalformedPlaceholder,
    parse_template,
)
from .errors import EndpointError, UsageError
from .signatures import SignatureGroup

DEFAULT_INSTRUCTIONS = (
    "The example logs above share a common structure. Derive the log "
    "template(s): keep constant text exactly as written and replace every "
    "variable field (numbers, identifiers, addresses, timestamps, file "
    "paths, hostnames) with a named placeholder in angle brackets, e.g. "
    "<pid> or <addr>. Placeholder names must be lowercase snake_case. Emit "
    "one template per distinct structure."
)

DEFAULT_COT_DIRECTIVE = (
    "Think step by step before answering: compare the examples token by "
    "token, decide which positions vary and why, choose a name for each "
    "variable position, and only then write the final templates."
)

OUTPUT_CONTRACT = (
    "After your reasoning, output the final templates in a single fenced "
    "code block (```), one template per line, with no commentary inside "
    "the block."
)


class InvalidPromptSpec(UsageError):
    pass


class EndpointTimeout(EndpointError):
    pass


class HttpStatusError(EndpointError):
    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"endpoint returned HTTP {status}{': ' + detail if detail else ''}")
        self.status = status


class MalformedResponse(EndpointError):
    pass


class NoTemplateBlock(EndpointError):
    """The response contains no complete fenced template block."""


@dataclass(frozen=True)
class PromptSpec:
    """What goes into a template-generation prompt, in section order."""

    example_logs: tuple[str, ...] = ()
    instructions: str = DEFAULT_INSTRUCTIONS
    cot_directive: str = DEFAULT_COT_DIRECTIVE
    max_examples: int = 5


@dataclass(frozen=True)
class LlmEndpointConfig:
    base_url: str
    model_name: str
    temperature: float = 0.0
    max_tokens: int = 1024
    timeout: float = 60.0
    max_concurrent_requests: int = 4
    retry_limit: int = 2
    bearer_token: str | None = None

    def __post_init__(self):
        if not self.base_url:
            raise UsageError("llm endpoint base_url is required")
        if not 0.0 <= self.temperature <= 1.0:
            raise UsageError(f"temperature must be in [0, 1], got {self.temperature}")
        if self.max_concurrent_requests < 1:
            raise UsageError("max_concurrent_requests must be >= 1")
        if self.retry_limit < 0:
            raise UsageError("retry_limit must be >= 0")


def render_prompt(spec: PromptSpec) -> str:
    """Render the three prompt sections: examples, instructions, reasoning."""
    if not spec.instructions.strip():
        raise InvalidPromptSpec("instructions must be non-empty")
    if not spec.cot_directive.strip():
        raise InvalidPromptSpec("cot_directive must be non-empty")
    if spec.max_examples < 1:
        raise InvalidPromptSpec("max_examples must be >= 1")
    examples = spec.example_logs[: spec.max_examples]
    lines = ["Example logs:"]
    lines.extend(f"{i}. {log}" for i, log in enumerate(examples, start=1))
    lines.append("")
    lines.append("Instructions:")
    lines.append(spec.instructions)
    lines.append(OUTPUT_CONTRACT)
    lines.append("")
    lines.append("Reasoning directive:")
    lines.append(spec.cot_directive)
    return "\n".join(lines)


def build_prompt(group: SignatureGroup, spec: PromptSpec | None = None) -> str:
    """Prompt for one signature group; pure function of (group, spec)."""
    spec = spec or PromptSpec()
    if not group.representatives:
        raise ValueError("group has no representatives")
    return render_prompt(
        replace(spec, example_logs=tuple(r.message for r in group.representatives))
    )


# patchable in tests; retries sleep base 1 s, factor 2, jittered
_sleep = time.sleep


def _backoff_delay(attempt: int) -> float:
    return (2.0**attempt) * (0.5 + random.random())


def request_templates(prompt: str, cfg: LlmEndpointConfig) -> str:
    """POST the prompt to the endpoint and return the first choice's text.

    Retries timeouts, connection failures, 429 and 5xx responses up to
    cfg.retry_limit times with exponential backoff. Other HTTP errors and
    malformed bodies raise immediately.
    """
    url = cfg.base_url.rstrip("/")
    if not url.endswith("/chat/completions"):
        url += "/chat/completions"
    body = {
        "model": cfg.model_name,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_tokens,
    }
    headers = {"Content-Type": "application/json"}
    if cfg.bearer_token:
        headers["Authorization"] = f"Bearer {cfg.bearer_token}"

    last_error: EndpointError | None = None
    for attempt in range(cfg.retry_limit + 1):
        if attempt:
            _sleep(_backoff_delay(attempt - 1))
        try:
            resp = requests.post(url, json=body, headers=headers, timeout=cfg.timeout)
        except requests.Timeout:
            last_error = EndpointTimeout(f"no response within {cfg.timeout}s from {url}")
            continue
        except requests.RequestException as exc:
            last_error = EndpointError(f"request to {url} failed: {exc}")
            continue
        if resp.status_code >= 500 or resp.status_code == 429:
            last_error = HttpStatusError(resp.status_code)
            continue
        if resp.status_code != 200:
            raise HttpStatusError(resp.status_code, resp.text[:200])
        try:
            payload = resp.json()
            choice = payload["choices"][0]
            content = choice.get("message", {}).get("content")
            if content is None:
                content = choice.get("text")
        except (ValueError, LookupError, AttributeError, TypeError) as exc:
            raise MalformedResponse(f"cannot read completion body: {exc}") from exc
        if not isinstance(content, str):
            raise MalformedResponse("completion has no text content")
        return content
    assert last_error is not None
    raise last_error


@dataclass(frozen=True)
class TemplateLineError:
    line_no: int  # 1-based line number within the response text
    line: str
    reason: str


@dataclass(frozen=True)
class ExtractionResult:
    templates: tuple[LogTemplate, ...]
    errors: tuple[TemplateLineError, ...] = ()


def extract_templates(response: str) -> ExtractionResult:
    """Pull templates out of the final fenced block of an LLM response.

    Reasoning prose before the block is discarded. Malformed lines are
    collected (with their line numbers) instead of discarding the whole
    block: valid templates are returned alongside the error list.
    """
    lines = response.splitlines()
    fences = [i for i, line in enumerate(lines) if line.lstrip().startswith("```")]
    if len(fences) < 2:
        raise NoTemplateBlock("response has no complete fenced block")
    start, end = fences[2 * (len(fences) // 2) - 2], fences[2 * (len(fences) // 2) - 1]
    templates: list[LogTemplate] = []
    errors: list[TemplateLineError] = []
    for offset, line in enumerate(lines[start + 1 : end], start=start + 2):
        text = line.strip()
        if not text:
            continue
        try:
            templates.append(parse_template(text))
        except (MalformedPlaceholder, AdjacentPlaceholders, ValueError) as exc:
            errors.append(TemplateLineError(offset, text, str(exc)))
    return ExtractionResult(tuple(templates), tuple(errors))


def _dedupe(templates) -> tuple[LogTemplate, ...]:
    seen: set[str] = set()
    out = []
    for t in templates:
        if t.id not in seen:
            seen.add(t.id)
            out.append(t)
    return tuple(out)


def heuristic_templates(group: SignatureGroup) -> list[LogTemplate]:
    """Deterministic offline template oracle via token-position voting.

    Representatives are bucketed by token count. A bucket with two or more
    samples votes position by position: agreeing positions stay literal,
    disagreeing ones become <v1>, <v2>, ... left to right. Singleton buckets
    fall back to the representative verbatim as an all-literal template.
    Words containing '<' or '>' cannot be literal under the placeholder
    grammar and are forced to placeholders.
    """
    buckets: dict[int, list[list[str]]] = {}
    for rec in group.representatives:
        tokens = rec.message.split()
        if tokens:
            buckets.setdefault(len(tokens), []).append(tokens)
    out: list[LogTemplate] = []
    for count in sorted(buckets):
        rows = buckets[count]
        base = rows[0]
        variable = [False] * count
        for pos in range(count):
            word = base[pos]
            if "<" in word or ">" in word:
                variable[pos] = True
                continue
            for row in rows[1:]:
                if row[pos] != word:
                    variable[pos] = True
                    break
        words = []
        counter = 0
        for pos in range(count):
            if variable[pos]:
                counter += 1
                words.append(f"<v{counter}>")
            else:
                words.append(base[pos])
        out.append(parse_template(" ".join(words)))
    return list(_dedupe(out))


@dataclass(frozen=True)
class GroupTemplates:
    """Outcome of stage 2 for one group: templates, or a structured error."""

    group: SignatureGroup
    templates: tuple[LogTemplate, ...] = ()
    line_errors: tuple[TemplateLineError, ...] = ()
    error: str | None = None


def generate_for_groups(
    groups,
    cfg: LlmEndpointConfig,
    spec: PromptSpec | None = None,
) -> list[GroupTemplates]:
    """Run the LLM path over many groups, bounded-concurrency, group order.

    Endpoint failures are captured per group as structured errors; a single
    bad group never aborts the batch.
    """
    groups = list(groups)

    def one(group: SignatureGroup) -> GroupTemplates:
        try:
            response = request_templates(build_prompt(group, spec), cfg)
            result = extract_templates(response)
        except EndpointError as exc:
            return GroupTemplates(group, error=f"{type(exc).__name__}: {exc}")
        return GroupTemplates(group, _dedupe(result.templates), result.errors)

    workers = max(1, cfg.max_concurrent_requests)
    if workers == 1 or len(groups) <= 1:
        return [one(g) for g in groups]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, groups))
