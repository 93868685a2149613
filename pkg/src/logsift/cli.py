"""Command-line surface for the full pipeline.

Subcommands: gen, signatures, templates, parse, coverage, perturb,
mine {fingerprint,severity,temporal,jobs,cluster,kde}, report, peft-demo.
Exit codes: 0 success, 1 usage error, 2 data error, 3 endpoint error.
All randomness is keyed by --seed (default 42); identical inputs and flags
produce byte-identical outputs in heuristic mode.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .config import load_llm_settings
from .core import RawLogRecord, Severity, SeverityRules
from .corpus import CorpusSpec, write_corpus
from .errors import DataError, EndpointError, LogsiftError, UsageError
from .generation import (
    PromptSpec,
    build_prompt,
    extract_templates,
    generate_for_groups,
    heuristic_templates,
    request_templates,
)
from .kde import kde_density
from .lora import LoraAdapter, elimination_rank, lora_apply, lora_delta
from .matching import (
    compile_templates,
    coverage,
    load_templates_file,
    match_record,
    merge_coverage,
)
from .mining import (
    CategoryRules,
    EventView,
    build_category_domain_matrix,
    category_cdf,
    default_category_rules,
    fingerprint,
    join_jobs,
    read_jobs_csv,
    severity_distribution,
    temporal_histogram,
    ward_cluster,
)
from .perturb import (
    ALL_KINDS,
    PerturbationKind,
    evaluate,
    matcher_extractor,
    robustness_csv,
)
from .signatures import SignatureGroup, Signature, group_records, read_records, signature_key
from .svg import heatmap, line_chart


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.exit(1, f"{self.prog}: usage error: {message}\n")


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _write_out(path: str | None, text: str) -> None:
    fh, close = _open_out(path)
    try:
        fh.write(text)
    finally:
        if close:
            fh.close()


def _severity_rules(args) -> SeverityRules | None:
    if getattr(args, "severity_rules", None):
        return SeverityRules.load(args.severity_rules)
    return None


def _category_rules(args) -> CategoryRules:
    if getattr(args, "category_rules", None):
        return CategoryRules.load(args.category_rules)
    return default_category_rules()


# ---------------------------------------------------------------- gen

def _cmd_gen(args) -> int:
    spec = CorpusSpec(
        k_templates=args.templates,
        n_lines=args.lines,
        seed=args.seed,
        n_hosts=args.hosts,
        start_epoch=args.start_epoch,
        duration=args.duration,
    )
    paths = write_corpus(args.out_dir, spec)
    print(
        f"wrote {args.lines} lines from {args.templates} templates to "
        f"{paths['corpus']}",
        file=sys.stderr,
    )
    return 0


# ---------------------------------------------------------------- signatures

def _group_to_json(group: SignatureGroup) -> str:
    return json.dumps(
        {
            "signature": f"{group.signature.key:016x}",
            "masked_form": group.signature.masked_form,
            "member_count": group.member_count,
            "representatives": [r.message for r in group.representatives],
        },
        separators=(",", ":"),
        ensure_ascii=False,
    )


def _cmd_signatures(args) -> int:
    groups = group_records(read_records(args.input), n_samples=args.samples, seed=args.seed)
    fh, close = _open_out(args.out)
    try:
        for group in groups:
            fh.write(_group_to_json(group) + "\n")
    finally:
        if close:
            fh.close()
    print(f"{len(groups)} signature groups", file=sys.stderr)
    return 0


def read_groups_jsonl(path: str) -> list[SignatureGroup]:
    groups = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            masked = obj["masked_form"]
            reps = tuple(
                RawLogRecord(line_no=i + 1, message=m)
                for i, m in enumerate(obj["representatives"])
            )
            groups.append(
                SignatureGroup(
                    signature=Signature(
                        key=signature_key(masked),
                        masked_form=masked,
                        token_count=len(masked.split()),
                    ),
                    member_count=int(obj["member_count"]),
                    representatives=reps,
                    reservoir_seed=0,
                )
            )
    return groups


# ---------------------------------------------------------------- templates

def _cmd_templates(args) -> int:
    groups = read_groups_jsonl(args.groups)
    if not groups:
        raise DataError(f"no groups in {args.groups}")
    lines: list[str] = []
    seen: set[str] = set()
    n_errors = 0
    if args.mode == "heuristic":
        for group in groups:
            for template in heuristic_templates(group):
                if template.raw not in seen:
                    seen.add(template.raw)
                    lines.append(template.raw)
    else:
        settings = load_llm_settings(args.config)
        if args.base_url:
            settings.base_url = args.base_url
        if args.model:
            settings.model_name = args.model
        cfg = settings.resolve()
        spec = PromptSpec(max_examples=args.max_examples)
        results = generate_for_groups(groups, cfg, spec)
        for result in results:
            if result.error is not None:
                n_errors += 1
                print(
                    f"group {result.group.signature.key:016x}: {result.error}",
                    file=sys.stderr,
                )
                continue
            for err in result.line_errors:
                print(
                    f"group {result.group.signature.key:016x} line "
                    f"{err.line_no}: {err.reason}",
                    file=sys.stderr,
                )
            for template in result.templates:
                if template.raw not in seen:
                    seen.add(template.raw)
                    lines.append(template.raw)
        if not lines and n_errors:
            raise EndpointError(f"all {n_errors} endpoint calls failed")
    _write_out(args.out, "".join(line + "\n" for line in lines))
    print(f"{len(lines)} templates ({n_errors} group errors)", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- parse

def _event_to_json(event) -> str:
    obj = {
        "line_no": event.line_no,
        "template_id": event.template_id,
        "variables": event.variables,
        "severity": event.severity.value,
    }
    if event.timestamp is not None:
        obj["ts"] = event.timestamp
    if event.host is not None:
        obj["host"] = event.host
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def read_events_jsonl(path: str) -> list[EventView]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            events.append(
                EventView(
                    line_no=int(obj["line_no"]),
                    template_id=obj["template_id"],
                    variables=dict(obj.get("variables", {})),
                    severity=Severity(obj["severity"]),
                    timestamp=obj.get("ts"),
                    host=obj.get("host"),
                )
            )
    return events


def _cmd_parse(args) -> int:
    cset = compile_templates(load_templates_file(args.templates))
    rules = _severity_rules(args)
    total = matched = 0
    fh, close = _open_out(args.out)
    try:
        for record in read_records(args.input):
            total += 1
            event = match_record(cset, record, severity_rules=rules)
            if event is not None:
                matched += 1
                fh.write(_event_to_json(event) + "\n")
    finally:
        if close:
            fh.close()
    print(f"parsed {matched}/{total} records", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- coverage

def _chunked(iterable, size: int):
    chunk = []
    for item in iterable:
        chunk.append(item)
        if len(chunk) >= size:
            yield chunk
            chunk = []
    if chunk:
        yield chunk


def _cmd_coverage(args) -> int:
    cset = compile_templates(load_templates_file(args.templates))
    records = read_records(args.input)
    if args.threads and args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            reports = pool.map(
                lambda chunk: coverage(cset, chunk), _chunked(records, 65536)
            )
            report = merge_coverage(reports)
    else:
        report = coverage(cset, records)
    if args.format == "json":
        payload = {
            "total": report.total,
            "parsed": report.parsed,
            "coverage_pct": report.coverage_pct,
            "unmatched_examples": list(report.unmatched_examples[:10]),
            "empty_input": report.empty_input,
        }
        _write_out(args.out, json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    else:
        lines = [f"coverage: {report.coverage_pct:.4f}% ({report.parsed}/{report.total})"]
        if report.empty_input:
            lines.append("warning: no input records")
        for example in report.unmatched_examples[:10]:
            lines.append(f"unmatched: {example}")
        _write_out(args.out, "".join(line + "\n" for line in lines))
    return 0


# ---------------------------------------------------------------- perturb

def _kinds_from_arg(arg: str):
    if arg == "all":
        return ALL_KINDS
    by_name = {k.name.lower(): k for k in PerturbationKind}
    kinds = []
    for piece in arg.split(","):
        key = piece.strip().lower().replace("-", "_").replace(" ", "_")
        if key not in by_name:
            raise UsageError(
                f"unknown perturbation kind {piece!r}; choose from "
                f"{', '.join(sorted(by_name))}"
            )
        kinds.append(by_name[key])
    return kinds


def _cmd_perturb(args) -> int:
    templates = load_templates_file(args.templates)
    messages = [r.message for r in read_records(args.input)]
    kinds = _kinds_from_arg(args.kinds)
    cset = compile_templates(templates)
    if args.extractor == "matcher":
        extractor = matcher_extractor(cset)
    else:
        settings = load_llm_settings(args.config)
        if args.base_url:
            settings.base_url = args.base_url
        cfg = settings.resolve()

        def extractor(message: str) -> str:
            group = SignatureGroup(
                signature=Signature(0, message, len(message.split())),
                member_count=1,
                representatives=(RawLogRecord(line_no=1, message=message),),
                reservoir_seed=0,
            )
            result = extract_templates(request_templates(build_prompt(group), cfg))
            return result.templates[0].raw if result.templates else ""

    rows = evaluate(
        templates,
        messages,
        kinds=kinds,
        extractor=extractor,
        seed=args.seed,
        metric_level=args.metric_level,
    )
    _write_out(args.out, robustness_csv(rows))
    if args.failures:
        with open(args.failures, "w", encoding="utf-8") as fh:
            for row in rows:
                for original, transformed in row.failure_examples:
                    fh.write(
                        json.dumps(
                            {
                                "kind": row.kind.value,
                                "original_pattern": original,
                                "transformed_pattern": transformed,
                            },
                            separators=(",", ":"),
                            ensure_ascii=False,
                        )
                        + "\n"
                    )
    return 0


# ---------------------------------------------------------------- mine

def _patterns_map(args) -> dict[str, str]:
    if getattr(args, "templates", None):
        cset = compile_templates(load_templates_file(args.templates))
        return {t.id: t.raw for t in cset.templates}
    return {}


def _render_table(header: list[str], rows: list[list[str]], fmt: str) -> str:
    if fmt == "jsonl":
        return "".join(
            json.dumps(dict(zip(header, row)), separators=(",", ":"), ensure_ascii=False)
            + "\n"
            for row in rows
        )
    sep = "\t" if fmt == "tsv" else ","
    lines = [sep.join(header)]
    lines += [sep.join(row) for row in rows]
    return "\n".join(lines) + "\n"


def _fingerprint_table(rows):
    header = [
        "template_id", "pattern", "count", "first_seen", "last_seen",
        "severity", "distinct_hosts",
    ]
    body = []
    for r in rows:
        body.append(
            [
                r.template_id,
                r.pattern,
                str(r.count),
                "" if r.first_seen is None else f"{r.first_seen:.3f}",
                "" if r.last_seen is None else f"{r.last_seen:.3f}",
                r.severity.value,
                str(r.distinct_hosts),
            ]
        )
    return header, body


def _fingerprint_tsv(rows) -> str:
    header, body = _fingerprint_table(rows)
    return _render_table(header, body, "tsv")


def _cmd_mine_fingerprint(args) -> int:
    rows = fingerprint(read_events_jsonl(args.events), _patterns_map(args))
    header, body = _fingerprint_table(rows)
    _write_out(args.out, _render_table(header, body, args.format))
    return 0


def _cmd_mine_severity(args) -> int:
    rows = severity_distribution(read_events_jsonl(args.events))
    body = [[sev.value, str(count), f"{pct:.4f}"] for sev, count, pct in rows]
    _write_out(args.out, _render_table(["severity", "count", "percent"], body, args.format))
    return 0


def _temporal_csv(series) -> str:
    header = ["window_start"] + list(series.categories) + ["total"]
    lines = [",".join(header)]
    totals = series.totals()
    for i, start in enumerate(series.window_starts):
        cells = [f"{start:.3f}"]
        cells += [str(series.counts[c][i]) for c in series.categories]
        cells.append(str(totals[i]))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _cdf_csv(series, cdf) -> str:
    header = ["window_start"] + list(series.categories)
    lines = [",".join(header)]
    for i, start in enumerate(series.window_starts):
        cells = [f"{start:.3f}"]
        cells += [f"{cdf[c][i]:.6f}" for c in series.categories]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _cmd_mine_temporal(args) -> int:
    series = temporal_histogram(read_events_jsonl(args.events), args.window)
    _write_out(args.out, _temporal_csv(series))
    if args.cdf:
        _write_out(args.cdf, _cdf_csv(series, category_cdf(series)))
    return 0


def _cmd_mine_jobs(args) -> int:
    joined = join_jobs(read_events_jsonl(args.events), read_jobs_csv(args.jobs))
    fh, close = _open_out(args.out)
    try:
        for je in joined:
            fh.write(
                json.dumps(
                    {
                        "line_no": je.event.line_no,
                        "template_id": je.event.template_id,
                        "severity": je.event.severity.value,
                        "job_id": je.job_id,
                        "account": je.account,
                        "matched": je.matched,
                    },
                    separators=(",", ":"),
                    ensure_ascii=False,
                )
                + "\n"
            )
    finally:
        if close:
            fh.close()
    return 0


def _matrix_csv(matrix) -> str:
    lines = ["category," + ",".join(matrix.cols)]
    for i, row_label in enumerate(matrix.rows):
        cells = ",".join(str(int(v)) for v in matrix.cells[i])
        lines.append(f"{row_label},{cells}")
    return "\n".join(lines) + "\n"


def _cmd_mine_cluster(args) -> int:
    events = read_events_jsonl(args.events)
    jobs = read_jobs_csv(args.jobs)
    patterns = _patterns_map(args)
    rules = _category_rules(args)
    matrix = build_category_domain_matrix(join_jobs(events, jobs), patterns, rules)
    clustered = ward_cluster(matrix)
    os.makedirs(args.out_dir, exist_ok=True)
    with open(os.path.join(args.out_dir, "matrix.csv"), "w", encoding="utf-8") as fh:
        fh.write(_matrix_csv(matrix))
    with open(os.path.join(args.out_dir, "row_order.txt"), "w", encoding="utf-8") as fh:
        fh.write("".join(matrix.rows[i] + "\n" for i in clustered.row_order))
    with open(os.path.join(args.out_dir, "col_order.txt"), "w", encoding="utf-8") as fh:
        fh.write("".join(matrix.cols[j] + "\n" for j in clustered.col_order))
    print(
        f"{len(matrix.rows)} categories x {len(matrix.cols)} domains",
        file=sys.stderr,
    )
    return 0


def _read_pairs_csv(path: str):
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split(",")
            if fields[0].lower() in ("sender", "sender_id", "x"):
                continue
            x, y = float(fields[0]), float(fields[1])
            w = float(fields[2]) if len(fields) > 2 else 1.0
            pairs.append((x, y, w))
    return pairs


def _kde_csv(grid) -> str:
    lines = ["y\\x," + ",".join(f"{x:.6f}" for x in grid.x_centers)]
    for i, y in enumerate(grid.y_centers):
        row = ",".join(f"{v:.9e}" for v in grid.values[i])
        lines.append(f"{y:.6f},{row}")
    return "\n".join(lines) + "\n"


def _cmd_mine_kde(args) -> int:
    bandwidth = None
    if args.bandwidth:
        try:
            hx, hy = (float(v) for v in args.bandwidth.split(","))
        except ValueError as exc:
            raise UsageError(f"--bandwidth expects HX,HY, got {args.bandwidth!r}") from exc
        bandwidth = (hx, hy)
    grid = kde_density(_read_pairs_csv(args.pairs), (args.nx, args.ny), bandwidth)
    _write_out(args.out, _kde_csv(grid))
    return 0


# ---------------------------------------------------------------- report

def _cmd_report(args) -> int:
    events = read_events_jsonl(args.events)
    if not events:
        raise DataError(f"no events in {args.events}")
    os.makedirs(args.out_dir, exist_ok=True)

    def emit(name: str, text: str) -> None:
        with open(os.path.join(args.out_dir, name), "w", encoding="utf-8") as fh:
            fh.write(text)

    rows = severity_distribution(events)
    emit(
        "severity.csv",
        "severity,count,percent\n"
        + "".join(f"{s.value},{c},{p:.4f}\n" for s, c, p in rows),
    )
    patterns = _patterns_map(args)
    emit("fingerprint.tsv", _fingerprint_tsv(fingerprint(events, patterns)))

    series = temporal_histogram(events, args.window)
    emit("temporal.csv", _temporal_csv(series))
    cdf = category_cdf(series)
    emit("cdf.csv", _cdf_csv(series, cdf))
    t0 = series.window_starts[0]
    hours = [(start - t0) / 3600.0 for start in series.window_starts]
    emit(
        "temporal.svg",
        line_chart(
            {
                c: list(zip(hours, map(float, series.counts[c])))
                for c in series.categories
            },
            title=f"log volume per {series.window_seconds:.0f}s window",
            x_label="hours since first window",
            y_label="events per window",
        ),
    )
    emit(
        "cdf.svg",
        line_chart(
            {c: list(zip(hours, cdf[c])) for c in series.categories},
            title="cumulative share of events by category",
            x_label="hours since first window",
            y_label="cumulative fraction",
        ),
    )

    if args.jobs:
        jobs = read_jobs_csv(args.jobs)
        matrix = build_category_domain_matrix(
            join_jobs(events, jobs), patterns, _category_rules(args)
        )
        clustered = ward_cluster(matrix)
        emit("matrix.csv", _matrix_csv(matrix))
        emit("row_order.txt", "".join(matrix.rows[i] + "\n" for i in clustered.row_order))
        emit("col_order.txt", "".join(matrix.cols[j] + "\n" for j in clustered.col_order))
        emit(
            "matrix.svg",
            heatmap(
                clustered.reordered_cells(),
                title="log categories x science domains (clustered, log color scale)",
                row_labels=[matrix.rows[i] for i in clustered.row_order],
                col_labels=[matrix.cols[j] for j in clustered.col_order],
                log_scale=True,
            ),
        )

    if args.pairs:
        grid = kde_density(_read_pairs_csv(args.pairs), (args.nx, args.ny))
        emit("kde.csv", _kde_csv(grid))
        emit(
            "kde.svg",
            heatmap(
                grid.values,
                title="interconnect error density (sender x receiver)",
                cell=max(2, 512 // max(len(grid.x_centers), 1)),
            ),
        )
    print(f"report written to {args.out_dir}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------- peft-demo

def _cmd_peft_demo(_args) -> int:
    adapter = LoraAdapter(a=[[1.0], [2.0]], b=[[3.0, 4.0]], rank=1, alpha=2.0)
    delta = lora_delta(adapter)
    w0 = [[10.0, 0.0], [0.0, 10.0]]
    updated = lora_apply(w0, adapter)
    print("low-rank update: delta = alpha * (A @ B) / rank")
    print(f"A = {adapter.a.tolist()}")
    print(f"B = {adapter.b.tolist()}")
    print(f"rank = {adapter.rank}, alpha = {adapter.alpha}")
    print(f"delta = {delta.tolist()}")
    print(f"W0 = {w0}")
    print(f"W' = W0 + delta = {updated.tolist()}")
    print(f"rank(delta) = {elimination_rank(delta)} (bounded by rank = {adapter.rank})")
    return 0


# ---------------------------------------------------------------- entry

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="logsift", description=__doc__)
    parser.add_argument("--version", action="version", version=f"logsift {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--seed", type=int, default=42, help="base RNG seed")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("gen", help="generate a synthetic corpus with gold files")
    common(p)
    p.add_argument("--templates", type=int, required=True, metavar="K")
    p.add_argument("--lines", type=int, required=True, metavar="N")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--hosts", type=int, default=64)
    p.add_argument("--start-epoch", type=float, default=1735689600.0)
    p.add_argument("--duration", type=float, default=86400.0)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("signatures", help="stage 1: group lines by masked signature")
    common(p)
    p.add_argument("input")
    p.add_argument("--samples", type=int, default=5, help="representatives per group")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_signatures)

    p = sub.add_parser("templates", help="stage 2: generate templates per group")
    common(p)
    p.add_argument("--groups", required=True, help="signatures JSONL")
    p.add_argument("--mode", choices=("heuristic", "llm"), default="heuristic")
    p.add_argument("--out", default="-")
    p.add_argument("--config", help="config file with an [llm] section")
    p.add_argument("--base-url")
    p.add_argument("--model")
    p.add_argument("--max-examples", type=int, default=5)
    p.set_defaults(func=_cmd_templates)

    p = sub.add_parser("parse", help="stage 3: bind lines to templates -> JSONL")
    common(p)
    p.add_argument("input")
    p.add_argument("--templates", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--severity-rules")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("coverage", help="coverage rate of a template set")
    common(p)
    p.add_argument("input")
    p.add_argument("--templates", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_coverage)

    p = sub.add_parser("perturb", help="robustness evaluation -> CSV")
    common(p)
    p.add_argument("--templates", required=True, help="gold templates file")
    p.add_argument("--input", required=True, help="messages, one per line")
    p.add_argument("--kinds", default="all")
    p.add_argument("--extractor", choices=("matcher", "llm"), default="matcher")
    p.add_argument("--metric-level", choices=("pattern", "message"), default="pattern")
    p.add_argument("--out", default="-")
    p.add_argument("--failures", help="failure examples JSONL path")
    p.add_argument("--config")
    p.add_argument("--base-url")
    p.set_defaults(func=_cmd_perturb)

    mine = sub.add_parser("mine", help="aggregate analytics over parsed events")
    mine_sub = mine.add_subparsers(dest="mine_command", required=True, parser_class=_Parser)

    p = mine_sub.add_parser("fingerprint")
    common(p)
    p.add_argument("--events", required=True)
    p.add_argument("--templates")
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("tsv", "csv", "jsonl"), default="tsv")
    p.set_defaults(func=_cmd_mine_fingerprint)

    p = mine_sub.add_parser("severity")
    common(p)
    p.add_argument("--events", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--format", choices=("csv", "tsv", "jsonl"), default="csv")
    p.set_defaults(func=_cmd_mine_severity)

    p = mine_sub.add_parser("temporal")
    common(p)
    p.add_argument("--events", required=True)
    p.add_argument("--window", type=float, default=300.0)
    p.add_argument("--out", default="-")
    p.add_argument("--cdf", help="also write the per-category CDF CSV here")
    p.set_defaults(func=_cmd_mine_temporal)

    p = mine_sub.add_parser("jobs")
    common(p)
    p.add_argument("--events", required=True)
    p.add_argument("--jobs", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_mine_jobs)

    p = mine_sub.add_parser("cluster")
    common(p)
    p.add_argument("--events", required=True)
    p.add_argument("--jobs", required=True)
    p.add_argument("--templates")
    p.add_argument("--category-rules")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=_cmd_mine_cluster)

    p = mine_sub.add_parser("kde")
    common(p)
    p.add_argument("--pairs", required=True, help="sender,receiver[,weight] CSV")
    p.add_argument("--nx", type=int, default=64)
    p.add_argument("--ny", type=int, default=64)
    p.add_argument("--bandwidth", help="HX,HY (default: Silverman per axis)")
    p.add_argument("--out", default="-")
    p.set_defaults(func=_cmd_mine_kde)

    p = sub.add_parser("report", help="CSV + SVG bundle from parsed events")
    common(p)
    p.add_argument("--events", required=True)
    p.add_argument("--templates")
    p.add_argument("--jobs")
    p.add_argument("--pairs")
    p.add_argument("--category-rules")
    p.add_argument("--window", type=float, default=300.0)
    p.add_argument("--nx", type=int, default=64)
    p.add_argument("--ny", type=int, default=64)
    p.add_argument("--out-dir", default="report")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("peft-demo", help="worked low-rank update example")
    common(p)
    p.set_defaults(func=_cmd_peft_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"logsift: usage error: {exc}", file=sys.stderr)
        return 1
    except EndpointError as exc:
        print(f"logsift: endpoint error: {exc}", file=sys.stderr)
        return 3
    except (DataError, LogsiftError, ValueError, KeyError, OSError) as exc:
        print(f"logsift: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
