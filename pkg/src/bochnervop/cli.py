"""Command-line front end.

Exit codes:
    0  success, every check matched
    1  at least one mismatch (verify, functionals, report)
    2  usage or spec error
    3  internal error (guard exceeded, degree not lowered, sigma mismatch)
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from .corpus import CORPUS_N, corpus_report
from .errors import INTERNAL_ERRORS, BandwidthZero, SpecError, VopError
from .families import ORDERINGS, FamilySpec, build_family, generate_table
from .shiftop import PolyTable
from .verify import (
    NOT_APPLICABLE,
    CheckResult,
    Report,
    build_functionals,
    extract_recurrence,
    family_checks,
    maroni_check,
)

COMMANDS = ("gen", "verify", "recur", "functionals", "report")


@dataclass
class CliConfig:
    command: str
    spec: str | None = None
    format: str = "json"
    n: int | None = None
    ordering: str = "both"
    out: str | None = None
    table: str | None = None

    @property
    def orderings(self) -> tuple[str, ...]:
        return ORDERINGS if self.ordering == "both" else (self.ordering,)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bochnervop",
        description="Exact generation and verification of polynomial families P_n = exp(q(B)) x^n.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--spec", help="family spec: a file path, '-' for stdin, or inline JSON")
    parser.add_argument("--format", choices=("json", "text"), default="json")
    parser.add_argument("--n", type=int, help="override the table size N")
    parser.add_argument("--ordering", choices=ORDERINGS + ("both",), default="both")
    parser.add_argument("--out", help="write the document here instead of stdout")
    parser.add_argument("--table", help="verify: use a table produced by 'gen' instead of regenerating")
    return parser


def _read_source(source: str, stdin=None) -> tuple[str, str]:
    if source == "-":
        return (stdin or sys.stdin).read(), "<stdin>"
    if source.lstrip().startswith("{"):
        return source, "<inline>"
    try:
        with open(source, encoding="utf-8") as fh:
            return fh.read(), source
    except OSError as exc:
        raise SpecError(f"cannot read {source}: {exc.strerror}") from exc


def _parse_json(text: str, where: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc


def load_spec(config: CliConfig, stdin=None) -> FamilySpec:
    if config.spec is None:
        raise SpecError(f"'{config.command}' needs --spec")
    text, where = _read_source(config.spec, stdin)
    data = _parse_json(text, where)
    try:
        spec = FamilySpec.from_json(data)
    except SpecError as exc:
        raise SpecError(f"{where}: {exc}") from exc
    if config.n is not None:
        spec = spec.with_N(config.n)
    return spec


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# commands -------------------------------------------------------------------


def cmd_gen(config: CliConfig, spec: FamilySpec):
    table = generate_table(spec)
    doc = table.to_json()
    doc["spec"] = spec.to_json()
    text = "".join(f"P_{n} = {p}\n" for n, p in enumerate(table))
    return doc, text, 0


def _load_table(path: str, spec: FamilySpec) -> tuple[PolyTable, FamilySpec]:
    text, where = _read_source(path)
    table = PolyTable.from_json(_parse_json(text, where))
    spec = spec.with_N(table.N)
    if table.spec_hash and table.spec_hash != spec.hash():
        raise SpecError(f"{where}: table was generated from a different spec")
    return table, spec


def cmd_verify(config: CliConfig, spec: FamilySpec):
    if config.table:
        table, spec = _load_table(config.table, spec)
        fam = build_family(spec)
    else:
        fam = build_family(spec)
        table = generate_table(spec, fam)
    report = Report(family_checks(fam, table, config.orderings))
    doc = report.to_json()
    doc["spec"] = spec.to_json()
    return doc, report.to_text(), report.exit_status


def cmd_recur(config: CliConfig, spec: FamilySpec):
    rec = extract_recurrence(generate_table(spec))
    doc = rec.to_json()
    doc["spec"] = spec.to_json()
    lines = [f"bandwidth: {rec.bandwidth}"]
    for n in range(rec.N):
        parts = [f"gamma_{j} = {g}" for j, g in enumerate(rec.gammas[n]) if g]
        lines.append(f"n={n}: " + (", ".join(parts) if parts else "x P_n = P_(n+1)"))
    for form in doc["closed_forms"]:
        text = form["text"] if form["text"] is not None else "(not determined)"
        lines.append(f"gamma_{form['j']}(n) = {text}")
    return doc, "\n".join(lines) + "\n", 0


def cmd_functionals(config: CliConfig, spec: FamilySpec):
    table = generate_table(spec)
    rec = extract_recurrence(table)
    d = rec.bandwidth
    try:
        fn = build_functionals(table, d) if d else None
        result = maroni_check(table, d, rec, fn)
    except BandwidthZero as exc:
        fn, result = None, CheckResult("maroni", NOT_APPLICABLE, "Maroni conditions", note=str(exc))
    doc = {
        "spec": spec.to_json(),
        "functionals": fn.to_json() if fn else {"d": 0, "moments": []},
        "maroni": result.to_json(),
    }
    lines = [f"bandwidth: {d}"]
    if fn:
        for k, row in enumerate(fn.moments):
            lines += [f"u_{k}(x^{j}) = {m}" for j, m in enumerate(row)]
    lines.append(f"maroni: {result.status}" + (f" ({result.note})" if result.note else ""))
    for key, value in (result.witness or {}).items():
        lines.append(f"    {key} = {value}")
    return doc, "\n".join(lines) + "\n", 0 if result.ok else 1


def cmd_report(config: CliConfig, stdin=None):
    extra = [load_spec(config, stdin)] if config.spec else []
    report = corpus_report(config.n if config.n is not None else CORPUS_N, extra, config.orderings)
    return report.to_json(), report.to_text(), report.exit_status


def run(config: CliConfig, stdout=None, stdin=None) -> int:
    """Execute one command; return the exit status."""
    stdout = stdout or sys.stdout
    try:
        if config.n is not None and config.n < 0:
            raise SpecError("--n must be nonnegative")
        if config.command == "report":
            doc, text, status = cmd_report(config, stdin)
        else:
            spec = load_spec(config, stdin)
            handler = {"gen": cmd_gen, "verify": cmd_verify, "recur": cmd_recur, "functionals": cmd_functionals}
            doc, text, status = handler[config.command](config, spec)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except INTERNAL_ERRORS as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except VopError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, (KeyError, IndexError)) else 3

    payload = _dump(doc) if config.format == "json" else text
    if config.out:
        with open(config.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        stdout.write(payload)
    return status


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = CliConfig(
        command=args.command,
        spec=args.spec,
        format=args.format,
        n=args.n,
        ordering=args.ordering,
        out=args.out,
        table=args.table,
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
