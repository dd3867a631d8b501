"""Command line front end: ``heckeblocks verify|explain|sweep|corpus``.

Exit codes: 0 every case met its expectation, 1 some case failed,
2 the case file (or command line) did not parse, 3 internal error.
"""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from .cases import KINDS, CaseError, parse_file, parse_line, parse_text
from .kinds import explain_instance
from .runner import RunReport, run_cases

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INTERNAL = 0, 1, 2, 3


def bundled_names() -> list:
    root = resources.files("heckeblocks") / "corpus"
    return sorted(p.name[: -len(".cases")] for p in root.iterdir() if p.name.endswith(".cases"))


def load_cases(source: str, flavor: str | None) -> list:
    """Parse a case file; ``@name`` is a bundled corpus and ``@all`` is all of them."""
    if source.startswith("@"):
        name = source[1:]
        names = bundled_names() if name == "all" else [name]
        cases = []
        for n in names:
            if n not in bundled_names():
                raise CaseError(source, 0, f"no bundled corpus {n!r} (available: {', '.join(bundled_names())})")
            text = (resources.files("heckeblocks") / "corpus" / f"{n}.cases").read_text(encoding="utf-8")
            cases.extend(parse_text(text, f"@{n}", flavor))
        return cases
    p = Path(source)
    if not p.is_file():
        raise CaseError(source, 0, "cannot read case file")
    return parse_file(p, flavor)


def _emit(report: RunReport, args) -> None:
    text = report.to_json(stable=args.stable)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    for o in report.outcomes:
        if o.status == "failed":
            bad = next((e for inst in o.entries for e in inst if e["status"] != "verified"), None)
            why = "expected a nonzero residual, all identities verified" if o.spec.expect == "fail" else (
                f"{bad['identity']}: {bad['residual'][:300]}" if bad else "failed"
            )
            print(f"FAILED {o.spec.case_id} ({o.spec.path}:{o.spec.line}): {why}", file=sys.stderr)
        elif o.status == "error":
            print(f"ERROR {o.spec.case_id} ({o.spec.path}:{o.spec.line}): {o.errors[0]}", file=sys.stderr)


def _run(cases: list, source: str, args) -> int:
    if not cases:
        print(f"warning: {source} contains no cases", file=sys.stderr)
    report = run_cases(cases, source, max(1, args.jobs))
    _emit(report, args)
    return report.exit_code


def cmd_verify(args) -> int:
    cases = load_cases(args.file, args.flavor)
    return _run(cases, args.file, args)


def cmd_sweep(args) -> int:
    line = " ".join([args.kind] + list(args.bindings))
    spec = parse_line(line, "<command line>", 1, args.flavor)
    return _run([spec], "<command line>", args)


def cmd_explain(args) -> int:
    cases = load_cases(args.file, args.flavor)
    match = [c for c in cases if c.case_id == args.case_id]
    if not match:
        raise CaseError(args.file, 0, f"no case with id {args.case_id!r}")
    spec = match[0]
    insts = spec.instances
    if args.instance is not None:
        if not 0 <= args.instance < len(insts):
            raise CaseError(args.file, spec.line, f"instance {args.instance} out of range 0..{len(insts) - 1}")
        insts = [insts[args.instance]]
    print(f"case {spec.case_id} ({spec.path}:{spec.line}): {spec.text}")
    for inst in insts:
        print(explain_instance(spec.kind, inst))
    return EXIT_OK


def cmd_corpus(args) -> int:
    for n in bundled_names():
        print(f"@{n}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heckeblocks", description="Exact verification of Hecke transport identities.")
    sub = ap.add_subparsers(dest="command", required=True)

    def run_flags(p):
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        p.add_argument("--jobs", type=int, default=1, help="worker processes (report order is file order)")
        p.add_argument("--stable", action="store_true", help="omit timing fields so reports compare byte for byte")
        p.add_argument("--flavor", choices=["sl2", "pgl2"], help="default flavor for cases that do not set one")

    p = sub.add_parser("verify", help="run every case of a case file (@name for a bundled corpus)")
    p.add_argument("file")
    run_flags(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("sweep", help="run one case given on the command line")
    p.add_argument("kind", choices=KINDS)
    p.add_argument("bindings", nargs="*", help="key=value bindings, lists a,b and ranges lo..hi")
    run_flags(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("explain", help="print the instantiated operators and relations of one case")
    p.add_argument("case_id")
    p.add_argument("file")
    p.add_argument("--instance", type=int, help="only this instance of the case's sweep")
    p.add_argument("--flavor", choices=["sl2", "pgl2"])
    p.set_defaults(fn=cmd_explain)

    p = sub.add_parser("corpus", help="list bundled case files")
    p.set_defaults(fn=cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CaseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


__all__ = ["main", "build_parser", "load_cases", "bundled_names", "run_cases"]
