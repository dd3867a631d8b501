"""Execute parsed cases, optionally in a process pool, and build the JSON report."""

from __future__ import annotations

import json
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .cases import CaseSpec
from .kinds import run_instance


@dataclass
class CaseOutcome:
    spec: CaseSpec
    entries: list = field(default_factory=list)  # per instance: list of entries
    seconds: float = 0.0
    errors: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if self.errors:
            return "error"
        if self.spec.expect == "fail":
            # a mutation case passes when every instance is caught
            ok = all(any(e["status"] != "verified" for e in inst) for inst in self.entries)
        else:
            ok = all(e["status"] == "verified" for inst in self.entries for e in inst)
        return "verified" if ok else "failed"


@dataclass
class RunReport:
    source: str
    outcomes: list
    seconds: float = 0.0

    @property
    def exit_code(self) -> int:
        if any(o.status == "error" for o in self.outcomes):
            return 3
        return 0 if all(o.status == "verified" for o in self.outcomes) else 1

    def to_dict(self, stable: bool = False) -> dict:
        cases, results = [], []
        for o in self.outcomes:
            s = o.spec
            case = {
                "case": s.case_id,
                "kind": s.kind,
                "line": s.line,
                "expect": s.expect,
                "status": o.status,
                "instances": len(s.instances),
                "identities": sum(len(i) for i in o.entries),
                "notes": _notes(s) + o.errors,
            }
            if not stable:
                case["seconds"] = round(o.seconds, 4)
            cases.append(case)
            for idx, inst in enumerate(o.entries):
                for e in inst:
                    results.append({"case": s.case_id, "instance": idx, **e})
        summary = {
            "cases": len(cases),
            "verified": sum(c["status"] == "verified" for c in cases),
            "failed": sum(c["status"] == "failed" for c in cases),
            "errors": sum(c["status"] == "error" for c in cases),
            "identities": len(results),
            "exit_code": self.exit_code,
        }
        if not stable:
            summary["seconds"] = round(self.seconds, 4)
        return {"source": self.source, "cases": cases, "results": results, "summary": summary}

    def to_json(self, stable: bool = False) -> str:
        return json.dumps(self.to_dict(stable), sort_keys=True, indent=2) + "\n"


def _notes(spec: CaseSpec) -> list:
    notes = []
    skipped = spec.params.get("_skipped")
    if skipped:
        notes.append(f"skipped {skipped} SL2 parameter combination(s) with odd pairings")
    return notes


def _task(args):
    kind, inst = args
    t0 = time.perf_counter()
    try:
        entries = run_instance(kind, inst)
        err = None
    except Exception as exc:  # reported as an internal error (exit 3)
        entries = []
        err = f"{type(exc).__name__}: {exc}\n" + traceback.format_exc(limit=4)
    return entries, time.perf_counter() - t0, err


def run_cases(cases: list, source: str = "<cases>", jobs: int = 1) -> RunReport:
    t0 = time.perf_counter()
    tasks = [(c.kind, inst) for c in cases for inst in c.instances]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_task, tasks, chunksize=1))
    else:
        results = [_task(t) for t in tasks]
    outcomes = []
    pos = 0
    for c in cases:
        o = CaseOutcome(c)
        for _ in c.instances:
            entries, secs, err = results[pos]
            pos += 1
            o.entries.append(entries)
            o.seconds += secs
            if err:
                o.errors.append(err.splitlines()[0])
        outcomes.append(o)
    return RunReport(source, outcomes, time.perf_counter() - t0)
