"""Line-oriented case files: ``kind key=value ...`` with ``#`` comments.

Values may be comma lists (``a=1,-2``) and inclusive integer ranges
(``n=-2..2``); a case expands into the cartesian product of its list-valued
keys.  ``id=`` names the case (default ``<kind>-<line>``) and
``expect=fail`` marks a mutation case that must produce a nonzero residual.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

KINDS = (
    "virasoro",
    "currents",
    "conjugation-nilpotent",
    "conjugation-coweight",
    "minuscule",
    "factorize",
    "hecke-class",
    "ward-transport",
    "kz-transport",
    "two-point",
    "casimir",
)

FLAVORS = ("sl2", "pgl2")
SYMBOLIC = "sym"

_RANGE = re.compile(r"^(-?\d+)\.\.(-?\d+)$")
_KEY = re.compile(r"^[A-Za-z][A-Za-z0-9_-]*$")

# keys each kind accepts (id, expect, flavor are always allowed)
ALLOWED = {
    "virasoro": {"m", "n", "depth"},
    "currents": {"n", "m", "basis", "depth"},
    "conjugation-nilpotent": {"a", "x", "j", "n", "depth"},
    "conjugation-coweight": {"lambda", "n", "depth", "method"},
    "minuscule": {"lambda", "depth"},
    "factorize": {"a", "mu", "lambda", "j", "regime"},
    "hecke-class": {"type", "mu", "lambda", "root", "j", "nu"},
    "ward-transport": {"N", "chi", "k", "mutation", "order"},
    "kz-transport": {"N", "i", "chi", "k", "mutation", "rounds"},
    "two-point": {"chi", "k"},
    "casimir": {"points"},
}

# keys whose comma lists are single values, not sweeps
TUPLE_KEYS = {"mu", "lambda", "root", "nu"}
TUPLE_KINDS = {"hecke-class"}


class CaseError(ValueError):
    """A case file problem, reported as ``path:line: message``."""

    def __init__(self, path: str, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line
        self.message = message


@dataclass
class CaseSpec:
    kind: str
    case_id: str
    params: dict  # key -> list of values (sweep axes) or scalar
    expect: str = "pass"
    flavor: list | None = None  # None: the --flavor default or pgl2
    path: str = "<string>"
    line: int = 0
    text: str = ""
    instances: list = field(default_factory=list)

    def describe(self) -> str:
        return f"{self.case_id} ({self.kind}, {len(self.instances)} instance(s))"


def parse_scalar(text: str):
    """``sym`` stays a string; integers and fractions become Fractions; other words stay."""
    if text == SYMBOLIC:
        return SYMBOLIC
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        return text


def parse_value(text: str) -> list:
    """Expand ``a,b`` lists and ``lo..hi`` ranges into a flat list of values."""
    if text == "":
        raise ValueError("empty value")
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            raise ValueError(f"empty item in list {text!r}")
        m = _RANGE.match(part)
        if m:
            lo, hi = int(m.group(1)), int(m.group(2))
            if hi < lo:
                raise ValueError(f"empty range {part!r}")
            out.extend(Fraction(v) for v in range(lo, hi + 1))
        else:
            out.append(parse_scalar(part))
    return out


def parse_line(line: str, path: str = "<string>", lineno: int = 0, default_flavor: str | None = None) -> CaseSpec | None:
    body = line.split("#", 1)[0].strip()
    if not body:
        return None
    tokens = body.split()
    kind = tokens[0]
    if kind not in KINDS:
        raise CaseError(path, lineno, f"unknown case kind {kind!r} (expected one of {', '.join(KINDS)})")
    params: dict = {}
    case_id = None
    expect = "pass"
    flavor = [default_flavor] if default_flavor else None
    for tok in tokens[1:]:
        if "=" not in tok:
            raise CaseError(path, lineno, f"expected key=value, got {tok!r}")
        key, value = tok.split("=", 1)
        if not _KEY.match(key):
            raise CaseError(path, lineno, f"bad key {key!r}")
        if key in params or (key == "id" and case_id is not None):
            raise CaseError(path, lineno, f"duplicate key {key!r}")
        if key == "id":
            case_id = value
        elif key == "expect":
            if value not in ("pass", "fail"):
                raise CaseError(path, lineno, f"expect must be pass or fail, got {value!r}")
            expect = value
        elif key == "flavor":
            names = [v.strip().lower() for v in value.split(",")]
            if not names or any(v not in FLAVORS for v in names):
                raise CaseError(path, lineno, f"flavor must be sl2, pgl2 or a list of them, got {value!r}")
            flavor = names
        else:
            if key not in ALLOWED[kind]:
                raise CaseError(path, lineno, f"{kind} does not take {key!r} (allowed: {', '.join(sorted(ALLOWED[kind]))})")
            try:
                if kind in TUPLE_KINDS and key in TUPLE_KEYS:
                    params[key] = [tuple(parse_scalar(p) for p in value.split(","))]
                else:
                    params[key] = parse_value(value)
            except ValueError as exc:
                raise CaseError(path, lineno, f"{key}: {exc}") from None
    spec = CaseSpec(kind, case_id or f"{kind}-{lineno}", params, expect, flavor, path, lineno, body)
    from .kinds import expand  # local import: kinds depends on the math modules

    try:
        spec.instances = expand(spec)
    except ValueError as exc:
        raise CaseError(path, lineno, str(exc)) from None
    return spec


def parse_text(text: str, path: str = "<string>", default_flavor: str | None = None) -> list:
    cases = []
    seen = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        spec = parse_line(line, path, lineno, default_flavor)
        if spec is None:
            continue
        if spec.case_id in seen:
            raise CaseError(path, lineno, f"duplicate case id {spec.case_id!r} (first on line {seen[spec.case_id]})")
        seen[spec.case_id] = lineno
        cases.append(spec)
    return cases


def parse_file(path, default_flavor: str | None = None) -> list:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise CaseError(str(path), 0, f"not UTF-8: {exc}") from None
    return parse_text(text, str(path), default_flavor)


def sweep_axes(params: dict, keys) -> list:
    """Cartesian product over ``keys`` (missing keys are skipped) as a list of dicts."""
    present = [k for k in keys if k in params]
    combos = itertools.product(*(params[k] for k in present))
    return [dict(zip(present, c)) for c in combos]
