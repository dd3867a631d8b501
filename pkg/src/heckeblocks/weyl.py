"""Differential operators, twisted functions with formal jets, and jet reduction.

A :class:`TwistedFunction` is a finite sum of terms

    (prod of base^exponent) * rational_function * (monomial in jets of Psi)

where the exponents are polynomials in parameters (typically the weights and
the level), and the jets are formal partial derivatives of one unknown
function ``Psi`` of a fixed list of formal arguments.  A :class:`JetRecord`
assigns every formal argument its value as a rational function, so that
differentiating a jet is the chain rule through that record.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable, Mapping, Sequence

from .exact import EMPTY, Polynomial, RationalFunction, VarTable
from .exact.ratfunc import ratfunc_eq

RF = RationalFunction
Jet = tuple  # multi-index over the record's formal arguments
JetMono = tuple  # sorted tuple of jets
FactorKey = tuple  # sorted tuple of (base, exponent) polynomial pairs


class JetCapExceeded(ValueError):
    """A derivative would produce a jet beyond the declared order cap."""


class RelationError(ValueError):
    """A relation is not linear in jets, or carries twisted factors."""


def _rf(x) -> RationalFunction:
    return RationalFunction.coerce(x)


def _binom_multi(alpha, gamma) -> int:
    out = 1
    for a, g in zip(alpha, gamma):
        out *= math.comb(a, g)
    return out


# ---------------------------------------------------------------------------
# Differential operators


class DiffOp:
    """Finite sum ``sum_alpha c_alpha * D^alpha`` over declared variables."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(vars)
        clean = {}
        for alpha, c in (terms or {}).items():
            if len(alpha) != len(self.vars):
                raise ValueError("multi-index length does not match declared variables")
            c = _rf(c)
            if not c.is_zero():
                alpha = tuple(alpha)
                clean[alpha] = clean[alpha] + c if alpha in clean else c
        self.terms = {a: c for a, c in clean.items() if not c.is_zero()}

    @classmethod
    def _raw(cls, vars, terms) -> "DiffOp":
        obj = object.__new__(cls)
        obj.vars = vars
        obj.terms = terms
        return obj

    @classmethod
    def mult(cls, vars: Sequence[str], c) -> "DiffOp":
        return cls(vars, {(0,) * len(vars): c})

    @classmethod
    def partial(cls, vars: Sequence[str], name: str, order: int = 1, coeff=1) -> "DiffOp":
        vars = tuple(vars)
        alpha = [0] * len(vars)
        alpha[vars.index(name)] = order
        return cls(vars, {tuple(alpha): coeff})

    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def _align(self, other: "DiffOp") -> tuple["DiffOp", "DiffOp"]:
        if self.vars == other.vars:
            return self, other
        merged = self.vars + tuple(v for v in other.vars if v not in self.vars)
        return self.widen(merged), other.widen(merged)

    def widen(self, vars: Sequence[str]) -> "DiffOp":
        vars = tuple(vars)
        if vars == self.vars:
            return self
        pos = [vars.index(v) for v in self.vars]
        out = {}
        for a, c in self.terms.items():
            b = [0] * len(vars)
            for p, e in zip(pos, a):
                b[p] = e
            out[tuple(b)] = c
        return DiffOp._raw(vars, out)

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        a, b = self._align(other)
        out = dict(a.terms)
        for k, c in b.terms.items():
            v = out[k] + c if k in out else c
            if v.is_zero():
                out.pop(k, None)
            else:
                out[k] = v
        return DiffOp._raw(a.vars, out)

    def __neg__(self) -> "DiffOp":
        return DiffOp._raw(self.vars, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "DiffOp":
        """Left multiplication by a function ``c``."""
        c = _rf(c)
        if c.is_zero():
            return DiffOp._raw(self.vars, {})
        return DiffOp._raw(self.vars, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return diffop_compose(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return diffop_compose(self, other)

    def commutator(self, other: "DiffOp") -> "DiffOp":
        return diffop_compose(self, other) - diffop_compose(other, self)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def substitute(self, bindings: Mapping[str, object]) -> "DiffOp":
        out = {}
        for k, c in self.terms.items():
            v = _rf(c.substitute(bindings))
            if not v.is_zero():
                out[k] = v
        return DiffOp._raw(self.vars, out)

    def apply(self, f):
        return diffop_apply(self, f)

    def _sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for alpha, c in self._sorted_terms():
            ds = []
            for v, e in zip(self.vars, alpha):
                if e == 1:
                    ds.append(f"D[{v}]")
                elif e:
                    ds.append(f"D[{v},{e}]")
            parts.append(_join_coeff(c, "*".join(ds)))
        return _join_signed(parts)

    def __repr__(self) -> str:
        return f"DiffOp({self})"


def _join_coeff(c: RationalFunction, tail: str) -> str:
    text = str(c)
    if not tail:
        return text
    if text == "1":
        return tail
    if text == "-1":
        return "-" + tail
    simple = c.is_polynomial() and len(c.num.terms) == 1
    if simple:
        return f"{text}*{tail}"
    return f"({text})*{tail}"


def _join_signed(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
    return out


def diffop_compose(D1: DiffOp, D2: DiffOp) -> DiffOp:
    """``D1 o D2`` via the Leibniz rule."""
    a, b = D1._align(D2)
    n = len(a.vars)
    out: dict = {}
    deriv_cache: dict = {}

    def dcoef(beta, gamma):
        key = (beta, gamma)
        if key not in deriv_cache:
            c = b.terms[beta]
            for v, e in zip(a.vars, gamma):
                for _ in range(e):
                    c = c.diff(v)
            deriv_cache[key] = c
        return deriv_cache[key]

    for alpha, ca in a.terms.items():
        for beta in b.terms:
            for gamma in iproduct(*(range(x + 1) for x in alpha)):
                db = dcoef(beta, gamma)
                if db.is_zero():
                    continue
                coeff = ca * db * _binom_multi(alpha, gamma)
                idx = tuple(alpha[i] - gamma[i] + beta[i] for i in range(n))
                out[idx] = out[idx] + coeff if idx in out else coeff
    return DiffOp._raw(a.vars, {k: c for k, c in out.items() if not c.is_zero()})


def diffop_apply(D: DiffOp, F):
    """Apply ``D`` to a polynomial, rational function or :class:`TwistedFunction`."""
    if isinstance(F, (Polynomial, int, Fraction)):
        F = _rf(F)
    cache = {(0,) * len(D.vars): F}

    def deriv(alpha):
        if alpha in cache:
            return cache[alpha]
        i = max(j for j, e in enumerate(alpha) if e)
        prev = list(alpha)
        prev[i] -= 1
        val = deriv(tuple(prev)).diff(D.vars[i])
        cache[alpha] = val
        return val

    acc = None
    for alpha, c in sorted(D.terms.items(), key=lambda kv: (sum(kv[0]), kv[0])):
        piece = deriv(alpha) * c
        acc = piece if acc is None else acc + piece
    if acc is None:
        return F * 0
    return acc


# ---------------------------------------------------------------------------
# Jet records


class JetRecord:
    """Formal arguments of ``Psi`` with their values and jet-order caps.

    ``kinds[a]`` names the cap family of argument ``a`` (``"x"`` or ``"t"``);
    ``caps`` bounds the total derivative order within each family.
    """

    __slots__ = ("args", "kinds", "values", "caps", "name")

    def __init__(
        self,
        args: Sequence[str],
        kinds: Sequence[str],
        values: Sequence[object],
        caps: Mapping[str, int] | None = None,
        name: str = "Psi",
    ):
        if not (len(args) == len(kinds) == len(values)):
            raise ValueError("args, kinds and values must have equal length")
        self.args = tuple(args)
        self.kinds = tuple(kinds)
        self.values = tuple(_rf(v) for v in values)
        self.caps = dict(caps or {"x": 2, "t": 1})
        self.name = name

    @classmethod
    def identity(cls, table: VarTable, args: Sequence[str], kinds: Sequence[str], caps=None, name="Psi"):
        return cls(args, kinds, [RF.var(table, a) for a in args], caps, name)

    def with_values(self, values: Mapping[str, object]) -> "JetRecord":
        vals = [values.get(a, v) for a, v in zip(self.args, self.values)]
        return JetRecord(self.args, self.kinds, vals, self.caps, self.name)

    def with_caps(self, caps: Mapping[str, int]) -> "JetRecord":
        return JetRecord(self.args, self.kinds, self.values, caps, self.name)

    def substitute(self, bindings: Mapping[str, object]) -> "JetRecord":
        vals = [_rf(v.substitute(bindings)) for v in self.values]
        return JetRecord(self.args, self.kinds, vals, self.caps, self.name)

    def value(self, arg: str) -> RationalFunction:
        return self.values[self.args.index(arg)]

    def zero_jet(self) -> Jet:
        return (0,) * len(self.args)

    def unit(self, arg: str) -> Jet:
        j = [0] * len(self.args)
        j[self.args.index(arg)] = 1
        return tuple(j)

    def check(self, jet: Jet) -> None:
        totals: dict = {}
        for k, e in zip(self.kinds, jet):
            totals[k] = totals.get(k, 0) + e
        for k, tot in totals.items():
            cap = self.caps.get(k)
            if cap is not None and tot > cap:
                raise JetCapExceeded(f"jet {self.jet_text(jet)} exceeds the {k}-order cap {cap}")

    def jet_text(self, jet: Jet) -> str:
        return f"{self.name}[{','.join(str(e) for e in jet)}]"

    def same_as(self, other: "JetRecord") -> bool:
        if self is other:
            return True
        return (
            self.args == other.args
            and self.kinds == other.kinds
            and self.name == other.name
            and all(ratfunc_eq(a, b) for a, b in zip(self.values, other.values))
        )

    def __str__(self) -> str:
        return "{" + ", ".join(f"{a} -> {v}" for a, v in zip(self.args, self.values)) + "}"


def jet_rank(jet: Jet):
    """Ranking used for pivots: total order first, then lexicographic index."""
    return (sum(jet), jet)


# ---------------------------------------------------------------------------
# Twisted functions


def _factor_sort_key(fe):
    return (str(fe[0]), str(fe[1]))


def _split_value(r: RationalFunction, known: Iterable[Polynomial]) -> list[tuple[Polynomial, int]]:
    """Write ``r`` as a product of powers of polynomials, reusing ``known`` bases."""
    r = r.cancel()
    out: list[tuple[Polynomial, int]] = []
    num = r.num
    if num.is_zero():
        raise ValueError("factor base became zero after substitution")
    atoms = [p for p, _ in r.atoms]
    if not num.is_constant():
        c, mono = num.monic()
        if c != 1:
            out.append((Polynomial.const(num.table, c), 1))
        rest = mono
        for base in list(known) + atoms:
            if base.is_constant() or rest.is_constant():
                continue
            m = 0
            while base.degree() <= rest.degree():
                q = rest.divexact(base)
                if q is None:
                    break
                rest = q
                m += 1
            if m:
                out.append((base, m))
        if not rest.is_constant():
            out.append((rest, 1))
        elif rest.constant_value() != 1:
            out.append((rest, 1))
    else:
        out.append((num, 1))
    for p, m in r.atoms:
        out.append((p, -m))
    return out


def canonical_factors(table: VarTable, factors: Iterable[tuple[Polynomial, Polynomial]], coeff: RationalFunction):
    """Merge, normalize and strip integer parts of factor exponents.

    Returns ``(factor_key, coeff)`` with every base monic (or a constant other
    than 1), every exponent having constant term in ``[0, 1)``, and the
    integer parts multiplied into ``coeff``.
    """
    acc: dict = {}
    order: list = []
    for base, exp in factors:
        if not isinstance(exp, Polynomial):
            exp = Polynomial.const(table, exp)
        if exp.is_zero():
            continue
        if base.is_zero():
            raise ValueError("twisted factor with zero base")
        if base.is_constant():
            parts = [(base, exp)]
        else:
            c, mono = base.monic()
            parts = [(mono, exp)]
            if c != 1:
                parts.append((Polynomial.const(table, c), exp))
        for b, e in parts:
            if b in acc:
                acc[b] = acc[b] + e
            else:
                acc[b] = e
                order.append(b)
    out = []
    for b in order:
        e = acc[b]
        n = math.floor(e.constant_term())
        if n:
            e = e - n
            if b.is_constant():
                coeff = coeff * (b.constant_value() ** n)
            elif n > 0:
                coeff = coeff * RF(b) ** n
            else:
                coeff = coeff * RF.from_atoms(Polynomial.const(table, 1), [(b, -n)])
        if e.is_zero():
            continue
        if b.is_constant() and b.constant_value() == 1:
            continue
        out.append((b, e))
    out.sort(key=_factor_sort_key)
    return tuple(out), coeff


def _mono_mul(m1: JetMono, m2: JetMono) -> JetMono:
    if not m1:
        return m2
    if not m2:
        return m1
    return tuple(sorted(m1 + m2))


class TwistedFunction:
    """Finite sum of ``factors * rational * jet-monomial`` terms."""

    __slots__ = ("table", "record", "terms")

    def __init__(self, table: VarTable, terms: Mapping | None = None, record: JetRecord | None = None):
        self.table = table
        self.record = record
        self.terms: dict = {}
        for (fkey, mono), c in (terms or {}).items():
            self._accumulate(fkey, mono, _rf(c))

    @classmethod
    def _raw(cls, table, terms, record) -> "TwistedFunction":
        obj = object.__new__(cls)
        obj.table = table
        obj.terms = terms
        obj.record = record
        return obj

    def _accumulate(self, fkey, mono, c: RationalFunction) -> None:
        if c.is_zero():
            return
        key = (fkey, mono)
        v = self.terms.get(key)
        if v is None:
            self.terms[key] = c
        else:
            v = v + c
            if v.is_zero():
                del self.terms[key]
            else:
                self.terms[key] = v

    # constructors ----------------------------------------------------------
    @classmethod
    def from_rational(cls, table: VarTable, r, record: JetRecord | None = None) -> "TwistedFunction":
        r = _rf(r)
        out = cls._raw(table, {}, record)
        out._accumulate((), (), r)
        return out

    @classmethod
    def power(cls, table: VarTable, base: Polynomial, exponent, coeff=1, record=None) -> "TwistedFunction":
        """``coeff * base**exponent`` for a symbolic exponent."""
        if not isinstance(exponent, Polynomial):
            exponent = Polynomial.const(table, exponent)
        fkey, c = canonical_factors(table, [(base, exponent)], _rf(coeff))
        out = cls._raw(table, {}, record)
        out._accumulate(fkey, (), c)
        return out

    @classmethod
    def jet(cls, table: VarTable, record: JetRecord, jet: Jet | None = None, coeff=1) -> "TwistedFunction":
        jet = record.zero_jet() if jet is None else tuple(jet)
        record.check(jet)
        out = cls._raw(table, {}, record)
        out._accumulate((), (jet,), _rf(coeff))
        return out

    # helpers -----------------------------------------------------------------
    def _merge_record(self, other: "TwistedFunction") -> JetRecord | None:
        a, b = self.record, other.record
        if a is None:
            return b
        if b is None:
            return a
        if a.same_as(b):
            return a
        # a record only matters when jets are present
        if not other.has_jets():
            return a
        if not self.has_jets():
            return b
        raise ValueError("cannot combine twisted functions with different jet records")

    def has_jets(self) -> bool:
        return any(mono for (_, mono) in self.terms)

    def jets(self) -> set:
        out = set()
        for (_, mono) in self.terms:
            out.update(mono)
        return out

    def factor_keys(self) -> set:
        return {fkey for (fkey, _) in self.terms}

    def _lift(self, other):
        if isinstance(other, TwistedFunction):
            return other
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            return TwistedFunction.from_rational(self.table, other)
        return None

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        rec = self._merge_record(o)
        out = TwistedFunction._raw(self.table if len(self.table) >= len(o.table) else o.table, dict(self.terms), rec)
        for (fkey, mono), c in o.terms.items():
            out._accumulate(fkey, mono, c)
        return out

    __radd__ = __add__

    def __neg__(self) -> "TwistedFunction":
        return TwistedFunction._raw(self.table, {k: -c for k, c in self.terms.items()}, self.record)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def scale(self, c) -> "TwistedFunction":
        c = _rf(c)
        if c.is_zero():
            return TwistedFunction._raw(self.table, {}, self.record)
        return TwistedFunction._raw(self.table, {k: v * c for k, v in self.terms.items()}, self.record)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            return self.scale(other)
        if not isinstance(other, TwistedFunction):
            return NotImplemented
        rec = self._merge_record(other)
        out = TwistedFunction._raw(self.table, {}, rec)
        for (f1, m1), c1 in self.terms.items():
            for (f2, m2), c2 in other.terms.items():
                if f1 and f2:
                    fkey, c = canonical_factors(self.table, f1 + f2, c1 * c2)
                else:
                    fkey, c = f1 or f2, c1 * c2
                out._accumulate(fkey, _mono_mul(m1, m2), c)
        return out

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            return self.scale(other)
        return NotImplemented

    # predicates ----------------------------------------------------------------
    def is_zero(self) -> bool:
        """Zero test after collection on factor keys and jet monomials."""
        return all(c.is_zero() for c in self.terms.values())

    def __eq__(self, other) -> bool:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        try:
            return (self - o).is_zero()
        except ValueError:
            return False

    __hash__ = None  # type: ignore[assignment]

    # calculus ----------------------------------------------------------------
    def diff(self, var: str) -> "TwistedFunction":
        out = TwistedFunction._raw(self.table, {}, self.record)
        logd: dict = {}
        chain = None
        for (fkey, mono), c in self.terms.items():
            if fkey not in logd:
                acc = None
                for base, exp in fkey:
                    if exp.involves(var):
                        raise ValueError(f"cannot differentiate in {var}: it occurs in an exponent")
                    db = base.diff(var)
                    if db.is_zero():
                        continue
                    piece = RF.from_atoms(db * exp, [(base, 1)])
                    acc = piece if acc is None else acc + piece
                logd[fkey] = acc
            ld = logd[fkey]
            own = c.diff(var)
            if ld is not None:
                own = own + c * ld
            out._accumulate(fkey, mono, own)
            if mono:
                if self.record is None:
                    raise ValueError("jets present but no jet record")
                if chain is None:
                    chain = [(i, v.diff(var)) for i, v in enumerate(self.record.values)]
                    chain = [(i, d) for i, d in chain if not d.is_zero()]
                for pos in range(len(mono)):
                    if pos and mono[pos] == mono[pos - 1]:
                        continue
                    mult = mono.count(mono[pos])
                    rest = mono[:pos] + mono[pos + 1 :]
                    j = mono[pos]
                    for i, d in chain:
                        nj = j[:i] + (j[i] + 1,) + j[i + 1 :]
                        self.record.check(nj)
                        out._accumulate(fkey, tuple(sorted(rest + (nj,))), c * d * mult)
        return out

    def substitute(self, bindings: Mapping[str, object]) -> "TwistedFunction":
        """Substitute variables or parameters everywhere, including the jet record."""
        bindings = {k: v for k, v in bindings.items() if k in self.table}
        if not bindings:
            return self
        rec = self.record.substitute(bindings) if self.record is not None else None
        out = TwistedFunction._raw(self.table, {}, rec)
        known = [b for fkey in self.factor_keys() for b, _ in fkey if not b.is_constant()]
        for (fkey, mono), c in self.terms.items():
            coeff = _rf(c.substitute(bindings))
            if coeff.is_zero():
                continue
            factors = []
            for base, exp in fkey:
                e = exp.substitute(bindings)
                if isinstance(e, RationalFunction):
                    if not e.is_polynomial():
                        raise ValueError("exponents must stay polynomial under substitution")
                    e = e.num
                bval = base.substitute(bindings)
                if isinstance(bval, Polynomial):
                    if bval.is_zero():
                        raise ValueError(f"substitution makes factor base {base} vanish")
                    factors.append((bval, e))
                else:
                    for p, m in _split_value(bval, known):
                        factors.append((p, e * m))
            fk, coeff = canonical_factors(self.table, factors, coeff)
            out._accumulate(fk, mono, coeff)
        return out

    def with_record(self, record: JetRecord) -> "TwistedFunction":
        return TwistedFunction._raw(self.table, dict(self.terms), record)

    # views ------------------------------------------------------------------
    def group_by_factors(self) -> dict:
        groups: dict = {}
        for (fkey, mono), c in self.terms.items():
            groups.setdefault(fkey, {})[mono] = c
        return groups

    def _sorted_items(self):
        def key(item):
            (fkey, mono), _ = item
            return (
                tuple(_factor_sort_key(f) for f in fkey),
                tuple(jet_rank(j) for j in mono),
            )

        return sorted(self.terms.items(), key=key, reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (fkey, mono), c in self._sorted_items():
            tail = []
            for base, exp in fkey:
                tail.append(f"({base})^({exp})")
            for j in mono:
                tail.append(self.record.jet_text(j) if self.record else f"Psi[{','.join(map(str, j))}]")
            parts.append(_join_coeff(c, "*".join(tail)))
        return _join_signed(parts)

    def __repr__(self) -> str:
        return f"TwistedFunction({self})"


def substitute(F: TwistedFunction, bindings: Mapping[str, object]) -> TwistedFunction:
    return F.substitute(bindings)


def instantiate(F: TwistedFunction, psi: TwistedFunction) -> TwistedFunction:
    """Replace every jet ``Psi[beta]`` of ``F`` by ``D^beta psi`` composed with the record.

    ``psi`` must be jet-free and written in the formal argument names.
    """
    if psi.has_jets():
        raise ValueError("psi must not contain jets")
    rec = F.record
    if rec is None:
        return F
    bindings = {}
    for a, v in zip(rec.args, rec.values):
        if a in F.table and ratfunc_eq(v, RF.var(F.table, a)):
            continue
        bindings[a] = v
    derivs: dict = {}

    def d(jet):
        if jet not in derivs:
            g = psi
            for a, e in zip(rec.args, jet):
                for _ in range(e):
                    g = g.diff(a)
            derivs[jet] = g.substitute(bindings) if bindings else g
        return derivs[jet]

    out = TwistedFunction._raw(F.table, {}, None)
    for (fkey, mono), c in F.terms.items():
        piece = TwistedFunction._raw(F.table, {}, None)
        piece._accumulate(fkey, (), c)
        for j in mono:
            piece = piece * d(j)
        out = out + piece
    return out


# ---------------------------------------------------------------------------
# Relations and reduction


class RelationSet:
    """Twisted functions declared equal to zero; each must be linear in jets."""

    __slots__ = ("relations", "record", "prolongation_order", "_echelon")

    def __init__(self, relations: Sequence[TwistedFunction] = (), prolongation_order: int = 0):
        rels = [r for r in relations]
        record = None
        for r in rels:
            _check_linear(r)
            if r.record is not None:
                if record is None:
                    record = r.record
                elif not record.same_as(r.record):
                    raise RelationError("relations use different jet records")
        self.relations = tuple(rels)
        self.record = record
        self.prolongation_order = prolongation_order
        self._echelon = None

    def __len__(self) -> int:
        return len(self.relations)

    def __iter__(self):
        return iter(self.relations)

    def __add__(self, other: "RelationSet") -> "RelationSet":
        return RelationSet(
            self.relations + other.relations, max(self.prolongation_order, other.prolongation_order)
        )

    def substitute(self, bindings: Mapping[str, object]) -> "RelationSet":
        out = RelationSet([r.substitute(bindings) for r in self.relations], self.prolongation_order)
        if self._echelon is not None:
            out._echelon = self._echelon.substitute(bindings)
        return out

    def echelon(self) -> "Echelon":
        if self._echelon is None:
            self._echelon = Echelon.build(self.relations)
        return self._echelon


def _check_linear(r: TwistedFunction) -> None:
    if not r.terms:
        return
    has_jet = False
    for (fkey, mono), _ in r.terms.items():
        if fkey:
            raise RelationError("relations must not carry twisted factors")
        if len(mono) > 1:
            raise RelationError("relation is not linear in jets")
        if not mono:
            raise RelationError("relation has a term without jets (pure function claim)")
        has_jet = True
    if not has_jet:
        raise RelationError("relation with no jet")


class Echelon:
    """Reduced row echelon form of a relation set, rows keyed by pivot jet."""

    __slots__ = ("rows", "order", "dependent", "table", "record")

    def __init__(self, rows: dict, order: list, dependent: int, table, record):
        self.rows = rows  # pivot -> {jet: coefficient} over non-pivot jets
        self.order = order
        self.dependent = dependent
        self.table = table
        self.record = record

    @classmethod
    def build(cls, relations: Sequence[TwistedFunction]) -> "Echelon":
        rows: dict = {}
        order: list = []
        dependent = 0
        table = relations[0].table if relations else EMPTY
        record = None
        for rel in relations:
            if record is None:
                record = rel.record
            vec = {mono[0]: c for (fkey, mono), c in rel.terms.items()}
            vec = _reduce_vec(vec, rows)
            if not vec:
                dependent += 1
                continue
            pivot = max(vec, key=jet_rank)
            inv = 1 / vec.pop(pivot)
            vec = {j: c * inv for j, c in vec.items()}
            for p, row in rows.items():
                c = row.pop(pivot, None)
                if c is not None:
                    for j, v in vec.items():
                        nv = row[j] - c * v if j in row else -(c * v)
                        if nv.is_zero():
                            row.pop(j, None)
                        else:
                            row[j] = nv
            rows[pivot] = vec
            order.append(pivot)
        return cls(rows, order, dependent, table, record)

    def substitute(self, bindings) -> "Echelon":
        rows = {}
        for p, row in self.rows.items():
            new = {}
            for j, c in row.items():
                v = _rf(c.substitute(bindings))
                if not v.is_zero():
                    new[j] = v
            rows[p] = new
        rec = self.record.substitute(bindings) if self.record is not None else None
        return Echelon(rows, list(self.order), self.dependent, self.table, rec)

    def pivots(self) -> list:
        return sorted(self.rows, key=jet_rank, reverse=True)

    def reduce_vec(self, vec: dict) -> dict:
        return _reduce_vec(vec, self.rows)


def _reduce_vec(vec: dict, rows: dict) -> dict:
    out = dict(vec)
    for p in [j for j in vec if j in rows]:
        c = out.pop(p, None)
        if c is None or c.is_zero():
            continue
        for j, v in rows[p].items():
            nv = out[j] - c * v if j in out else -(c * v)
            if nv.is_zero():
                out.pop(j, None)
            else:
                out[j] = nv
    return {j: c for j, c in out.items() if not c.is_zero()}


def reduce_modulo(F: TwistedFunction, R: RelationSet) -> TwistedFunction:
    """Normal form of ``F`` modulo the span of ``R`` over rational functions.

    Terms are grouped by twisted factor key; within each group the linear jet
    part is reduced against the row echelon form of ``R``.
    """
    if not len(R):
        return F
    E = R.echelon()
    if E.record is not None and F.has_jets() and F.record is not None and not F.record.same_as(E.record):
        raise ValueError("relation set and function use different jet records")
    out = TwistedFunction._raw(F.table, {}, F.record)
    for fkey, group in F.group_by_factors().items():
        linear = {}
        for mono, c in group.items():
            if len(mono) == 1:
                linear[mono[0]] = c
            else:
                out._accumulate(fkey, mono, c)
        for j, c in E.reduce_vec(linear).items():
            out._accumulate(fkey, (j,), c)
    return out


def prolong(R: RelationSet, order: int, directions: Sequence[str] | None = None) -> RelationSet:
    """``R`` plus all derivatives of its relations up to total ``order``.

    ``directions`` defaults to the record's x-kind formal arguments.
    """
    if not len(R):
        return RelationSet((), order)
    rec = R.record
    if directions is None:
        directions = [a for a, k in zip(rec.args, rec.kinds) if k == "x"]
    directions = tuple(directions)
    out = list(R.relations)
    frontier = list(R.relations)
    for _ in range(order):
        nxt = []
        # derivatives indexed by nondecreasing direction index avoid duplicates
        for rel, start in (frontier if frontier and isinstance(frontier[0], tuple) else [(r, 0) for r in frontier]):
            for i in range(start, len(directions)):
                d = rel.diff(directions[i])
                nxt.append((d, i))
        out.extend(d for d, _ in nxt)
        frontier = nxt
    return RelationSet(out, R.prolongation_order + order)
