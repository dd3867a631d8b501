"""Sparse multivariate polynomials with exact rational coefficients."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

Scalar = Fraction
ScalarLike = Union[int, Fraction]


class VarTableMismatch(ValueError):
    """Raised when two values live over variable tables that do not embed."""


class VarTable:
    """Ordered, duplicate-free list of variable names.

    Tables are interned: constructing a table twice from the same names returns
    the same object, so identity checks are a cheap fast path.
    """

    __slots__ = ("names", "_index", "__weakref__")

    def __new__(cls, names: Iterable[str] = ()):
        return _intern_table(tuple(names))

    @classmethod
    def _build(cls, names: tuple[str, ...]) -> "VarTable":
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        obj = object.__new__(cls)
        obj.names = names
        obj._index = {n: i for i, n in enumerate(names)}
        return obj

    def __len__(self) -> int:
        return len(self.names)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"variable {name!r} not in table {self.names}") from None

    def __repr__(self) -> str:
        return f"VarTable({list(self.names)})"

    def __reduce__(self):
        return (VarTable, (self.names,))

    def embeds_into(self, other: "VarTable") -> bool:
        return all(n in other._index for n in self.names)

    def extend(self, *names: str) -> "VarTable":
        return VarTable(self.names + tuple(n for n in names if n not in self._index))


@lru_cache(maxsize=None)
def _intern_table(names: tuple[str, ...]) -> VarTable:
    return VarTable._build(names)


EMPTY = VarTable(())


def _as_scalar(c: ScalarLike) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, int):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact scalar: {c!r}")


def format_scalar(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _monomial_text(table: VarTable, exps: tuple[int, ...]) -> str:
    parts = []
    for name, e in zip(table.names, exps):
        if e == 1:
            parts.append(name)
        elif e:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def _grlex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class Polynomial:
    """Polynomial over a :class:`VarTable`; immutable, canonical, hashable."""

    __slots__ = ("table", "terms", "_hash")

    def __init__(self, table: VarTable, terms: Mapping[tuple[int, ...], ScalarLike] | None = None):
        self.table = table
        clean = {}
        if terms:
            n = len(table)
            for exps, c in terms.items():
                if len(exps) != n:
                    raise ValueError("exponent vector length does not match table")
                c = _as_scalar(c)
                if c:
                    clean[tuple(exps)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, table: VarTable, terms: dict) -> "Polynomial":
        obj = object.__new__(cls)
        obj.table = table
        obj.terms = terms
        obj._hash = None
        return obj

    # constructors -------------------------------------------------------
    @classmethod
    def const(cls, table: VarTable, c: ScalarLike) -> "Polynomial":
        c = _as_scalar(c)
        return cls._raw(table, {(0,) * len(table): c} if c else {})

    @classmethod
    def zero(cls, table: VarTable = EMPTY) -> "Polynomial":
        return cls._raw(table, {})

    @classmethod
    def one(cls, table: VarTable = EMPTY) -> "Polynomial":
        return cls.const(table, 1)

    @classmethod
    def var(cls, table: VarTable, name: str) -> "Polynomial":
        i = table.index(name)
        exps = [0] * len(table)
        exps[i] = 1
        return cls._raw(table, {tuple(exps): Fraction(1)})

    @classmethod
    def gens(cls, table: VarTable) -> tuple["Polynomial", ...]:
        return tuple(cls.var(table, n) for n in table.names)

    # table handling -----------------------------------------------------
    def embed(self, table: VarTable) -> "Polynomial":
        if table is self.table:
            return self
        pos = []
        for n in self.table.names:
            if n not in table:
                raise VarTableMismatch(f"{self.table} does not embed into {table}")
            pos.append(table.index(n))
        width = len(table)
        out = {}
        for exps, c in self.terms.items():
            new = [0] * width
            for p, e in zip(pos, exps):
                new[p] = e
            out[tuple(new)] = c
        return Polynomial._raw(table, out)

    def _coerce(self, other) -> tuple["Polynomial", "Polynomial"]:
        if isinstance(other, Polynomial):
            if other.table is self.table:
                return self, other
            if other.table.embeds_into(self.table):
                return self, other.embed(self.table)
            if self.table.embeds_into(other.table):
                return self.embed(other.table), other
            raise VarTableMismatch(f"cannot combine {self.table} with {other.table}")
        if isinstance(other, (int, Fraction)):
            return self, Polynomial.const(self.table, other)
        return NotImplemented, NotImplemented

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        if not b.terms:
            return a
        if not a.terms:
            return b
        out = dict(a.terms)
        for k, c in b.terms.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Polynomial._raw(a.table, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.table, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return a + (-b)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        return b + (-a)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        a, b = self._coerce(other)
        if a is NotImplemented:
            return NotImplemented
        if not a.terms or not b.terms:
            return Polynomial._raw(a.table, {})
        if len(b.terms) > len(a.terms):
            a, b = b, a
        out: dict = {}
        get = out.get
        for kb, cb in b.terms.items():
            for ka, ca in a.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = get(k, 0) + ca * cb
        return Polynomial._raw(a.table, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c: ScalarLike) -> "Polynomial":
        c = _as_scalar(c)
        if not c:
            return Polynomial._raw(self.table, {})
        if c == 1:
            return self
        return Polynomial._raw(self.table, {k: v * c for k, v in self.terms.items()})

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.const(self.table, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # predicates / access ------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Polynomial.const(self.table, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        try:
            a, b = self._coerce(other)
        except VarTableMismatch:
            return False
        return a.terms == b.terms

    def __hash__(self) -> int:
        if self._hash is None:
            # Hash on named terms so equal polynomials over embedded tables agree.
            names = self.table.names
            items = frozenset(
                (tuple((names[i], e) for i, e in enumerate(k) if e), c) for k, c in self.terms.items()
            )
            self._hash = hash(items)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.table), Fraction(0))

    def degree(self, name: str | None = None) -> int:
        if not self.terms:
            return -1
        if name is None:
            return max(sum(k) for k in self.terms)
        i = self.table.index(name)
        return max(k[i] for k in self.terms)

    def variables(self) -> tuple[str, ...]:
        used = set()
        for k in self.terms:
            used.update(i for i, e in enumerate(k) if e)
        return tuple(self.table.names[i] for i in sorted(used))

    def involves(self, name: str) -> bool:
        if name not in self.table:
            return False
        i = self.table.index(name)
        return any(k[i] for k in self.terms)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        k = max(self.terms, key=_grlex_key)
        return k, self.terms[k]

    def monic(self) -> tuple[Fraction, "Polynomial"]:
        """Return ``(c, p/c)`` with ``c`` the grlex leading coefficient."""
        _, c = self.leading()
        return c, self.scale(1 / c)

    # calculus / substitution -------------------------------------------
    def diff(self, name: str) -> "Polynomial":
        if name not in self.table:
            return Polynomial._raw(self.table, {})
        i = self.table.index(name)
        out = {}
        for k, c in self.terms.items():
            e = k[i]
            if e:
                nk = k[:i] + (e - 1,) + k[i + 1 :]
                out[nk] = c * e
        return Polynomial._raw(self.table, out)

    def substitute(self, bindings: Mapping[str, object]):
        """Substitute variables by scalars, polynomials or rational functions.

        Returns a :class:`Polynomial` unless some binding is a rational function.
        """
        from .ratfunc import RationalFunction

        active = {n: v for n, v in bindings.items() if n in self.table and self.involves(n)}
        if not active:
            return self
        rational = any(isinstance(v, RationalFunction) for v in active.values())
        idx = {self.table.index(n): v for n, v in active.items()}
        keep_table = self.table
        # Powers of each bound value are reused across monomials.
        cache: dict = {}

        def power(i, e):
            key = (i, e)
            if key not in cache:
                v = idx[i]
                if isinstance(v, (int, Fraction)):
                    cache[key] = _as_scalar(v) ** e
                else:
                    cache[key] = v ** e
            return cache[key]

        acc = RationalFunction.zero(keep_table) if rational else Polynomial.zero(keep_table)
        groups: dict = {}
        for k, c in self.terms.items():
            rest = tuple(0 if i in idx else e for i, e in enumerate(k))
            sub = tuple((i, k[i]) for i in sorted(idx) if k[i])
            groups.setdefault(sub, {})[rest] = c
        for sub, rest_terms in groups.items():
            piece = Polynomial._raw(keep_table, rest_terms)
            factor = None
            for i, e in sub:
                f = power(i, e)
                factor = f if factor is None else factor * f
            if factor is None:
                acc = acc + piece
            elif isinstance(factor, Fraction):
                acc = acc + piece.scale(factor)
            else:
                acc = acc + factor * piece
        return acc

    def evaluate(self, values: Mapping[str, ScalarLike]) -> Fraction:
        total = Fraction(0)
        vals = [_as_scalar(values[n]) if n in values else None for n in self.table.names]
        for k, c in self.terms.items():
            term = c
            for v, e in zip(vals, k):
                if e:
                    if v is None:
                        raise ValueError("evaluate needs a value for every occurring variable")
                    term *= v**e
            total += term
        return total

    # exact division -----------------------------------------------------
    def divexact(self, divisor: "Polynomial") -> "Polynomial | None":
        """Quotient if ``divisor`` divides ``self`` exactly, else ``None``.

        A single polynomial is a Groebner basis of the ideal it generates, so
        multivariate division by it leaves remainder zero exactly when it divides.
        """
        a, d = self._coerce(divisor)
        if not d.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if not a.terms:
            return a
        if d.is_constant():
            return a.scale(1 / d.constant_value())
        lk, lc = d.leading()
        rem = dict(a.terms)
        quot: dict = {}
        dterms = list(d.terms.items())
        while rem:
            mk = max(rem, key=_grlex_key)
            if any(x < y for x, y in zip(mk, lk)):
                return None
            qk = tuple(x - y for x, y in zip(mk, lk))
            qc = rem[mk] / lc
            quot[qk] = qc
            for dk, dc in dterms:
                k = tuple(x + y for x, y in zip(qk, dk))
                v = rem.get(k, 0) - qc * dc
                if v:
                    rem[k] = v
                else:
                    rem.pop(k, None)
        return Polynomial._raw(a.table, quot)

    # text ---------------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for i, (k, c) in enumerate(self.sorted_terms()):
            mono = _monomial_text(self.table, k)
            neg = c < 0
            a = -c if neg else c
            if mono:
                body = mono if a == 1 else f"{format_scalar(a)}*{mono}"
            else:
                body = format_scalar(a)
            if i == 0:
                out.append(f"-{body}" if neg else body)
            else:
                out.append(f" - {body}" if neg else f" + {body}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Polynomial({self})"

    def is_monomial_like(self) -> bool:
        return len(self.terms) == 1


def poly_arith(op: str, p: Polynomial, q: Polynomial) -> Polynomial:
    """Dispatch ``add``/``sub``/``mul`` on two polynomials."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation {op!r}")


def ring(*names: str) -> tuple[VarTable, tuple[Polynomial, ...]]:
    """Convenience: a table and its generators, ``T, (x, y) = ring("x", "y")``."""
    table = VarTable(names)
    return table, Polynomial.gens(table)
