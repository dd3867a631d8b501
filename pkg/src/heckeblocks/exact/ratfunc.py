"""Rational functions as unreduced numerator / denominator pairs.

The denominator is kept as a product of monic "atoms" with multiplicities.
Sums use the least common multiple of the atom products, which keeps
denominators small without ever computing a multivariate GCD.  Equality is
decided by cross-multiplication.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .poly import EMPTY, Polynomial, VarTable, VarTableMismatch, _as_scalar

Atoms = tuple  # tuple[tuple[Polynomial, int], ...], sorted, monic, positive multiplicities


def _atom_key(p: Polynomial):
    return (p.degree(), str(p))


def _merge_atoms(a: Atoms, b: Atoms, sign: int = 1) -> Atoms:
    d: dict = {}
    for p, m in a:
        d[p] = d.get(p, 0) + m
    for p, m in b:
        d[p] = d.get(p, 0) + sign * m
    return tuple(sorted(((p, m) for p, m in d.items() if m), key=lambda pm: _atom_key(pm[0])))


def _product(table: VarTable, atoms: Iterable[tuple[Polynomial, int]]) -> Polynomial:
    out = Polynomial.const(table, 1)
    for p, m in atoms:
        out = out * p.embed(table) ** m
    return out


def _split_known(p: Polynomial, known: Iterable[Polynomial]) -> tuple[Polynomial, list[tuple[Polynomial, int]]]:
    """Strip known monic atoms off ``p`` by trial division."""
    found = []
    for atom in known:
        if p.is_constant():
            break
        if atom.degree() > p.degree():
            continue
        m = 0
        while True:
            q = p.divexact(atom)
            if q is None:
                break
            p = q
            m += 1
        if m:
            found.append((atom, m))
    return p, found


class RationalFunction:
    """Exact quotient ``num / den`` with ``den`` a product of monic atoms."""

    __slots__ = ("num", "atoms", "_den")

    def __init__(self, num, den=None):
        if isinstance(num, (int, Fraction)):
            num = Polynomial.const(EMPTY, num)
        if den is None:
            self.num = num
            self.atoms = ()
            self._den = None
            return
        if isinstance(den, (int, Fraction)):
            den = Polynomial.const(EMPTY, den)
        num, den = num._coerce(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if den.is_constant():
            self.num = num.scale(1 / den.constant_value())
            self.atoms = ()
        else:
            c, monic = den.monic()
            self.num = num.scale(1 / c)
            self.atoms = ((monic, 1),)
        self._den = None

    @classmethod
    def _raw(cls, num: Polynomial, atoms: Atoms) -> "RationalFunction":
        # keep the invariant: every atom lives over a table embedding into num.table
        for p, _ in atoms:
            if p.table is not num.table and not p.table.embeds_into(num.table):
                if num.table.embeds_into(p.table):
                    num = num.embed(p.table)
                else:
                    num = num.embed(VarTable(num.table.names + tuple(n for n in p.table.names if n not in num.table)))
        obj = object.__new__(cls)
        obj.num = num
        obj.atoms = atoms
        obj._den = None
        return obj

    @classmethod
    def from_atoms(cls, num: Polynomial, atoms: Iterable[tuple[Polynomial, int]]) -> "RationalFunction":
        """Build ``num / prod(atom**m)``; atoms are normalized to monic form."""
        scale = Fraction(1)
        norm = []
        for p, m in atoms:
            if m == 0:
                continue
            if m < 0:
                raise ValueError("atom multiplicities must be positive")
            if p.is_zero():
                raise ZeroDivisionError("zero atom in denominator")
            if p.is_constant():
                scale *= p.constant_value() ** m
                continue
            c, mp = p.monic()
            scale *= c**m
            norm.append((mp, m))
        return cls._raw(num.scale(1 / scale), _merge_atoms(tuple(norm), ()))

    @classmethod
    def zero(cls, table: VarTable = EMPTY) -> "RationalFunction":
        return cls._raw(Polynomial.zero(table), ())

    @classmethod
    def const(cls, table: VarTable, c) -> "RationalFunction":
        return cls._raw(Polynomial.const(table, c), ())

    @classmethod
    def var(cls, table: VarTable, name: str) -> "RationalFunction":
        return cls._raw(Polynomial.var(table, name), ())

    @classmethod
    def coerce(cls, value, table: VarTable = EMPTY) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, Polynomial):
            return cls._raw(value, ())
        if isinstance(value, (int, Fraction, str)):
            return cls._raw(Polynomial.const(table, _as_scalar(value)), ())
        raise TypeError(f"cannot interpret {value!r} as a rational function")

    # views ---------------------------------------------------------------
    @property
    def table(self) -> VarTable:
        return self.num.table

    @property
    def den(self) -> Polynomial:
        if self._den is None:
            self._den = _product(self.table, self.atoms)
        return self._den

    def is_polynomial(self) -> bool:
        return not self.atoms

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return not self.atoms and self.num.is_constant()

    def constant_value(self) -> Fraction:
        if self.atoms:
            self_c = self.cancel()
            if self_c.atoms:
                raise ValueError(f"{self} is not constant")
            return self_c.num.constant_value()
        return self.num.constant_value()

    def embed(self, table: VarTable) -> "RationalFunction":
        return RationalFunction._raw(self.num.embed(table), tuple((p.embed(table), m) for p, m in self.atoms))

    # arithmetic ------------------------------------------------------------
    @staticmethod
    def _lift(other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction._raw(other, ())
        if isinstance(other, (int, Fraction)):
            return RationalFunction._raw(Polynomial.const(EMPTY, other), ())
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        if self.atoms == o.atoms:
            return RationalFunction._raw(self.num + o.num, self.atoms)
        mine = dict(self.atoms)
        theirs = dict(o.atoms)
        lcm = {p: max(mine.get(p, 0), theirs.get(p, 0)) for p in set(mine) | set(theirs)}
        table = self.num._coerce(o.num)[0].table
        fa = [(p, lcm[p] - mine.get(p, 0)) for p in lcm]
        fb = [(p, lcm[p] - theirs.get(p, 0)) for p in lcm]
        num = self.num * _product(table, (x for x in fa if x[1])) + o.num * _product(table, (x for x in fb if x[1]))
        atoms = tuple(sorted(((p, m) for p, m in lcm.items() if m), key=lambda pm: _atom_key(pm[0])))
        return RationalFunction._raw(num, atoms)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction._raw(-self.num, self.atoms)

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

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalFunction._raw(self.num.scale(other), self.atoms if other else ())
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return RationalFunction._raw(self.num * o.num, ())
        if not self.atoms and not o.atoms:
            return RationalFunction._raw(self.num * o.num, ())
        num = self.num * o.num
        atoms = _merge_atoms(self.atoms, o.atoms)
        return RationalFunction._raw(num, atoms)._cancel_atoms()

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        if self.num.is_constant():
            c = self.num.constant_value()
            return RationalFunction._raw(_product(self.num.table, self.atoms).scale(1 / c), ())
        known = [p for p, _ in self.atoms]
        rest, found = _split_known(self.num, known)
        num = _product(self.num.table, self.atoms)
        # remove atoms that cancel against the found factors
        cancel = dict(found)
        leftover = []
        for p, m in self.atoms:
            k = min(m, cancel.get(p, 0))
            if k:
                cancel[p] -= k
            if m - k:
                leftover.append((p, m - k))
        num = _product(self.num.table, leftover)
        den_atoms = [(p, m) for p, m in cancel.items() if m]
        if not rest.is_constant():
            den_atoms.append((rest, 1))
            return RationalFunction.from_atoms(num, den_atoms)
        return RationalFunction.from_atoms(num.scale(1 / rest.constant_value()), den_atoms)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division by zero")
            return RationalFunction._raw(self.num.scale(Fraction(1) / other), self.atoms)
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if o.num.is_constant() and not o.atoms:
            return self / o.num.constant_value()
        # Try to express the new denominator through atoms we already know.
        known = [p for p, _ in self.atoms] + [p for p, _ in o.atoms]
        rest, found = _split_known(o.num, known)
        inv_atoms = list(found)
        scale = Fraction(1)
        if rest.is_constant():
            scale = rest.constant_value()
        else:
            c, mp = rest.monic()
            scale = c
            inv_atoms.append((mp, 1))
        num = self.num * _product(self.num._coerce(o.num)[0].table, o.atoms)
        atoms = _merge_atoms(self.atoms, tuple(sorted(inv_atoms, key=lambda pm: _atom_key(pm[0]))))
        return RationalFunction._raw(num.scale(1 / scale), atoms)._cancel_atoms()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> "RationalFunction":
        if not isinstance(n, int):
            raise TypeError("integer powers only")
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction._raw(self.num**n, tuple((p, m * n) for p, m in self.atoms) if n else ())

    def _cancel_atoms(self) -> "RationalFunction":
        if not self.atoms or self.num.is_zero():
            if self.num.is_zero() and self.atoms:
                return RationalFunction._raw(self.num, ())
            return self
        num = self.num
        out = []
        changed = False
        for p, m in self.atoms:
            left = m
            while left and p.degree() <= num.degree():
                q = num.divexact(p)
                if q is None:
                    break
                num = q
                left -= 1
                changed = True
            if left:
                out.append((p, left))
        if not changed:
            return self
        return RationalFunction._raw(num, tuple(out))

    def cancel(self) -> "RationalFunction":
        """Remove atoms that divide the numerator (trial division only)."""
        return self._cancel_atoms()

    # comparison -------------------------------------------------------------
    def __eq__(self, other) -> bool:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        try:
            return (self - o).num.is_zero()
        except VarTableMismatch:
            return False

    def __hash__(self):
        raise TypeError("RationalFunction is unhashable: equality is by cross-multiplication")

    # calculus ---------------------------------------------------------------
    def diff(self, name: str) -> "RationalFunction":
        dn = self.num.diff(name)
        if not self.atoms:
            return RationalFunction._raw(dn, ())
        moving = [(p, m, p.diff(name)) for p, m in self.atoms]
        moving = [(p, m, dp) for p, m, dp in moving if not dp.is_zero()]
        if not moving:
            return RationalFunction._raw(dn, self.atoms)
        table = self.num.table
        # d(n/D) with D = prod p^m:  (n' P - n * sum m p' P/p) / (D P),  P = prod moving p
        full = _product(table, ((p, 1) for p, _, _ in moving))
        acc = dn * full
        for idx, (p, m, dp) in enumerate(moving):
            others = _product(table, ((q, 1) for j, (q, _, _) in enumerate(moving) if j != idx))
            acc = acc - self.num * dp * others * m
        atoms = _merge_atoms(self.atoms, tuple((p, 1) for p, _, _ in moving))
        return RationalFunction._raw(acc, atoms)

    def substitute(self, bindings: Mapping[str, object]) -> "RationalFunction":
        num = self.num.substitute(bindings)
        out = RationalFunction.coerce(num)
        for p, m in self.atoms:
            val = p.substitute(bindings)
            val = RationalFunction.coerce(val)
            if val.is_zero():
                raise ZeroDivisionError(f"substitution makes denominator factor {p} vanish")
            out = out / (val**m)
        return out

    def evaluate(self, values) -> Fraction:
        d = self.den.evaluate(values)
        if not d:
            raise ZeroDivisionError("evaluation at a pole")
        return self.num.evaluate(values) / d

    def variables(self) -> tuple[str, ...]:
        used = set(self.num.variables())
        for p, _ in self.atoms:
            used.update(p.variables())
        return tuple(n for n in self.table.names if n in used)

    def involves(self, name: str) -> bool:
        return self.num.involves(name) or any(p.involves(name) for p, _ in self.atoms)

    # text -------------------------------------------------------------------
    def den_text(self) -> str:
        parts = []
        for p, m in self.atoms:
            base = f"({p})" if len(p.terms) > 1 else str(p)
            parts.append(base if m == 1 else f"{base}^{m}")
        return "*".join(parts)

    def __str__(self) -> str:
        r = self._cancel_atoms()
        if not r.atoms:
            return str(r.num)
        num = str(r.num)
        if len(r.num.terms) > 1:
            num = f"({num})"
        den = r.den_text()
        if len(r.atoms) > 1 or r.atoms[0][1] > 1:
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self) -> str:
        return f"RationalFunction({self})"


def ratfunc_eq(r1: RationalFunction, r2: RationalFunction) -> bool:
    """Cross-multiplication equality ``r1.num*r2.den == r2.num*r1.den``."""
    r1 = RationalFunction.coerce(r1)
    r2 = RationalFunction.coerce(r2)
    return (r1.num * r2.den - r2.num * r1.den).is_zero()
