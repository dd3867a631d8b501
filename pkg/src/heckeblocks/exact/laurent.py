"""Laurent polynomials in one distinguished variable and 2x2 loop matrices."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .poly import EMPTY, Polynomial
from .ratfunc import RationalFunction

SL2 = "SL2"
PGL2 = "PGL2"
FLAVORS = (SL2, PGL2)


class FlavorMismatch(ValueError):
    """Raised when SL2 and PGL2 matrices are combined."""


def _coef(c) -> RationalFunction:
    return RationalFunction.coerce(c)


def _coef_text(c: RationalFunction) -> str:
    return str(c)


class LaurentPolynomial:
    """Finite sum ``sum_e c_e * var^e`` with rational-function coefficients."""

    __slots__ = ("var", "coeffs")

    def __init__(self, var: str = "t", coeffs: Mapping[int, object] | None = None):
        self.var = var
        clean = {}
        for e, c in (coeffs or {}).items():
            c = _coef(c)
            if not c.is_zero():
                clean[int(e)] = c
        self.coeffs = clean

    @classmethod
    def _raw(cls, var: str, coeffs: dict) -> "LaurentPolynomial":
        obj = object.__new__(cls)
        obj.var = var
        obj.coeffs = coeffs
        return obj

    @classmethod
    def monomial(cls, c, e: int, var: str = "t") -> "LaurentPolynomial":
        return cls(var, {e: c})

    @classmethod
    def const(cls, c, var: str = "t") -> "LaurentPolynomial":
        return cls(var, {0: c})

    @classmethod
    def zero(cls, var: str = "t") -> "LaurentPolynomial":
        return cls._raw(var, {})

    def _lift(self, other) -> "LaurentPolynomial | None":
        if isinstance(other, LaurentPolynomial):
            if other.var != self.var:
                raise ValueError(f"Laurent variables differ: {self.var} vs {other.var}")
            return other
        if isinstance(other, (int, Fraction, Polynomial, RationalFunction)):
            return LaurentPolynomial(self.var, {0: other})
        return None

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def min_exp(self) -> int:
        return min(self.coeffs)

    def max_exp(self) -> int:
        return max(self.coeffs)

    def is_monomial(self) -> bool:
        return len(self.coeffs) == 1

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for e, c in o.coeffs.items():
            v = out[e] + c if e in out else c
            if v.is_zero():
                out.pop(e, None)
            else:
                out[e] = v
        return LaurentPolynomial._raw(self.var, out)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial._raw(self.var, {e: -c for e, c in self.coeffs.items()})

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
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out: dict = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in o.coeffs.items():
                e = e1 + e2
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return LaurentPolynomial._raw(self.var, {e: c for e, c in out.items() if not c.is_zero()})

    __rmul__ = __mul__

    def shift(self, m: int) -> "LaurentPolynomial":
        """Multiply by ``var**m``."""
        return LaurentPolynomial._raw(self.var, {e + m: c for e, c in self.coeffs.items()})

    def scale(self, c) -> "LaurentPolynomial":
        c = _coef(c)
        if c.is_zero():
            return LaurentPolynomial.zero(self.var)
        return LaurentPolynomial._raw(self.var, {e: v * c for e, v in self.coeffs.items()})

    def monomial_parts(self) -> tuple[RationalFunction, int]:
        """``(c, m)`` when this is ``c * var**m``; raises otherwise."""
        if len(self.coeffs) != 1:
            raise ValueError(f"{self} is not a monomial in {self.var}")
        (e, c), = self.coeffs.items()
        return c, e

    def substitute(self, bindings: Mapping[str, object]) -> "LaurentPolynomial":
        out = {}
        for e, c in self.coeffs.items():
            v = RationalFunction.coerce(c.substitute(bindings))
            if not v.is_zero():
                out[e] = v
        return LaurentPolynomial._raw(self.var, out)

    def __eq__(self, other) -> bool:
        try:
            o = self._lift(other)
        except ValueError:
            return False
        if o is None:
            return NotImplemented
        if set(self.coeffs) != set(o.coeffs):
            return False
        return all(self.coeffs[e] == o.coeffs[e] for e in self.coeffs)

    __hash__ = None  # type: ignore[assignment]

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in sorted(self.coeffs, reverse=True):
            c = self.coeffs[e]
            ctext = _coef_text(c)
            if e == 0:
                body = ctext
            else:
                mono = self.var if e == 1 else f"{self.var}^{e}"
                if ctext == "1":
                    body = mono
                elif ctext == "-1":
                    body = f"-{mono}"
                elif c.is_polynomial() and len(c.num.terms) == 1:
                    body = f"{ctext}*{mono}"
                else:
                    body = f"({ctext})*{mono}"
            if parts and body.startswith("-"):
                parts.append(f" - {body[1:]}")
            elif parts:
                parts.append(f" + {body}")
            else:
                parts.append(body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPolynomial({self})"


class ProjectiveLaurentMatrix:
    """2x2 matrix over Laurent polynomials whose determinant is a unit ``c*t^m``.

    For the PGL2 flavor two matrices are equal when they differ by a common
    nonzero factor ``c*t^m``.
    """

    __slots__ = ("entries", "flavor", "var")

    def __init__(self, entries, flavor: str = PGL2, var: str = "t", check: bool = True):
        if flavor not in FLAVORS:
            raise ValueError(f"unknown flavor {flavor!r}")
        rows = []
        for row in entries:
            r = []
            for x in row:
                r.append(x if isinstance(x, LaurentPolynomial) else LaurentPolynomial(var, {0: x}))
            rows.append(tuple(r))
        if len(rows) != 2 or any(len(r) != 2 for r in rows):
            raise ValueError("expected a 2x2 matrix")
        for r in rows:
            for x in r:
                if x.var != var:
                    raise ValueError(f"entry uses variable {x.var}, expected {var}")
        self.entries = tuple(rows)
        self.flavor = flavor
        self.var = var
        if check:
            det = self.det()
            if det.is_zero() or not det.is_monomial():
                raise ValueError(f"determinant {det} is not a unit of the Laurent ring")
            if flavor == SL2 and det != LaurentPolynomial.const(1, var):
                raise ValueError(f"SL2 matrix must have determinant 1, got {det}")

    @classmethod
    def identity(cls, flavor: str = PGL2, var: str = "t") -> "ProjectiveLaurentMatrix":
        return cls([[1, 0], [0, 1]], flavor, var)

    @classmethod
    def diagonal_monomial(cls, e1: int, e2: int, flavor: str = PGL2, var: str = "t") -> "ProjectiveLaurentMatrix":
        one = RationalFunction.const(EMPTY, 1)
        return cls(
            [[LaurentPolynomial(var, {e1: one}), 0], [0, LaurentPolynomial(var, {e2: one})]], flavor, var
        )

    def __getitem__(self, ij) -> LaurentPolynomial:
        i, j = ij
        return self.entries[i][j]

    def det(self) -> LaurentPolynomial:
        (a, b), (c, d) = self.entries
        return a * d - b * c

    def with_flavor(self, flavor: str) -> "ProjectiveLaurentMatrix":
        return ProjectiveLaurentMatrix(self.entries, flavor, self.var)

    def map_entries(self, fn) -> "ProjectiveLaurentMatrix":
        return ProjectiveLaurentMatrix([[fn(x) for x in r] for r in self.entries], self.flavor, self.var)

    def rescale(self, c, m: int) -> "ProjectiveLaurentMatrix":
        """Multiply every entry by ``c*t^m`` (a PGL2 no-op up to equality)."""
        return ProjectiveLaurentMatrix(
            [[x.scale(c).shift(m) for x in r] for r in self.entries], self.flavor, self.var, check=False
        )

    def substitute(self, bindings: Mapping[str, object]) -> "ProjectiveLaurentMatrix":
        return self.map_entries(lambda x: x.substitute(bindings))

    def __matmul__(self, other: "ProjectiveLaurentMatrix") -> "ProjectiveLaurentMatrix":
        return laurent_mat_mul(self, other)

    def inverse(self) -> "ProjectiveLaurentMatrix":
        c, m = self.det().monomial_parts()
        inv = 1 / c
        (a, b), (cc, d) = self.entries
        adj = [[d, -b], [-cc, a]]
        return ProjectiveLaurentMatrix(
            [[x.scale(inv).shift(-m) for x in r] for r in adj], self.flavor, self.var
        )

    def _ratio(self, other: "ProjectiveLaurentMatrix") -> tuple[RationalFunction, int] | None:
        for i in range(2):
            for j in range(2):
                x, y = self.entries[i][j], other.entries[i][j]
                if x.is_zero() != y.is_zero():
                    return None
                if not x.is_zero():
                    m = x.min_exp() - y.min_exp()
                    return x.coeffs[x.min_exp()] / y.coeffs[y.min_exp()], m
        return None

    def __eq__(self, other) -> bool:
        if not isinstance(other, ProjectiveLaurentMatrix):
            return NotImplemented
        if self.flavor != other.flavor or self.var != other.var:
            return False
        if self.flavor == SL2:
            return all(self.entries[i][j] == other.entries[i][j] for i in range(2) for j in range(2))
        r = self._ratio(other)
        if r is None:
            return False
        c, m = r
        return all(
            self.entries[i][j] == other.entries[i][j].scale(c).shift(m) for i in range(2) for j in range(2)
        )

    __hash__ = None  # type: ignore[assignment]

    def normalized(self) -> "ProjectiveLaurentMatrix":
        """Canonical PGL2 representative: first nonzero entry has lowest term ``1*t^0``."""
        if self.flavor == SL2:
            return self
        for r in self.entries:
            for x in r:
                if not x.is_zero():
                    e = x.min_exp()
                    c = x.coeffs[e]
                    return self.rescale(1 / c, -e)
        return self

    def __str__(self) -> str:
        m = self.normalized()
        return "[" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in m.entries) + "]"

    def __repr__(self) -> str:
        return f"ProjectiveLaurentMatrix({self}, {self.flavor})"


def laurent_mat_mul(M1: ProjectiveLaurentMatrix, M2: ProjectiveLaurentMatrix) -> ProjectiveLaurentMatrix:
    """Exact product; both factors must share flavor and variable."""
    if M1.flavor != M2.flavor:
        raise FlavorMismatch(f"cannot multiply {M1.flavor} by {M2.flavor}")
    if M1.var != M2.var:
        raise ValueError(f"Laurent variables differ: {M1.var} vs {M2.var}")
    a, b = M1.entries, M2.entries
    rows = [[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)] for i in range(2)]
    return ProjectiveLaurentMatrix(rows, M1.flavor, M1.var, check=False)


def regularity(M: ProjectiveLaurentMatrix, at: str) -> bool:
    """Whether ``M`` (up to the allowed rescaling) is regular and invertible at ``at``.

    ``at`` is ``"zero"`` or ``"infinity"``.  A rescaling by ``c*t^r`` turns the
    determinant ``d*t^m`` into ``c^2*d*t^(m+2r)``, so invertibility at the point
    pins ``r = -m/2``.
    """
    if at not in ("zero", "infinity"):
        raise ValueError(f"regularity point must be 'zero' or 'infinity', got {at!r}")
    det = M.det()
    if det.is_zero() or not det.is_monomial():
        return False
    _, m = det.monomial_parts()
    if M.flavor == SL2:
        r = 0
        if m != 0:
            return False
    else:
        if m % 2:
            return False
        r = -m // 2
    exps = [e + r for row in M.entries for x in row for e in x.coeffs]
    if at == "zero":
        return all(e >= 0 for e in exps)
    return all(e <= 0 for e in exps)
