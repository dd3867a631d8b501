"""sl2 data, current modes of the affine algebra, spectral flow and loop conjugation."""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from ..exact import LaurentPolynomial, Polynomial, ProjectiveLaurentMatrix, RationalFunction, VarTable, laurent_mat_mul
from ..exact.laurent import SL2

# Coefficients of modes and states live over this table: the level and a loop parameter.
TABLE = VarTable(("k", "a"))
K = Polynomial.var(TABLE, "k")

BASIS = ("e", "h", "f")
ORDER = {"e": 0, "h": 1, "f": 2}
ROOT_DEGREE = {"e": 1, "h": 0, "f": -1}  # in units of alpha


class LieData:
    """sl2 with kappa(e,f) = 1, kappa(h,h) = 2 (long roots of square length 2)."""

    basis = BASIS
    dual_coxeter = 2
    dim = 3
    bracket_table = {
        ("e", "f"): {"h": 1},
        ("f", "e"): {"h": -1},
        ("h", "e"): {"e": 2},
        ("e", "h"): {"e": -2},
        ("h", "f"): {"f": -2},
        ("f", "h"): {"f": 2},
    }
    kappa_table = {("e", "f"): Fraction(1), ("f", "e"): Fraction(1), ("h", "h"): Fraction(2)}
    # Sugawara pairs (I_j, I^j, weight): I^j is the kappa-dual of I_j
    dual_pairs = (("e", "f", Fraction(1)), ("h", "h", Fraction(1, 2)), ("f", "e", Fraction(1)))
    matrices = {"e": ((0, 1), (0, 0)), "h": ((1, 0), (0, -1)), "f": ((0, 0), (1, 0))}

    @classmethod
    def bracket(cls, a: str, b: str) -> dict:
        return cls.bracket_table.get((a, b), {})

    @classmethod
    def kappa(cls, a: str, b: str) -> Fraction:
        return cls.kappa_table.get((a, b), Fraction(0))


SL2DATA = LieData


def _norm(c):
    """Prefer Polynomial coefficients; keep rational functions only when needed."""
    if isinstance(c, RationalFunction):
        c = c.cancel()
        if c.is_polynomial():
            return c.num.embed(TABLE) if c.num.table.embeds_into(TABLE) else c.num
        return c
    if isinstance(c, Polynomial):
        return c.embed(TABLE) if c.table is not TABLE and c.table.embeds_into(TABLE) else c
    return Polynomial.const(TABLE, c)


def _is_zero(c) -> bool:
    return c.is_zero()


class ModeElement:
    """Finite combination of modes ``a_m`` plus a central multiple of ``k``.

    ``terms`` maps ``(basis, mode)`` to a coefficient; ``central`` is the
    coefficient of the central element (which acts as the level ``k``).
    """

    __slots__ = ("terms", "central")

    def __init__(self, terms: Mapping | None = None, central=0):
        clean = {}
        for (b, m), c in (terms or {}).items():
            if b not in ORDER:
                raise ValueError(f"unknown basis element {b!r}")
            c = _norm(c)
            if not _is_zero(c):
                key = (b, int(m))
                clean[key] = _norm(clean[key] + c) if key in clean else c
        self.terms = {k: v for k, v in clean.items() if not _is_zero(v)}
        self.central = _norm(central)

    @classmethod
    def mode(cls, b: str, m: int, c=1) -> "ModeElement":
        return cls({(b, m): c})

    @classmethod
    def central_element(cls, c=1) -> "ModeElement":
        return cls({}, c)

    def __add__(self, other: "ModeElement") -> "ModeElement":
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t[k] + v if k in t else v
        return ModeElement(t, self.central + other.central)

    def __neg__(self) -> "ModeElement":
        return ModeElement({k: -v for k, v in self.terms.items()}, -self.central)

    def __sub__(self, other: "ModeElement") -> "ModeElement":
        return self + (-other)

    def scale(self, c) -> "ModeElement":
        c = _norm(c)
        return ModeElement({k: v * c for k, v in self.terms.items()}, self.central * c)

    def is_zero(self) -> bool:
        return not self.terms and _is_zero(self.central)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModeElement):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def min_mode(self) -> int | None:
        return min((m for (_, m) in self.terms), default=None)

    def __str__(self) -> str:
        parts = []
        for (b, m), c in sorted(self.terms.items(), key=lambda kv: (kv[0][1], ORDER[kv[0][0]])):
            parts.append(_coeff_word(c, f"{b}[{m}]"))
        if not _is_zero(self.central):
            parts.append(_coeff_word(self.central, "K"))
        if not parts:
            return "0"
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"ModeElement({self})"


def _coeff_word(c, word: str) -> str:
    text = str(c)
    if text == "1":
        return word
    if text == "-1":
        return "-" + word
    simple = isinstance(c, Polynomial) and len(c.terms) == 1
    return f"{text}*{word}" if simple else f"({text})*{word}"


def bracket_modes(X: ModeElement, Y: ModeElement) -> ModeElement:
    """``[a_m, b_n] = [a,b]_{m+n} + m delta_{m+n,0} kappa(a,b) K``, extended bilinearly."""
    terms: dict = {}
    central = Polynomial.zero(TABLE)
    for (a, m), c1 in X.terms.items():
        for (b, n), c2 in Y.terms.items():
            c = c1 * c2
            for d, s in LieData.bracket(a, b).items():
                key = (d, m + n)
                v = c * s
                terms[key] = terms[key] + v if key in terms else v
            if m + n == 0:
                kap = LieData.kappa(a, b)
                if kap:
                    central = central + c * (m * kap)
    return ModeElement(terms, central)


def spectral_flow(X: ModeElement, p) -> ModeElement:
    """``Ad(t^lambda)`` for the rank-1 coweight with ``alpha(lambda) = p``.

    Root vectors shift ``a_m -> a_{m + beta(lambda)}``; ``h_0`` picks up
    ``kappa(lambda, h) K = p K``.
    """
    p = Fraction(p)
    if p.denominator != 1:
        raise ValueError("alpha(lambda) must be an integer")
    p = int(p)
    terms: dict = {}
    central = X.central
    for (b, m), c in X.terms.items():
        shift = ROOT_DEGREE[b] * p
        terms[(b, m + shift)] = c
        if b == "h" and m == 0:
            central = central + c * p
    return ModeElement(terms, central)


# ---------------------------------------------------------------------------
# conjugation by rank-1 loop elements


def _matrix_of(b: str, m: int, c) -> ProjectiveLaurentMatrix:
    rows = []
    for r in LieData.matrices[b]:
        rows.append([LaurentPolynomial("t", {m: RationalFunction.coerce(c) * x}) if x else LaurentPolynomial.zero("t") for x in r])
    return ProjectiveLaurentMatrix(rows, SL2, check=False)


def _ldiff(x: LaurentPolynomial) -> LaurentPolynomial:
    return LaurentPolynomial._raw(x.var, {e - 1: c * e for e, c in x.coeffs.items() if e})


def _trace_product(A: ProjectiveLaurentMatrix, B: ProjectiveLaurentMatrix) -> LaurentPolynomial:
    return sum((A[i, j] * B[j, i] for i in range(2) for j in range(2)), LaurentPolynomial.zero("t"))


def _decompose(M: ProjectiveLaurentMatrix) -> ModeElement:
    """Write a traceless Laurent matrix as a combination of modes of e, h, f."""
    a, b, c, d = M[0, 0], M[0, 1], M[1, 0], M[1, 1]
    if not (a + d).is_zero():
        raise ArithmeticError("conjugated element is not traceless")
    terms: dict = {}
    for name, x in (("h", a), ("e", b), ("f", c)):
        for e, v in x.coeffs.items():
            terms[(name, e)] = v
    return ModeElement(terms)


def ad_loop(g, X: ModeElement) -> ModeElement:
    """``Ad(g)`` on modes: matrix conjugation plus the residue cocycle.

    ``Ad(g)(a t^m) = g a g^{-1} t^m + res_0 kappa(g^{-1} dg/dt, a t^m) K``.
    Accepts a LoopElement or a ProjectiveLaurentMatrix; scalar factors of g
    (PGL2 representatives) drop out of both parts.
    """
    G = g.realize() if hasattr(g, "realize") else g
    G = ProjectiveLaurentMatrix(G.entries, SL2, check=False)
    c, e = G.det().monomial_parts()
    inv_entries = [[G[1, 1], -G[0, 1]], [-G[1, 0], G[0, 0]]]
    Ginv = ProjectiveLaurentMatrix(
        [[x.scale(1 / c).shift(-e) for x in r] for r in inv_entries], SL2, check=False
    )
    dG = ProjectiveLaurentMatrix([[_ldiff(x) for x in r] for r in G.entries], SL2, check=False)
    maurer = laurent_mat_mul(Ginv, dG)
    out = ModeElement({}, X.central)
    for (b, m), coeff in X.terms.items():
        Xm = _matrix_of(b, m, coeff)
        conj = laurent_mat_mul(laurent_mat_mul(G, Xm), Ginv)
        # the scalar part of G (PGL2 representatives) cancels in G X G^{-1}
        piece = _decompose(conj)
        res = _trace_product(maurer, Xm).coeffs.get(-1)
        if res is not None:
            piece = piece + ModeElement({}, res)
        out = out + piece
    return out


def correction_mode(g_kind: str, coeff, j: int, n: int) -> ModeElement:
    """``t^{n+1} (dg/dt) g^{-1}`` for ``g = exp(coeff * x t^j)``: equals ``coeff*j*x_{n+j}``."""
    return ModeElement({(g_kind, n + j): _norm(coeff) * j}) if j else ModeElement()
