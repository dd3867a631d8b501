"""Rank-1 loop group elements and the Birkhoff factorization of Hecke transitions.

Matrices use the 2-dimensional realization with

    exp(a e t^m) = [[1, a t^m], [0, 1]],   exp(a f t^m) = [[1, 0], [a t^m, 1]],
    w = [[0, 1], [-1, 0]],                 a^(alpha^vee) = diag(a, 1/a),

and ``t^nu = diag(t^(r), t^(-r))`` with ``2r = alpha(nu)``.  For SL2 ``r`` must
be an integer; for PGL2 the same element is stored as ``diag(1, t^(-alpha(nu)))``,
which agrees with it up to the scalar ``t^r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import PGL2, SL2, LaurentPolynomial, ProjectiveLaurentMatrix, RationalFunction, laurent_mat_mul, regularity
from .roots import Coweight, dominant_rep, hecke_class, pairing, sl2

ALPHA = (1,)

FLAVOR_NAMES = {"sl2": SL2, "pgl2": PGL2, SL2: SL2, PGL2: PGL2}


def _flavor(f: str) -> str:
    try:
        return FLAVOR_NAMES[f]
    except KeyError:
        raise ValueError(f"unknown flavor {f!r}") from None


def _coef(a):
    if isinstance(a, RationalFunction):
        return a
    return RationalFunction.coerce(Fraction(a) if not hasattr(a, "terms") else a)


def _lp(c, e: int) -> LaurentPolynomial:
    return LaurentPolynomial("t", {e: _coef(c)})


def _text_scalar(a) -> str:
    s = str(a)
    return s if "/" not in s and " " not in s else f"({s})"


@dataclass(frozen=True)
class Gen:
    """One letter of a loop word."""

    kind: str  # "exp", "t", "weyl", "cartan"
    sign: int = 1  # exp: +1 for e_alpha, -1 for e_{-alpha}; cartan: power of alpha^vee
    coeff: object = 1
    mode: int = 0  # exp: power of t; t: the pairing alpha(nu)

    def realize(self, flavor: str) -> ProjectiveLaurentMatrix:
        if self.kind == "exp":
            x = _lp(self.coeff, self.mode)
            rows = [[1, x], [0, 1]] if self.sign > 0 else [[1, 0], [x, 1]]
            return ProjectiveLaurentMatrix(rows, flavor)
        if self.kind == "t":
            return t_coweight_matrix(self.mode, flavor)
        if self.kind == "weyl":
            return ProjectiveLaurentMatrix([[0, 1], [-1, 0]], flavor)
        if self.kind == "cartan":
            a = _coef(self.coeff) ** self.sign
            return ProjectiveLaurentMatrix([[a, 0], [0, 1 / a]], flavor)
        raise ValueError(f"unknown generator kind {self.kind!r}")

    def __str__(self) -> str:
        if self.kind == "exp":
            root = "e" if self.sign > 0 else "f"
            return f"exp({_text_scalar(self.coeff)}*{root}*t^{self.mode})"
        if self.kind == "t":
            return f"t^(alpha={self.mode})"
        if self.kind == "weyl":
            return "w"
        return f"{_text_scalar(self.coeff)}^({self.sign}*alpha_vee)"


def t_coweight_matrix(alpha_value, flavor: str) -> ProjectiveLaurentMatrix:
    p = Fraction(alpha_value)
    if p.denominator != 1:
        raise ValueError("alpha(nu) must be an integer")
    p = int(p)
    if flavor == SL2:
        if p % 2:
            raise ValueError(f"t^nu with alpha(nu) = {p} is not in SL2 (needs an even pairing)")
        return ProjectiveLaurentMatrix.diagonal_monomial(p // 2, -p // 2, SL2)
    return ProjectiveLaurentMatrix.diagonal_monomial(0, -p, PGL2)


class LoopElement:
    """A word in rank-1 loop generators together with its matrix realization."""

    __slots__ = ("word", "flavor")

    def __init__(self, word: Sequence[Gen] = (), flavor: str = PGL2):
        self.word = tuple(word)
        self.flavor = _flavor(flavor)

    @classmethod
    def exp_nilpotent(cls, sign: int, coeff, mode: int, flavor: str = PGL2) -> "LoopElement":
        return cls([Gen("exp", 1 if sign > 0 else -1, coeff, mode)], flavor)

    @classmethod
    def t_coweight(cls, nu, flavor: str = PGL2) -> "LoopElement":
        value = pairing(ALPHA, nu) if isinstance(nu, Coweight) else Fraction(nu)
        return cls([Gen("t", mode=int(value))], flavor)

    @classmethod
    def weyl(cls, flavor: str = PGL2) -> "LoopElement":
        return cls([Gen("weyl")], flavor)

    @classmethod
    def cartan(cls, coeff, power: int = 1, flavor: str = PGL2) -> "LoopElement":
        return cls([Gen("cartan", power, coeff)], flavor)

    @classmethod
    def identity(cls, flavor: str = PGL2) -> "LoopElement":
        return cls((), flavor)

    def __mul__(self, other: "LoopElement") -> "LoopElement":
        if self.flavor != other.flavor:
            raise ValueError("flavor mismatch")
        return LoopElement(self.word + other.word, self.flavor)

    def realize(self) -> ProjectiveLaurentMatrix:
        M = ProjectiveLaurentMatrix.identity(self.flavor)
        for g in self.word:
            M = laurent_mat_mul(M, g.realize(self.flavor))
        return M

    def __str__(self) -> str:
        return "*".join(str(g) for g in self.word) if self.word else "1"

    def __repr__(self) -> str:
        return f"LoopElement({self}, {self.flavor})"


@dataclass
class Factorization:
    a: object
    mu: Coweight
    lam: Coweight
    j: int
    flavor: str
    regime: str
    A: LoopElement
    nu: Coweight
    B: LoopElement

    def source(self) -> LoopElement:
        """``exp(a e t^(j + alpha(mu))) * t^(mu + lambda)``."""
        am = int(pairing(ALPHA, self.mu))
        return LoopElement.exp_nilpotent(1, self.a, self.j + am, self.flavor) * LoopElement.t_coweight(
            self.mu + self.lam, self.flavor
        )


def birkhoff_factorize(a, mu, lam, j: int, flavor: str = PGL2, regime: str | None = None) -> Factorization:
    """Factor ``exp(a e t^(j+alpha(mu))) t^(mu+lambda)`` as ``A * t^nu * B``.

    ``A`` is regular at infinity and ``B`` at zero.  The regime is chosen from
    ``j`` unless forced with ``regime="generic"``.
    """
    flavor = _flavor(flavor)
    mu = mu if isinstance(mu, Coweight) else Coweight.from_pairing(mu)
    lam = lam if isinstance(lam, Coweight) else Coweight.from_pairing(lam)
    if mu.datum.rank != 1:
        raise ValueError("matrix factorization is implemented for rank 1")
    ac = _coef(a)
    if ac.is_zero():
        raise ValueError("a must be nonzero")
    am, al = pairing(ALPHA, mu), pairing(ALPHA, lam)
    for v in (am, al):
        if v.denominator != 1 or (flavor == SL2 and v % 2):
            raise ValueError(f"pairing {v} is not allowed for flavor {flavor}")
    am, al = int(am), int(al)
    av = mu.datum.coroot(ALPHA)
    if regime is None:
        if j >= al:
            regime = "right"
        elif j <= -am:
            regime = "left"
        else:
            regime = "generic"
    if regime == "right":
        # exp(a e t^(j+am)) t^(mu+lam) = t^(mu+lam) exp(a e t^(j-al))
        A = LoopElement.identity(flavor)
        nu = mu + lam
        B = LoopElement.exp_nilpotent(1, a, j - al, flavor)
    elif regime == "left":
        A = LoopElement.exp_nilpotent(1, a, j + am, flavor)
        nu = mu + lam
        B = LoopElement.identity(flavor)
    elif regime == "generic":
        A = LoopElement.weyl(flavor) * LoopElement.exp_nilpotent(1, -1 / ac, -j - am, flavor)
        nu = mu + lam - av * (j + am)
        B = LoopElement.exp_nilpotent(-1, a, al - j, flavor) * LoopElement.cartan(a, -1, flavor)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return Factorization(a, mu, lam, j, flavor, regime, A, nu, B)


@dataclass
class FactorizationCheck:
    product: bool
    A_regular_at_infinity: bool
    B_regular_at_zero: bool
    class_match: bool

    def __bool__(self) -> bool:
        return self.product and self.A_regular_at_infinity and self.B_regular_at_zero and self.class_match


def expected_class(mu: Coweight, lam: Coweight, j: int) -> Coweight:
    am, al = pairing(ALPHA, mu), pairing(ALPHA, lam)
    if 0 <= j < al and mu.is_dominant() and lam.is_dominant():
        return hecke_class(mu, lam, ALPHA, j)
    return dominant_rep(mu + lam)[0]


def verify_factorization(a, mu, lam, j, A: LoopElement, nu: Coweight, B: LoopElement, flavor: str = PGL2) -> FactorizationCheck:
    """Product identity, one-sided regularity, and agreement with the Hecke class."""
    flavor = _flavor(flavor)
    mu = mu if isinstance(mu, Coweight) else Coweight.from_pairing(mu)
    lam = lam if isinstance(lam, Coweight) else Coweight.from_pairing(lam)
    nu = nu if isinstance(nu, Coweight) else Coweight.from_pairing(nu)
    am = int(pairing(ALPHA, mu))
    lhs = (LoopElement.exp_nilpotent(1, a, j + am, flavor) * LoopElement.t_coweight(mu + lam, flavor)).realize()
    try:
        rhs = laurent_mat_mul(laurent_mat_mul(A.realize(), t_coweight_matrix(pairing(ALPHA, nu), flavor)), B.realize())
        product = lhs == rhs
    except ValueError:
        product = False
    ra = regularity(A.realize(), "infinity")
    rb = regularity(B.realize(), "zero")
    target = pairing(ALPHA, expected_class(mu, lam, j))
    class_match = abs(pairing(ALPHA, nu)) == abs(target)
    return FactorizationCheck(product, ra, rb, class_match)


def check(f: Factorization) -> FactorizationCheck:
    return verify_factorization(f.a, f.mu, f.lam, f.j, f.A, f.nu, f.B, f.flavor)


def sweep_factorizations(
    a_values=(1, -1, 2, -3), mu_values=(0, 1, 2, 3), lam_values=(1, 2, 3), flavors=(PGL2, SL2)
):
    """All ``(a, alpha(mu), alpha(lambda), j)`` with ``0 <= j < alpha(lambda)`` valid for each flavor."""
    for flavor in flavors:
        for a in a_values:
            for m in mu_values:
                for l in lam_values:
                    if flavor == SL2 and (m % 2 or l % 2):
                        continue
                    for j in range(l):
                        yield a, m, l, j, flavor
