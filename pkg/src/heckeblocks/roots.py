"""Root data, coweights, dominance and Hecke classes for simple Lie algebras."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

SIMPLY_CONNECTED = "sc"
ADJOINT = "adjoint"


def cartan_matrix(kind: str, rank: int) -> tuple[tuple[int, ...], ...]:
    """Cartan matrix with ``A[i][j] = <alpha_i^vee, alpha_j>`` (Bourbaki numbering)."""
    kind = kind.upper()
    n = rank
    if n < 1:
        raise ValueError("rank must be positive")
    A = [[0] * n for _ in range(n)]
    for i in range(n):
        A[i][i] = 2
    if kind == "G":
        if n != 2:
            raise ValueError("G only exists in rank 2")
        return ((2, -1), (-3, 2))
    for i in range(n - 1):
        A[i][i + 1] = A[i + 1][i] = -1
    if kind == "A":
        pass
    elif kind == "B":
        if n < 2:
            raise ValueError("B needs rank >= 2")
        A[n - 1][n - 2] = -2
    elif kind == "C":
        if n < 2:
            raise ValueError("C needs rank >= 2")
        A[n - 2][n - 1] = -2
    elif kind == "D":
        if n < 3:
            raise ValueError("D needs rank >= 3")
        A[n - 2][n - 1] = A[n - 1][n - 2] = 0
        A[n - 3][n - 1] = A[n - 1][n - 3] = -1
    else:
        raise ValueError(f"unsupported Cartan type {kind!r}")
    return tuple(tuple(r) for r in A)


def _solve(M: Sequence[Sequence[Fraction]], b: Sequence[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals for a square nonsingular system."""
    n = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(M, b)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        piv = aug[c][c]
        aug[c] = [x / piv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [aug[r][n] for r in range(n)]


class RootDatum:
    """Roots in simple-root coordinates; coweights in fundamental-coweight coordinates.

    The invariant form is normalized so that long roots have square length 2.
    """

    def __init__(self, kind: str, rank: int):
        self.kind = kind.upper()
        self.rank = rank
        self.cartan = cartan_matrix(kind, rank)
        A = self.cartan
        n = rank
        # symmetrizer: d_i A_ij symmetric, d_i proportional to |alpha_i|^2 / 2
        d = [None] * n
        d[0] = Fraction(1)
        changed = True
        while changed:
            changed = False
            for i in range(n):
                for j in range(n):
                    if A[i][j] and d[i] is not None and d[j] is None:
                        d[j] = d[i] * A[i][j] / A[j][i]
                        changed = True
        top = max(d)
        self.sym = tuple(x / top for x in d)  # (alpha_i, alpha_i) / 2 with long roots = 1
        self.positive_roots = self._positive_roots()
        self.theta = max(self.positive_roots, key=lambda r: (sum(r), r))
        self.dual_coxeter = 1 + sum(c * s for c, s in zip(self.theta, self.sym))
        self.dim = n + 2 * len(self.positive_roots)

    def _positive_roots(self) -> tuple[tuple[int, ...], ...]:
        n = self.rank
        simple = [tuple(1 if i == j else 0 for j in range(n)) for i in range(n)]
        found = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for beta in frontier:
                for i in range(n):
                    b = self.coroot_pairing(beta, i)
                    img = list(beta)
                    img[i] -= b
                    img = tuple(img)
                    if all(c >= 0 for c in img) and any(img) and img not in found:
                        found.add(img)
                        nxt.append(img)
            frontier = nxt
        return tuple(sorted(found, key=lambda r: (sum(r), tuple(-c for c in r))))

    def coroot_pairing(self, beta: Sequence[int], i: int) -> int:
        """``<alpha_i^vee, beta>`` for a root ``beta`` in simple-root coordinates."""
        return sum(c * self.cartan[i][j] for j, c in enumerate(beta))

    def kappa(self, b1: Sequence[int], b2: Sequence[int]) -> Fraction:
        """Invariant form on roots: ``(alpha_i, alpha_j) = sym_i * A_ij``."""
        return sum(
            Fraction(x) * y * self.sym[i] * self.cartan[i][j]
            for i, x in enumerate(b1)
            for j, y in enumerate(b2)
            if x and y
        )

    def simple_root(self, i: int) -> tuple[int, ...]:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def coroot(self, beta: Sequence[int]) -> "Coweight":
        """``beta^vee = 2 beta / (beta, beta)`` in fundamental-coweight coordinates."""
        norm = self.kappa(beta, beta)
        coeffs = [Fraction(0)] * self.rank
        for i, c in enumerate(beta):
            if not c:
                continue
            # alpha_i^vee = sum_j A_ij omega_j^vee, and beta^vee = sum c_i (|alpha_i|^2/|beta|^2) alpha_i^vee
            w = Fraction(c) * 2 * self.sym[i] / norm
            for j in range(self.rank):
                coeffs[j] += w * self.cartan[i][j]
        return Coweight(self, tuple(coeffs))

    def is_root(self, beta: Sequence[int]) -> bool:
        beta = tuple(beta)
        return beta in self.positive_roots or tuple(-c for c in beta) in self.positive_roots

    def __repr__(self) -> str:
        return f"RootDatum({self.kind}{self.rank})"

    def __eq__(self, other) -> bool:
        return isinstance(other, RootDatum) and (self.kind, self.rank) == (other.kind, other.rank)

    def __hash__(self) -> int:
        return hash((self.kind, self.rank))

    def __reduce__(self):
        return (root_datum, (self.kind, self.rank))


@lru_cache(maxsize=None)
def root_datum(kind: str, rank: int) -> RootDatum:
    return RootDatum(kind, rank)


def sl2() -> RootDatum:
    return root_datum("A", 1)


@dataclass(frozen=True)
class Coweight:
    """``sum_i coeffs[i] * omega_i^vee``; so ``alpha_i(lambda) = coeffs[i]``."""

    datum: RootDatum
    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        if len(self.coeffs) != self.datum.rank:
            raise ValueError("coweight length does not match rank")

    @classmethod
    def zero(cls, datum: RootDatum) -> "Coweight":
        return cls(datum, (0,) * datum.rank)

    @classmethod
    def from_pairing(cls, value, datum: RootDatum | None = None) -> "Coweight":
        """Rank-1 coweight with ``alpha(lambda) = value``."""
        datum = datum or sl2()
        if datum.rank != 1:
            raise ValueError("from_pairing is a rank-1 constructor")
        return cls(datum, (value,))

    def __add__(self, other: "Coweight") -> "Coweight":
        return Coweight(self.datum, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "Coweight") -> "Coweight":
        return Coweight(self.datum, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "Coweight":
        return Coweight(self.datum, tuple(-a for a in self.coeffs))

    def __mul__(self, c) -> "Coweight":
        return Coweight(self.datum, tuple(a * Fraction(c) for a in self.coeffs))

    __rmul__ = __mul__

    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def is_minuscule(self) -> bool:
        return all(pairing(r, self) in (0, 1) for r in self.datum.positive_roots)

    def in_lattice(self, lattice: str = ADJOINT) -> bool:
        """Integral coweight (adjoint flavor) or element of the coroot lattice (sc flavor)."""
        if any(c.denominator != 1 for c in self.coeffs):
            return False
        if lattice == ADJOINT:
            return True
        A = self.datum.cartan
        n = self.datum.rank
        AT = [[Fraction(A[j][i]) for j in range(n)] for i in range(n)]
        m = _solve(AT, self.coeffs)
        return all(x.denominator == 1 for x in m)

    def __str__(self) -> str:
        if self.datum.rank == 1:
            return f"alpha={self.coeffs[0]}"
        return "(" + ",".join(str(c) for c in self.coeffs) + ")"


def pairing(alpha: Sequence[int], lam: Coweight) -> Fraction:
    """``alpha(lambda)`` for a root given in simple-root coordinates."""
    if len(alpha) != lam.datum.rank:
        raise ValueError("root and coweight ranks differ")
    return sum((Fraction(c) * l for c, l in zip(alpha, lam.coeffs)), Fraction(0))


def reflect(lam: Coweight, i: int) -> Coweight:
    """Simple reflection ``s_i(lambda) = lambda - alpha_i(lambda) alpha_i^vee``."""
    A = lam.datum.cartan
    li = lam.coeffs[i]
    return Coweight(lam.datum, tuple(c - li * A[i][j] for j, c in enumerate(lam.coeffs)))


def dominant_rep(lam: Coweight) -> tuple[Coweight, list[int]]:
    """Dominant Weyl conjugate and the reflection word that reaches it."""
    word: list[int] = []
    cur = lam
    while True:
        neg = next((i for i, c in enumerate(cur.coeffs) if c < 0), None)
        if neg is None:
            return cur, word
        cur = reflect(cur, neg)
        word.append(neg)


def weyl_orbit(lam: Coweight) -> set:
    """Brute-force orbit (finite Weyl group), as coefficient tuples."""
    seen = {lam.coeffs}
    frontier = [lam]
    while frontier:
        nxt = []
        for mu in frontier:
            for i in range(lam.datum.rank):
                r = reflect(mu, i)
                if r.coeffs not in seen:
                    seen.add(r.coeffs)
                    nxt.append(r)
        frontier = nxt
    return seen


def hecke_formula(mu: Coweight, lam: Coweight, alpha: Sequence[int], j: int) -> Coweight:
    """``mu + lambda - (j + alpha(mu)) alpha^vee`` before dominance reduction."""
    av = mu.datum.coroot(alpha)
    return mu + lam - av * (j + pairing(alpha, mu))


def hecke_class(mu: Coweight, lam: Coweight, alpha: Sequence[int], j: int) -> Coweight:
    """Dominant coweight classifying the Hecke modification of type ``(alpha, j)``."""
    if not (mu.is_dominant() and lam.is_dominant()):
        raise ValueError("mu and lambda must be dominant")
    if tuple(alpha) not in mu.datum.positive_roots:
        raise ValueError(f"{tuple(alpha)} is not a positive root")
    if not 0 <= j < pairing(alpha, lam):
        raise ValueError(f"need 0 <= j < alpha(lambda) = {pairing(alpha, lam)}, got j={j}")
    return dominant_rep(hecke_formula(mu, lam, alpha, j))[0]
