"""PBW straightening for vacuum-type modules of affine sl2.

States are finite sums of ordered monomials applied to a cyclic vector.
Letters are ``(basis, mode)`` and monomials are sorted by ``(mode, basis)``
ascending, so the left-most letter is the most negative one.

Two cyclic vectors are supported:

* the untwisted vacuum ``|0>``: killed by every ``a_m`` with ``m >= 0``;
* the induced module with lowest weight ``-p k`` (``p = alpha(lambda)``): the
  cyclic vector is killed by ``a_m`` for ``m >= 1`` and by ``f_0``,
  ``h_0`` acts by ``-p k`` and ``e_0`` creates.

The twisted vacuum module is not a separate engine: its states are stored as
untwisted vacuum states and a twisted mode acts through ``Ad(t^(-lambda))``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from ..exact import Polynomial, RationalFunction
from .lie import BASIS, K, ORDER, ROOT_DEGREE, TABLE, LieData, ModeElement, _coeff_word, _is_zero, _norm, spectral_flow

Letter = tuple  # (basis, mode)
Monomial = tuple  # tuple of letters, sorted by letter_key


def letter_key(l: Letter):
    return (l[1], ORDER[l[0]])


class CyclicVector:
    """Annihilation and creation rules for the cyclic vector of a module."""

    def __init__(self, name: str, lowest: int = 0):
        self.name = name
        self.lowest = int(lowest)  # p with h_0 -> -p k on the cyclic vector
        self._cache: dict = {}

    def creates(self, l: Letter) -> bool:
        b, m = l
        if self.name == "vac":
            return m <= -1
        return m <= -1 or (m == 0 and b == "e")

    def on_cyclic(self, l: Letter) -> dict:
        """Image of ``l`` applied to the bare cyclic vector, for a non-creating letter."""
        b, m = l
        if self.name == "vac" or m != 0 or b != "h":
            return {}
        if self.lowest == 0:
            return {}
        return {(): K * (-self.lowest)}

    def __repr__(self) -> str:
        return f"CyclicVector({self.name}, {self.lowest})"


VACUUM = CyclicVector("vac")


@lru_cache(maxsize=None)
def induced(p: int) -> CyclicVector:
    return CyclicVector("induced", p)


def _add_into(acc: dict, src: dict, c) -> None:
    for mono, v in src.items():
        w = v * c if c is not None else v
        if mono in acc:
            s = acc[mono] + w
            if _is_zero(s):
                del acc[mono]
            else:
                acc[mono] = s
        elif not _is_zero(w):
            acc[mono] = w


def apply_letter(cv: CyclicVector, l: Letter, mono: Monomial) -> dict:
    """``l * mono|cv>`` straightened into ordered monomials (memoized per cyclic vector)."""
    key = (l, mono)
    hit = cv._cache.get(key)
    if hit is not None:
        return hit
    out = _apply_letter(cv, l, mono)
    cv._cache[key] = out
    return out


def _apply_letter(cv: CyclicVector, l: Letter, mono: Monomial) -> dict:
    if not mono:
        if cv.creates(l):
            return {(l,): Polynomial.one(TABLE)}
        return cv.on_cyclic(l)
    first, rest = mono[0], mono[1:]
    if cv.creates(l) and letter_key(l) <= letter_key(first):
        return {(l,) + mono: Polynomial.one(TABLE)}
    # l * first * rest = first * (l * rest) + [l, first] * rest
    out: dict = {}
    for m2, c in apply_letter(cv, l, rest).items():
        _add_into(out, apply_letter(cv, first, m2), c)
    br = _bracket_letters(l, first)
    for l2, c in br.terms.items():
        _add_into(out, apply_letter(cv, l2, rest), c)
    if not _is_zero(br.central):
        _add_into(out, {rest: Polynomial.one(TABLE)}, br.central * K)
    return out


_BRACKETS: dict = {}


def _bracket_letters(x: Letter, y: Letter) -> ModeElement:
    hit = _BRACKETS.get((x, y))
    if hit is None:
        from .lie import bracket_modes

        hit = bracket_modes(ModeElement.mode(*x), ModeElement.mode(*y))
        _BRACKETS[(x, y)] = hit
    return hit


def apply_element(cv: CyclicVector, X: ModeElement, terms: dict) -> dict:
    out: dict = {}
    for mono, c in terms.items():
        for l, cx in X.terms.items():
            _add_into(out, apply_letter(cv, l, mono), c * cx)
    if not _is_zero(X.central):
        _add_into(out, terms, X.central * K)
    return out


def _depth(mono: Monomial) -> int:
    return -sum(m for _, m in mono)


class ModuleState:
    """Element of the (possibly twisted) vacuum module or of an induced module.

    ``twist`` is ``alpha(lambda)``; for the twisted vacuum module ``terms``
    are stored in untwisted letters and printed with twisted labels.
    """

    __slots__ = ("cv", "twist", "terms")

    def __init__(self, terms: dict, twist: int = 0, cv: CyclicVector = VACUUM):
        self.cv = cv
        self.twist = int(twist)
        normed = ((m, _norm(c)) for m, c in terms.items())
        self.terms = {m: c for m, c in normed if not _is_zero(c)}

    @classmethod
    def vacuum(cls, twist: int = 0) -> "ModuleState":
        return cls({(): 1}, twist)

    @classmethod
    def cyclic(cls, cv: CyclicVector) -> "ModuleState":
        return cls({(): 1}, cv.lowest, cv)

    @classmethod
    def monomial(cls, letters: Iterable[Letter], twist: int = 0) -> "ModuleState":
        """Ordered product of twisted letters applied to ``|0>^lambda``."""
        st = cls.vacuum(twist)
        for l in reversed(list(letters)):
            st = apply_mode(ModeElement.mode(*l), st)
        return st

    def is_zero(self) -> bool:
        return not self.terms

    def depth(self) -> int:
        """Untwisted energy ``-sum(modes)`` of the deepest stored monomial."""
        return max((_depth(m) for m in self.terms), default=0)

    def __add__(self, other: "ModuleState") -> "ModuleState":
        self._same(other)
        acc = dict(self.terms)
        _add_into(acc, other.terms, None)
        return ModuleState(acc, self.twist, self.cv)

    def __neg__(self) -> "ModuleState":
        return ModuleState({m: -c for m, c in self.terms.items()}, self.twist, self.cv)

    def __sub__(self, other: "ModuleState") -> "ModuleState":
        return self + (-other)

    def scale(self, c) -> "ModuleState":
        c = _norm(c)
        return ModuleState({m: v * c for m, v in self.terms.items()}, self.twist, self.cv)

    def _same(self, other: "ModuleState") -> None:
        if self.twist != other.twist or self.cv is not other.cv:
            raise ValueError("states live in different modules")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModuleState):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def display_letter(self, l: Letter) -> str:
        b, m = l
        if self.cv is VACUUM:
            m = m + ROOT_DEGREE[b] * self.twist  # untwisted a_m is twisted a_{m + beta(lambda)}
        return f"{b}[{m}]"

    def cyclic_text(self) -> str:
        if self.cv is not VACUUM:
            return f"lw(lambda={_half(self.twist)}*acheck)"
        return "vac" if self.twist == 0 else f"vac(lambda={_half(self.twist)}*acheck)"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda kv: (len(kv[0]), [letter_key(l) for l in kv[0]])):
            word = "*".join([self.display_letter(l) for l in mono] + [self.cyclic_text()])
            parts.append(_coeff_word(c, word))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self) -> str:
        return f"ModuleState({self})"


def _half(p: int) -> str:
    v = Fraction(p, 2)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def apply_mode(X: ModeElement, v: ModuleState) -> ModuleState:
    """Act by a (twisted) mode element; on ``V^lambda`` this is ``Ad(t^(-lambda)) X``."""
    if v.cv is VACUUM and v.twist:
        X = spectral_flow(X, -v.twist)
    return ModuleState(apply_element(v.cv, X, v.terms), v.twist, v.cv)


def annihilates(b: str, m: int, twist: int = 0) -> bool:
    """Whether the twisted mode ``b_m`` kills ``|0>^lambda`` (``twist = alpha(lambda)``).

    Root vectors: ``m - beta(lambda) >= 0``.  Cartan: ``m > 0``, and also
    ``m = 0`` when ``lambda = 0`` (otherwise ``h_0`` acts by ``-alpha(lambda) k``).
    """
    if b == "h":
        return m > 0 or (m == 0 and twist == 0)
    return m - ROOT_DEGREE[b] * twist >= 0


def vacuum_basis(depth: int, cv: CyclicVector = VACUUM, max_zero: int = 0) -> list:
    """Ordered monomials of untwisted energy ``<= depth`` (``e_0`` powers up to ``max_zero``)."""
    letters = [(b, m) for m in range(-depth, 0) for b in BASIS]
    letters.sort(key=letter_key)
    out = []

    def rec(start: int, budget: int, acc: list):
        out.append(tuple(acc))
        for i in range(start, len(letters)):
            l = letters[i]
            cost = -l[1]
            if cost <= budget:
                acc.append(l)
                rec(i, budget - cost, acc)
                acc.pop()

    rec(0, depth, [])
    if cv is not VACUUM and max_zero:
        out = [m + (("e", 0),) * n for m in out for n in range(max_zero + 1)]
    return out


def states_up_to_depth(depth: int) -> list:
    """PBW basis states of the untwisted vacuum module with energy ``<= depth``."""
    return [ModuleState({m: 1}) for m in vacuum_basis(depth)]


# ---------------------------------------------------------------------------
# Sugawara operators


def sugawara_terms(n: int, m: int, conj=None) -> list:
    """Pairs ``(left, right, weight)`` of the normally ordered product at split ``m``."""
    pairs = []
    for a, b, w in LieData.dual_pairs:
        if m < 0:
            left, right = ModeElement.mode(a, m), ModeElement.mode(b, n - m)
        else:
            left, right = ModeElement.mode(b, n - m), ModeElement.mode(a, m)
        if conj is not None:
            left, right = conj(left), conj(right)
        pairs.append((left, right, w))
    return pairs


class TruncationError(RuntimeError):
    pass


def _kills(X: ModeElement, depth: int) -> bool:
    return _is_zero(X.central) and all(m > depth for (_, m) in X.terms)


def scaled_sugawara_apply(n: int, v: ModuleState, conj=None, certify: bool = True) -> ModuleState:
    """``2(k + h^vee) S_n`` on an untwisted vacuum state, optionally with conjugated modes.

    ``conj`` maps a ModeElement to its conjugate (``Ad(g)``); the normally
    ordered sum is conjugated term by term, which is how ``Ad(g) S_n`` is
    defined.  The infinite sum over splits is truncated where the right
    factor provably kills ``v`` (all its modes exceed the energy of ``v`` and
    it has no central part); two further splits on each side are evaluated
    and must vanish when ``certify`` is set.
    """
    if v.cv is not VACUUM:
        raise ValueError("Sugawara operators act here on (twisted) vacuum states")
    if v.twist:
        # on V^lambda the operator is Ad(t^-lambda) S_n acting on the stored untwisted state
        inner = conj
        flow = (lambda X: spectral_flow(X, -v.twist)) if inner is None else (lambda X: inner(spectral_flow(X, -v.twist)))
        out = scaled_sugawara_apply(n, ModuleState(v.terms), flow, certify)
        return ModuleState(out.terms, v.twist)
    D = v.depth()
    acc: dict = {}

    def split(m: int, force: bool = False) -> tuple[dict, bool]:
        out: dict = {}
        dead = True
        for left, right, w in sugawara_terms(n, m, conj):
            if _kills(right, D):
                if not force:
                    continue
            else:
                dead = False
            r = apply_element(VACUUM, right, v.terms)
            if r:
                _add_into(out, apply_element(VACUUM, left, r), Polynomial.const(TABLE, w))
        return out, dead

    for start, step in ((-1, -1), (0, 1)):
        m = start
        while True:
            part, dead = split(m)
            if dead:
                if not certify:
                    break
                for mm in (m, m + step):
                    if split(mm, force=True)[0]:
                        raise TruncationError(f"split m={mm} of S_{n} is nonzero beyond the cutoff")
                break
            _add_into(acc, part, None)
            m += step
            if abs(m) > 10 * (D + abs(n) + 10):
                raise TruncationError("normally ordered sum did not terminate")
    return ModuleState(acc)


def sugawara_apply(n: int, v: ModuleState, level=None) -> ModuleState:
    """``S_n v`` with coefficients rational in ``k``, or at a fixed non-critical ``level``."""
    out = scaled_sugawara_apply(n, v)
    if level is not None:
        level = Fraction(level)
        if level == -LieData.dual_coxeter:
            raise ValueError("critical level k = -h^vee is excluded")
        return _at_level(out, level, 1 / (2 * (level + LieData.dual_coxeter)))
    inv = RationalFunction.const(TABLE, 1) / (RationalFunction.var(TABLE, "k") * 2 + 2 * LieData.dual_coxeter)
    return ModuleState({m: RationalFunction.coerce(c) * inv for m, c in out.terms.items()}, v.twist, v.cv)


def _at_level(v: ModuleState, level: Fraction, c: Fraction) -> ModuleState:
    out = {}
    for m, x in v.terms.items():
        y = x.substitute({"k": level})
        y = y.num if isinstance(y, RationalFunction) else y
        out[m] = _norm(y) * c
    return ModuleState(out, v.twist, v.cv)
