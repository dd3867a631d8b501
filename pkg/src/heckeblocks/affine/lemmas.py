"""Checks of the Sugawara conjugation lemma and of the minuscule vacuum presentation.

All identities are tested on states of the untwisted vacuum module with
exact coefficients polynomial in ``k``.  Sugawara operators are used in the
scaled form ``S~_n = 2(k+2) S_n`` so that nothing leaves the polynomial ring.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from ..exact import Polynomial, SL2, PGL2
from ..loops import LoopElement
from .lie import K, ROOT_DEGREE, TABLE, LieData, ModeElement, ad_loop, correction_mode, spectral_flow
from .modules import (
    VACUUM,
    ModuleState,
    apply_element,
    apply_mode,
    induced,
    scaled_sugawara_apply,
    vacuum_basis,
)

LEVEL_SHIFT = K * 2 + 2 * LieData.dual_coxeter  # 2(k + h^vee)


@dataclass
class StateCheck:
    """One identity evaluated on one state; ``residual`` is LHS - RHS."""

    identity: str
    state: str
    residual: ModuleState
    relations_used: int = 0
    prolongation_order: int = 0

    @property
    def zero(self) -> bool:
        return self.residual.is_zero()

    @property
    def status(self) -> str:
        return "verified" if self.zero else "failed"


@dataclass
class LemmaReport:
    case: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return bool(self.checks) and all(c.zero for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.zero]


def _states(depth: int, states=None) -> list:
    if states is not None:
        return list(states)
    return [ModuleState({m: 1}) for m in vacuum_basis(depth)]


# ---------------------------------------------------------------------------
# Virasoro relations


def virasoro_residual(m: int, n: int, v: ModuleState) -> ModuleState:
    """``[S~_m, S~_n] - 2(k+2)(m-n) S~_{m+n} - delta (m^3-m) k (k+2)`` on ``v``.

    This is the scaled form of ``[S_m,S_n] = (m-n) S_{m+n} + delta (m^3-m)/12 * 3k/(k+2)``.
    """
    lhs = scaled_sugawara_apply(m, scaled_sugawara_apply(n, v)) - scaled_sugawara_apply(n, scaled_sugawara_apply(m, v))
    rhs = scaled_sugawara_apply(m + n, v).scale(LEVEL_SHIFT * (m - n))
    if m + n == 0:
        rhs = rhs + v.scale(K * (K + 2) * (m**3 - m))
    return lhs - rhs


def current_residual(n: int, b: str, m: int, v: ModuleState) -> ModuleState:
    """``[S~_n, b_m] + 2(k+2) m b_{m+n}`` on ``v`` (``S_n`` acts as ``-t^(n+1) d/dt``)."""
    X = ModeElement.mode(b, m)
    lhs = scaled_sugawara_apply(n, apply_mode(X, v)) - apply_mode(X, scaled_sugawara_apply(n, v))
    return lhs + apply_mode(ModeElement.mode(b, m + n), v).scale(LEVEL_SHIFT * m)


def check_virasoro(modes=range(-2, 3), depth: int = 4, states=None) -> LemmaReport:
    t0 = time.perf_counter()
    rep = LemmaReport(f"virasoro m,n in {list(modes)} depth<={depth}")
    sts = _states(depth, states)
    modes = list(modes)
    for v in sts:
        for i, m in enumerate(modes):
            for n in modes[i + 1 :]:
                r = virasoro_residual(m, n, v)
                rep.checks.append(StateCheck(f"[S_{m},S_{n}]", str(v), r))
    rep.seconds = time.perf_counter() - t0
    return rep


def check_currents(ns=range(-2, 3), ms=range(-2, 3), depth: int = 2, states=None) -> LemmaReport:
    t0 = time.perf_counter()
    rep = LemmaReport(f"[S_n, a_m] n in {list(ns)} m in {list(ms)} depth<={depth}")
    for v in _states(depth, states):
        for n in ns:
            for m in ms:
                for b in LieData.basis:
                    rep.checks.append(StateCheck(f"[S_{n},{b}_{m}]", str(v), current_residual(n, b, m, v)))
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# conjugation by exp(a x t^j) and by t^lambda


def _conjugator(g):
    """``Ad(g)`` memoized on bare modes ``a_m`` (the only inputs from Sugawara sums)."""
    cache: dict = {}

    def conj(X: ModeElement) -> ModeElement:
        if len(X.terms) != 1 or not X.central.is_zero():
            return ad_loop(g, X)
        (letter, c), = X.terms.items()
        if letter not in cache:
            cache[letter] = ad_loop(g, ModeElement.mode(*letter))
        return cache[letter].scale(c)

    return conj


def conjugation_nilpotent_residual(a, x: str, j: int, n: int, v: ModuleState) -> ModuleState:
    """``Ad(g) S~_n - S~_n - 2(k+2) a j x_{n+j}`` on ``v`` for ``g = exp(a x t^j)``."""
    if x not in ("e", "f"):
        raise ValueError("x must be e or f")
    g = LoopElement.exp_nilpotent(1 if x == "e" else -1, a, j, SL2)
    lhs = scaled_sugawara_apply(n, v, conj=_conjugator(g))
    rhs = scaled_sugawara_apply(n, v) + apply_mode(correction_mode(x, a, j, n), v).scale(LEVEL_SHIFT)
    return lhs - rhs


def verify_conjugation_nilpotent(a, x: str, j: int, n: int, v: ModuleState) -> bool:
    """``Ad(exp(a x t^j)) S_n v == (S_n + t^(n+1) (dg/dt) g^(-1)) v`` exactly."""
    if j < 1:
        raise ValueError("j must be positive (pro-unipotent element)")
    return conjugation_nilpotent_residual(a, x, j, n, v).is_zero()


def verify_conjugation_coweight(lam, n: int, v: ModuleState) -> bool:
    """``Ad(t^lambda) S_n v == (S_n + lambda_n + delta_{n,0} (k/2) kappa(lambda,lambda)) v``."""
    return conjugation_coweight_residual(_pairing(lam), n, v).is_zero()


def _pairing(lam) -> int:
    from ..roots import Coweight, pairing

    value = pairing((1,), lam) if isinstance(lam, Coweight) else Fraction(lam)
    if value.denominator != 1:
        raise ValueError("alpha(lambda) must be an integer")
    return int(value)


def coweight_correction(p: int, n: int) -> ModeElement:
    """``lambda_n + delta_{n,0} (k/2) kappa(lambda,lambda)`` with ``lambda = (p/2) h``."""
    lam = ModeElement.mode("h", n, Fraction(p, 2))
    if n == 0:
        lam = lam + ModeElement.central_element(Fraction(p * p, 4))  # (1/2) * kappa = (1/2)(p^2/2)
    return lam


def conjugation_coweight_residual(p: int, n: int, v: ModuleState, via_matrices: bool = False) -> ModuleState:
    """``Ad(t^lambda) S~_n - S~_n - 2(k+2)(lambda_n + delta (k/2) kappa(lambda,lambda))`` on ``v``."""
    if via_matrices:
        g = LoopElement.t_coweight(p, PGL2 if p % 2 else SL2)
        conj = _conjugator(g)
    else:
        conj = lambda X: spectral_flow(X, p)  # noqa: E731
    lhs = scaled_sugawara_apply(n, v, conj=conj)
    rhs = scaled_sugawara_apply(n, v) + apply_mode(coweight_correction(p, n), v).scale(LEVEL_SHIFT)
    return lhs - rhs


def sweep_conjugation_nilpotent(a_values=(1, -2), xs=("e", "f"), js=(1, 2), ns=range(-2, 3), depth: int = 2, states=None) -> LemmaReport:
    t0 = time.perf_counter()
    rep = LemmaReport(f"Ad(exp(a x t^j)) S_n depth<={depth}")
    sts = _states(depth, states)
    for a in a_values:
        for x in xs:
            for j in js:
                for n in ns:
                    for v in sts:
                        r = conjugation_nilpotent_residual(a, x, j, n, v)
                        rep.checks.append(StateCheck(f"Ad(exp({a}*{x}*t^{j}))S_{n}", str(v), r))
    rep.seconds = time.perf_counter() - t0
    return rep


def sweep_conjugation_coweight(ps=(-2, -1, 1, 2), ns=range(-2, 3), depth: int = 2, states=None, via_matrices: bool = False) -> LemmaReport:
    t0 = time.perf_counter()
    rep = LemmaReport(f"Ad(t^lambda) S_n depth<={depth}")
    sts = _states(depth, states)
    for p in ps:
        for n in ns:
            for v in sts:
                r = conjugation_coweight_residual(p, n, v, via_matrices)
                rep.checks.append(StateCheck(f"Ad(t^(alpha={p}))S_{n}", str(v), r))
    rep.seconds = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# the minuscule presentation


def _bigrade_twisted(b: str, m: int) -> tuple[int, int]:
    return -m, ROOT_DEGREE[b]


def _bigrade(mono, twist: int | None) -> tuple[int, int]:
    """``(D, q)`` of a monomial: ``D = -sum of twisted modes``, ``q = #e - #f``.

    ``twist`` converts stored untwisted letters of ``V^lambda`` to twisted ones;
    ``None`` means the letters are already twisted (induced module).
    """
    D = q = 0
    for b, m in mono:
        if twist is not None:
            m = m + ROOT_DEGREE[b] * twist
        dD, dq = _bigrade_twisted(b, m)
        D += dD
        q += dq
    return D, q


def _rank(rows: list, cols: list) -> int:
    """Fraction-free (Bareiss) rank over Q(k) of row vectors given as dicts."""
    M = [[r.get(c, Polynomial.zero(TABLE)) for c in cols] for r in rows]
    M = [row for row in M if any(not x.is_zero() for x in row)]
    nrows, ncols = len(M), len(cols)
    prev = Polynomial.one(TABLE)
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if not M[i][c].is_zero()), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        P = M[r][c]
        for i in range(r + 1, nrows):
            a = M[i][c]
            for jj in range(c + 1, ncols):
                num = P * M[i][jj] - a * M[r][jj]
                q = num.divexact(prev)
                if q is None:
                    raise ArithmeticError("fraction-free elimination lost exactness")
                M[i][jj] = q
            M[i][c] = Polynomial.zero(TABLE)
        prev = P
        r += 1
        if r == nrows:
            break
    return r


@dataclass
class PresentationReport:
    """Bigraded comparison of ``V^lambda`` with the induced module modulo the singular vector."""

    twist: int
    depth: int
    relations: dict = field(default_factory=dict)  # relation name -> holds
    dims_vacuum: dict = field(default_factory=dict)  # (D, q) -> dim V^lambda
    dims_image: dict = field(default_factory=dict)  # (D, q) -> rank of psi on the window
    dims_quotient: dict = field(default_factory=dict)  # (D, q) -> dim M/N
    generator: str = "f[-1]"
    notes: list = field(default_factory=list)
    generator_singular: bool = False
    printed_generator_in_kernel: bool = True
    seconds: float = 0.0

    @property
    def mismatches(self) -> list:
        return [
            key
            for key in sorted(self.dims_vacuum)
            if not (self.dims_vacuum[key] == self.dims_image.get(key) == self.dims_quotient.get(key))
        ]

    @property
    def verified(self) -> bool:
        return all(self.relations.values()) and self.generator_singular and not self.mismatches


def _window(d: int):
    return [(D, q) for D in range(d + 1) for q in range(-d, d + 1)]


def _twisted_vacuum_dims(p: int, d: int) -> dict:
    """PBW count of ``V^lambda`` by twisted bigrade; stored letters are untwisted."""
    dims = {key: 0 for key in _window(d)}
    # untwisted energy = D + p(#e - #f) and #e <= d + #f, #f <= d, so 3d suffices for p = 1
    for mono in vacuum_basis(d + 2 * d * p):
        key = _bigrade(mono, p)
        if key in dims:
            dims[key] += 1
    return dims


def _induced_monomials(d: int, extra_q: int = 1) -> dict:
    """Monomials of the induced module grouped by bigrade (window plus one step in q)."""
    groups: dict = {}
    for mono in vacuum_basis(d):
        D, q0 = _bigrade(mono, None)
        for n in range(0, 2 * d + extra_q + 1):
            q = q0 + n
            if abs(q) <= d + extra_q:
                groups.setdefault((D, q), []).append(mono + (("e", 0),) * n)
    return groups


def _apply_word(cv, word, terms: dict) -> dict:
    for l in reversed(word):
        terms = apply_element(cv, ModeElement.mode(*l), terms)
    return terms


def verify_minuscule_presentation(lam=1, depth: int = 3) -> PresentationReport:
    """``V^lambda`` versus ``M_{-lambda*}`` modulo the submodule generated by ``f_{-1}``.

    Checks the defining relations of ``|0>^lambda`` and compares bigraded
    dimensions on the window ``D <= depth``, ``|q| <= depth`` three ways: PBW
    count of ``V^lambda``, rank of the natural map from the induced module,
    and dimension of the quotient computed by row reduction of a spanning set
    of the submodule.
    """
    twist = _pairing(lam)
    if twist != 1:
        raise ValueError(f"alpha(lambda) = {twist}: the only nonzero minuscule dominant rank-1 coweight has alpha(lambda) = 1")
    t0 = time.perf_counter()
    p = twist
    rep = PresentationReport(p, depth)
    vac = ModuleState.vacuum(p)
    mode = ModeElement.mode

    def kills(b, m):
        return apply_mode(mode(b, m), vac).is_zero()

    rep.relations["f_0 annihilates"] = kills("f", 0)
    rep.relations["h_0 acts by -alpha(lambda) k"] = apply_mode(mode("h", 0), vac) == vac.scale(K * (-p))
    rep.relations["t g[[t]] annihilates"] = all(kills(b, m) for b in LieData.basis for m in range(1, depth + 3))
    rep.relations["f_-1 annihilates"] = kills("f", -1)
    rep.printed_generator_in_kernel = kills("e", -1)
    if not rep.printed_generator_in_kernel:
        rep.notes.append("e[-1]*vac(lambda) is nonzero, so e_(theta,-1) cannot generate the kernel; f[-1] is used")
    if rep.relations["f_0 annihilates"]:
        rep.notes.append("annihilation rule m - beta(lambda) >= 0 taken from Ad(t^-lambda); f_0 kills the twisted vacuum")

    # singularity of the generator inside the induced module
    cv = induced(p)
    gen = {(("f", -1),): Polynomial.one(TABLE)}
    rep.generator_singular = all(
        not apply_element(cv, mode(b, m), gen) for b in LieData.basis for m in range(1, depth + 3)
    ) and not apply_element(cv, mode("f", 0), gen)

    groups = _induced_monomials(depth)
    rep.dims_vacuum = _twisted_vacuum_dims(p, depth)
    for key in _window(depth):
        D, q = key
        basis_M = groups.get(key, [])
        # image of psi: apply the twisted word to |0>^lambda
        images = []
        for mono in basis_M:
            st = vac
            for l in reversed(mono):
                st = apply_mode(mode(*l), st)
            images.append(st.terms)
        cols = sorted({m for im in images for m in im}, key=str)
        rep.dims_image[key] = _rank(images, cols) if cols else 0
        # submodule generated by f_{-1}: U(g_<0) C[e_0] f_{-1}|lw>
        span = [_apply_word(cv, u, gen) for u in groups.get((D - 1, q + 1), [])]
        cols_M = sorted({m for s in span for m in s}, key=str)
        rank_N = _rank(span, cols_M) if cols_M else 0
        rep.dims_quotient[key] = len(basis_M) - rank_N
    rep.seconds = time.perf_counter() - t0
    return rep
