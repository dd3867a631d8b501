"""Ward and KZ systems for sl2 blocks on P^1 and their Hecke transport.

Point ``i`` carries the contragredient Verma realization in the variable
``x_i`` with weight ``2*chi_i``::

    e = D,   h = -2*x*D + 2*chi,   f = -x^2*D + 2*chi*x

The Hecke transform adds a point ``N+1`` of weight ``k`` (so ``chi_{N+1} = k/2``)
and sets

    Y = prod_i (x_i - x_{N+1})^(2 chi_i) (t_i - t_{N+1})^(-chi_i) * Psi(xi; t),
    xi_i = -(t_i - t_{N+1}) / (x_i - x_{N+1}).

:func:`ward_transport` and :func:`kz_transport` check that ``Y`` satisfies the
(N+1)-point system by reducing the residuals modulo the N-point relations
written in the formal arguments ``xi_i, t_i`` of ``Psi``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .exact import Polynomial, RationalFunction, VarTable
from .weyl import (
    DiffOp,
    JetCapExceeded,
    JetRecord,
    RelationSet,
    TwistedFunction,
    diffop_apply,
    instantiate,
    prolong,
    reduce_modulo,
)

RF = RationalFunction

MUTATIONS = ("xi-sign", "exponent-shift", "x-exponent-sign", "t-exponent-sign", "chi-extra")


def _weight_value(v):
    """``None`` for a fresh symbol, a variable name to share a symbol, else a rational."""
    if v is None or (isinstance(v, str) and v.startswith("chi")):
        return v
    return Fraction(v)


class WeightParams:
    """N points with weights ``chi_1..chi_N`` and level ``k``.

    Weights and level are symbolic variables unless given as rationals; a
    weight given as ``"chi1"`` shares that symbol (equal weights).  One
    variable table holds everything a transport case needs.
    """

    def __init__(self, N: int, chis: Sequence | None = None, k=None):
        if N < 1:
            raise ValueError("need at least one point")
        self.N = N
        names = (
            [f"x{i}" for i in range(1, N + 2)]
            + [f"t{i}" for i in range(1, N + 2)]
            + [f"xi{i}" for i in range(1, N + 1)]
            + [f"chi{i}" for i in range(1, N + 1)]
            + ["k"]
        )
        self.table = VarTable(names)
        T = self.table
        chis = list(chis) if chis is not None else [None] * N
        if len(chis) != N:
            raise ValueError(f"expected {N} weights, got {len(chis)}")
        self.chi_values = [_weight_value(c) for c in chis]
        self.k_value = None if k is None else Fraction(k)
        if self.k_value == -2:
            raise ValueError("critical level k = -2 is excluded")
        self.chis = []
        for i, c in enumerate(self.chi_values):
            if c is None:
                self.chis.append(Polynomial.var(T, f"chi{i + 1}"))
            elif isinstance(c, str):
                self.chis.append(Polynomial.var(T, c))
            else:
                self.chis.append(Polynomial.const(T, c))
        self.k = Polynomial.var(T, "k") if self.k_value is None else Polynomial.const(T, self.k_value)

    def var(self, name: str) -> Polynomial:
        return Polynomial.var(self.table, name)

    def chi(self, i: int, extra_shift=0) -> Polynomial:
        """Weight parameter of point ``i``; point ``N+1`` has ``k/2``."""
        if i == self.N + 1:
            return self.k.scale(Fraction(1, 2)) + extra_shift
        return self.chis[i - 1]

    def describe(self) -> str:
        chis = ",".join(f"chi{i + 1}" if c is None else str(c) for i, c in enumerate(self.chi_values))
        kk = "sym" if self.k_value is None else str(self.k_value)
        return f"N={self.N} chi=[{chis}] k={kk}"

    def formal_record(self, caps=None) -> JetRecord:
        args = [f"xi{i}" for i in range(1, self.N + 1)] + [f"t{i}" for i in range(1, self.N + 1)]
        kinds = ["x"] * self.N + ["t"] * self.N
        return JetRecord.identity(self.table, args, kinds, caps)

    def xi_values(self, flip_first: bool = False) -> dict:
        n1 = self.N + 1
        out = {}
        for i in range(1, self.N + 1):
            sign = -1 if flip_first and i == 1 else 1
            num = (self.var(f"t{i}") - self.var(f"t{n1}")).scale(-sign)
            out[f"xi{i}"] = RF(num, self.var(f"x{i}") - self.var(f"x{n1}"))
        return out


# ---------------------------------------------------------------------------
# operators


def rho(gen: str, chi, i: int, table: VarTable, prefix: str = "x") -> DiffOp:
    """First-order operator of ``gen`` at point ``i`` with weight parameter ``chi``.

    ``chi`` enters literally: ``rho("h", c, i)`` is ``-2*x_i*D + c``.
    """
    name = f"{prefix}{i}"
    y = Polynomial.var(table, name)
    if not isinstance(chi, Polynomial):
        chi = Polynomial.const(table, chi)
    if gen == "e":
        return DiffOp([name], {(1,): 1})
    if gen == "h":
        return DiffOp([name], {(1,): y.scale(-2), (0,): chi})
    if gen == "f":
        return DiffOp([name], {(1,): -(y * y), (0,): chi * y})
    raise ValueError(f"unknown sl2 generator {gen!r}")


def _sum(ops):
    acc = None
    for op in ops:
        acc = op if acc is None else acc + op
    return acc


def ward_ops(params: WeightParams, prefix: str = "x") -> dict:
    """The N-point global invariance operators (weight ``2*chi_i`` at point ``i``)."""
    T = params.table
    pts = range(1, params.N + 1)
    return {
        g: _sum(rho(g, params.chi(i) * 2, i, T, prefix) for i in pts) for g in ("e", "h", "f")
    }


def ward_ops_extended(params: WeightParams, chi_shift=0) -> dict:
    """The (N+1)-point operators for the transformed block.

    ``e``: sum of D_{x_i};  ``h``: sum of (-2 x_i D + 2 chi_i) minus k;
    ``t``: sum of t_i D_{x_i}.  The extra point has weight ``chi_{N+1} = k/2``.
    """
    T = params.table
    n1 = params.N + 1
    pts = range(1, n1 + 1)
    e = _sum(rho("e", 0, i, T) for i in pts)
    h = _sum(
        rho("h", params.chi(i, chi_shift if i == n1 else 0) * 2, i, T) for i in pts
    ) - DiffOp.mult([f"x{n1}"], params.k)
    t = _sum(DiffOp.partial([f"x{i}"], f"x{i}", 1, Polynomial.var(T, f"t{i}")) for i in pts)
    return {"e": e, "h": h, "t": t}


def casimir_omega(i: int, j: int, chi_i, chi_j, table: VarTable, prefix: str = "x") -> DiffOp:
    """``e_i f_j + f_i e_j + 1/2 h_i h_j`` with weights ``2*chi_i``, ``2*chi_j``."""
    if i == j:
        raise ValueError("Omega_ij needs two distinct points")
    if not isinstance(chi_i, Polynomial):
        chi_i = Polynomial.const(table, chi_i)
    if not isinstance(chi_j, Polynomial):
        chi_j = Polynomial.const(table, chi_j)
    a = {g: rho(g, chi_i * 2, i, table, prefix) for g in "ehf"}
    b = {g: rho(g, chi_j * 2, j, table, prefix) for g in "ehf"}
    return a["e"] @ b["f"] + a["f"] @ b["e"] + (a["h"] @ b["h"]).scale(Fraction(1, 2))


def kz_op(i: int, params: WeightParams, npoints: int | None = None, prefix: str = "x", chi_shift=0) -> DiffOp:
    """``(k+2) D_{t_i} - sum_{j != i} Omega_ij / (t_i - t_j)`` over ``npoints`` points."""
    T = params.table
    n = params.N if npoints is None else npoints
    if not 1 <= i <= n:
        raise ValueError(f"point index {i} out of range 1..{n}")
    ti = Polynomial.var(T, f"t{i}")
    op = DiffOp.partial([f"t{i}"], f"t{i}", 1, params.k + 2)
    for j in range(1, n + 1):
        if j == i:
            continue
        shift = chi_shift if j == params.N + 1 else 0
        om = casimir_omega(i, j, params.chi(i), params.chi(j, shift), T, prefix)
        op = op - om.scale(RF(Polynomial.const(T, 1), ti - Polynomial.var(T, f"t{j}")))
    return op


# ---------------------------------------------------------------------------
# Hecke transform and relation sets


def hecke_prefactor(params: WeightParams, mutation: str | None = None) -> TwistedFunction:
    T = params.table
    n1 = params.N + 1
    out = TwistedFunction.from_rational(T, 1)
    for i in range(1, params.N + 1):
        ex = params.chi(i) * 2
        et = -params.chi(i)
        if i == 1 and mutation == "exponent-shift":
            ex = ex + 1
        if i == 1 and mutation == "x-exponent-sign":
            ex = -ex
        if i == 1 and mutation == "t-exponent-sign":
            et = -et
        out = out * TwistedFunction.power(T, params.var(f"x{i}") - params.var(f"x{n1}"), ex)
        out = out * TwistedFunction.power(T, params.var(f"t{i}") - params.var(f"t{n1}"), et)
    return out


def hecke_transform(params: WeightParams, mutation: str | None = None, caps=None) -> TwistedFunction:
    """The block ``Y`` built from the formal N-point function ``Psi``."""
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}")
    rec = params.formal_record(caps).with_values(params.xi_values(mutation == "xi-sign"))
    psi = TwistedFunction.jet(params.table, rec)
    return hecke_prefactor(params, mutation) * psi


def formal_psi(params: WeightParams, caps=None) -> TwistedFunction:
    return TwistedFunction.jet(params.table, params.formal_record(caps))


def ward_relations(params: WeightParams, caps=None) -> RelationSet:
    psi = formal_psi(params, caps)
    ops = ward_ops(params, prefix="xi")
    return RelationSet([diffop_apply(ops[g], psi) for g in ("e", "h", "f")])


def kz_relations(params: WeightParams, caps=None) -> RelationSet:
    psi = formal_psi(params, caps)
    return RelationSet([diffop_apply(kz_op(i, params, params.N, prefix="xi"), psi) for i in range(1, params.N + 1)])


def formal_coordinates(params: WeightParams, flip_first: bool = False) -> dict:
    """Inverse of the xi substitution: ``x_a = x_{N+1} - (t_a - t_{N+1})/xi_a``.

    With ``flip_first`` the first point uses the opposite sign, matching the
    ``xi-sign`` mutation.
    """
    n1 = params.N + 1
    xn = RF(params.var(f"x{n1}"))
    out = {}
    for a in range(1, params.N + 1):
        sign = -1 if flip_first and a == 1 else 1
        num = (params.var(f"t{a}") - params.var(f"t{n1}")).scale(-sign)
        out[f"x{a}"] = xn + RF(num, params.var(f"xi{a}"))
    return out


def to_formal(F: TwistedFunction, params: WeightParams, mutation: str | None = None) -> TwistedFunction:
    """Rewrite ``F`` in the coordinates ``(xi, t, x_{N+1})``.

    The change of variables is invertible, so ``F`` vanishes iff its pullback
    does; after it the jet record of ``Y`` is the identity record and ``F``
    can be reduced directly against the formal N-point relations.
    """
    return F.substitute(formal_coordinates(params, mutation == "xi-sign"))


# ---------------------------------------------------------------------------
# reports


@dataclass
class IdentityResult:
    identity: str
    residual: TwistedFunction
    relations_used: int
    prolongation_order: int

    @property
    def zero(self) -> bool:
        return self.residual.is_zero()

    @property
    def status(self) -> str:
        return "verified" if self.zero else "failed"


@dataclass
class TransportReport:
    case: str
    results: list = field(default_factory=list)
    seconds: float = 0.0
    notes: list = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return all(r.zero for r in self.results)


def ward_residuals(params: WeightParams, mutation: str | None = None) -> dict:
    Y = hecke_transform(params, mutation)
    shift = 1 if mutation == "chi-extra" else 0
    ops = ward_ops_extended(params, chi_shift=shift)
    return {g: diffop_apply(op, Y) for g, op in ops.items()}


def kz_residual(params: WeightParams, i: int, mutation: str | None = None, caps=None) -> TwistedFunction:
    Y = hecke_transform(params, mutation, caps)
    shift = 1 if mutation == "chi-extra" else 0
    return diffop_apply(kz_op(i, params, params.N + 1, chi_shift=shift), Y)


def ward_transport(params: WeightParams, mutation: str | None = None, order: int = 1) -> TransportReport:
    start = time.perf_counter()
    R = prolong(ward_relations(params), order)
    report = TransportReport(f"ward-transport {params.describe()}" + (f" mutation={mutation}" if mutation else ""))
    for g, res in ward_residuals(params, mutation).items():
        red = reduce_modulo(to_formal(res, params, mutation), R)
        report.results.append(IdentityResult(f"ward-{g}", red, len(R), R.prolongation_order))
    report.seconds = time.perf_counter() - start
    return report


def kz_relation_set(params: WeightParams, rounds: int = 0) -> RelationSet:
    """Ward relations prolonged to the jet cap plus the KZ relations.

    Each extra round raises the x-cap by one and prolongs the whole set once more.
    """
    caps = {"x": 2 + rounds, "t": 1}
    R = prolong(ward_relations(params, caps), 1) + kz_relations(params, caps)
    if rounds:
        R = prolong(R, rounds)
    return R


def kz_transport(params: WeightParams, i: int, mutation: str | None = None, max_rounds: int = 1) -> TransportReport:
    if not 1 <= i <= params.N:
        raise ValueError(f"KZ transport needs 1 <= i <= N, got i={i}")
    start = time.perf_counter()
    report = TransportReport(
        f"kz-transport {params.describe()} i={i}" + (f" mutation={mutation}" if mutation else "")
    )
    formal = to_formal(kz_residual(params, i, mutation), params, mutation)
    red = None
    for rounds in range(max_rounds + 1):
        try:
            R = kz_relation_set(params, rounds)
        except JetCapExceeded as exc:  # pragma: no cover - caps are raised with rounds
            report.notes.append(str(exc))
            break
        red = reduce_modulo(formal.with_record(R.record), R)
        used, order = len(R), R.prolongation_order
        if red.is_zero():
            break
        if rounds < max_rounds:
            report.notes.append(f"nonzero after {rounds} extra prolongation rounds; retrying")
    report.results.append(IdentityResult(f"kz-{i}", red, used, order))
    report.seconds = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# explicit two-point solution


def omega_eigenvalue(chi: Polynomial, table: VarTable) -> Polynomial:
    """Eigenvalue of Omega_12 on ``(x1 - x2)^(2 chi)``, read off by direct application."""
    F = TwistedFunction.power(table, Polynomial.var(table, "x1") - Polynomial.var(table, "x2"), chi * 2)
    G = diffop_apply(casimir_omega(1, 2, chi, chi, table), F)
    if len(G.terms) != 1 or set(G.factor_keys()) != set(F.factor_keys()):
        raise ArithmeticError("Omega_12 did not act diagonally on (x1 - x2)^(2 chi)")
    coeff = (next(iter(G.terms.values())) / next(iter(F.terms.values()))).cancel()
    if not coeff.is_polynomial():
        raise ArithmeticError("eigenvalue is not polynomial in chi")
    return coeff.num


@dataclass
class TwoPointCheck:
    chi: Fraction | None
    k: Fraction
    psi: TwistedFunction
    two_point: dict
    transported: dict

    @property
    def verified(self) -> bool:
        return all(v.is_zero() for v in self.two_point.values()) and all(
            v.is_zero() for v in self.transported.values()
        )


def two_point_solution(chi, k) -> TwoPointCheck:
    """Explicit equal-weight two-point block and its concrete Hecke transport.

    ``Psi2 = (xi1 - xi2)^(2 chi) (t1 - t2)^(c / (k + 2))`` where ``c`` is the
    Omega eigenvalue.  Checks the two-point Ward and KZ equations, then plugs
    ``Psi2`` into the transported three-point residuals and evaluates them.
    """
    k = Fraction(k)
    if k == -2:
        raise ValueError("critical level k = -2 is excluded")
    chi_v = None if chi is None else Fraction(chi)
    params = WeightParams(2, [chi_v, "chi1" if chi_v is None else chi_v], k)
    T = params.table
    c = params.chi(1)
    eig = omega_eigenvalue(c, T)
    gamma = eig.scale(Fraction(1) / (k + 2))
    xi1, xi2, t1, t2 = (params.var(n) for n in ("xi1", "xi2", "t1", "t2"))
    psi = TwistedFunction.power(T, xi1 - xi2, c * 2) * TwistedFunction.power(T, t1 - t2, gamma)

    two_point = {}
    for g, op in ward_ops(params, prefix="xi").items():
        two_point[f"ward-{g}"] = diffop_apply(op, psi)
    for i in (1, 2):
        two_point[f"kz-{i}"] = diffop_apply(kz_op(i, params, 2, prefix="xi"), psi)

    transported = {}
    for g, res in ward_residuals(params).items():
        transported[f"ward-{g}"] = instantiate(res, psi)
    for i in (1, 2):
        transported[f"kz-{i}"] = instantiate(kz_residual(params, i), psi)
    return TwoPointCheck(chi_v, k, psi, two_point, transported)


def casimir_properties(npoints: int = 3) -> dict:
    """Symmetry and sl2-invariance residuals of every ``Omega_ij`` with symbolic weights.

    Keys are ``"Omega_ij - Omega_ji"`` and ``"[Omega_ij, g_i + g_j]"``; all values
    are DiffOps that must vanish.
    """
    names = [f"x{i}" for i in range(1, npoints + 1)] + [f"chi{i}" for i in range(1, npoints + 1)]
    T = VarTable(names)
    chi = {i: Polynomial.var(T, f"chi{i}") for i in range(1, npoints + 1)}
    out = {}
    for i in range(1, npoints + 1):
        for j in range(i + 1, npoints + 1):
            om = casimir_omega(i, j, chi[i], chi[j], T)
            out[f"Omega_{i}{j} - Omega_{j}{i}"] = om - casimir_omega(j, i, chi[j], chi[i], T)
            for g in "ehf":
                diag = rho(g, chi[i] * 2, i, T) + rho(g, chi[j] * 2, j, T)
                out[f"[Omega_{i}{j}, {g}_{i} + {g}_{j}]"] = om.commutator(diag)
    return out
