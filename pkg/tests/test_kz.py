"""Ward and KZ operators, the Hecke transform and its transport checks."""

from fractions import Fraction

import pytest

from heckeblocks.exact import Polynomial, RationalFunction, VarTable
from heckeblocks.kz import (
    MUTATIONS,
    WeightParams,
    casimir_omega,
    casimir_properties,
    hecke_prefactor,
    hecke_transform,
    kz_op,
    kz_transport,
    omega_eigenvalue,
    rho,
    two_point_solution,
    ward_ops,
    ward_ops_extended,
    ward_transport,
)
from heckeblocks.weyl import DiffOp, TwistedFunction, diffop_apply

RF = RationalFunction
T = VarTable(("x1", "x2", "chi1", "chi2", "k"))
x1, x2, c1, c2, k = Polynomial.gens(T)


def fn(p):
    return TwistedFunction.from_rational(T, p)


def test_rho_examples():
    assert (rho("e", c1, 1, T) - DiffOp.partial(["x1"], "x1")).is_zero()
    assert (diffop_apply(rho("h", c1, 1, T), fn(1)) - fn(c1)).is_zero()
    e, h, f = (rho(g, c1, 1, T) for g in "ehf")
    assert (e.commutator(f) - h).is_zero()


def test_ward_ops_examples():
    p = WeightParams(1)
    P = p.table
    ops = ward_ops(p)
    one = TwistedFunction.from_rational(P, 1)
    assert (diffop_apply(ops["f"], one) - TwistedFunction.from_rational(P, p.chi(1) * p.var("x1") * 2)).is_zero()
    p2 = WeightParams(2, ["chi1", "chi1"])
    ops2 = ward_ops(p2)
    diff = p2.var("x1") - p2.var("x2")
    assert diffop_apply(ops2["e"], TwistedFunction.from_rational(p2.table, diff)).is_zero()
    F = TwistedFunction.power(p2.table, diff, p2.chi(1) * 2)
    assert diffop_apply(ops2["h"], F).is_zero()


def test_ward_ops_extended_examples():
    p = WeightParams(1)
    P = p.table
    ops = ward_ops_extended(p)
    diff = TwistedFunction.from_rational(P, p.var("x1") - p.var("x2"))
    assert diffop_apply(ops["e"], diff).is_zero()
    got = diffop_apply(ops["t"], diff)
    assert (got - TwistedFunction.from_rational(P, p.var("t1") - p.var("t2"))).is_zero()


def test_casimir_examples():
    assert (casimir_omega(1, 2, c1, c2, T) - casimir_omega(2, 1, c2, c1, T)).is_zero()
    assert (diffop_apply(casimir_omega(1, 2, c1, c2, T), fn(1)) - fn(c1 * c2 * 2)).is_zero()
    F = TwistedFunction.power(T, x1 - x2, c1 * 2)
    eig = omega_eigenvalue(c1, T)
    assert (diffop_apply(casimir_omega(1, 2, c1, c1, T), F) - F * fn(eig)).is_zero()
    # oracle: Omega = (C_total - C_1 - C_2) / 2; the constant 1 is killed by e with
    # h-weight 2c, so C_i = 2c^2 + 2c, and (x1 - x2)^(2c) is invariant, so C_total = 0
    assert eig == -(c1 * c1 * 2 + c1 * 2)
    with pytest.raises(ValueError):
        casimir_omega(1, 1, c1, c1, T)


def test_casimir_properties_all_zero():
    props = casimir_properties(3)
    assert len(props) == 12
    assert all(v.is_zero() for v in props.values())


def test_kz_op_single_point():
    p = WeightParams(1)
    op = kz_op(1, p)
    assert (op - DiffOp.partial(["t1"], "t1", 1, p.k + 2)).is_zero()
    with pytest.raises(ValueError):
        kz_op(2, p)


def test_kz_op_on_power():
    p = WeightParams(2, ["chi1", "chi1"])
    P = p.table
    g = Polynomial.var(P, "k")  # any exponent works for the collected form
    base = p.var("t1") - p.var("t2")
    F = TwistedFunction.power(P, base, g) * TwistedFunction.power(P, p.var("x1") - p.var("x2"), p.chi(1) * 2)
    got = diffop_apply(kz_op(1, p), F)
    eig = omega_eigenvalue(p.chi(1), P)
    expected = F * TwistedFunction.from_rational(P, RF((p.k + 2) * g - eig, base))
    assert (got - expected).is_zero()


def test_hecke_transform_shape():
    p = WeightParams(1)
    Y = hecke_transform(p)
    keys = {fk for fk in Y.factor_keys()}
    assert len(keys) == 1
    pre = hecke_prefactor(p)
    assert (Y - pre * TwistedFunction.jet(p.table, Y.record)).is_zero()
    trivial = hecke_transform(WeightParams(1, [0]))
    assert trivial.factor_keys() == {()}


def test_hecke_transform_derivative():
    p = WeightParams(1)
    Y = hecke_transform(p)
    pre = hecke_prefactor(p)
    V = p.var
    d = V("x1") - V("x2")
    expected = pre * TwistedFunction.from_rational(p.table, RF(p.chi(1) * 2, d)) * TwistedFunction.jet(p.table, Y.record)
    expected = expected + pre * TwistedFunction.jet(p.table, Y.record, (1, 0), RF(V("t1") - V("t2"), d * d))
    assert (Y.diff("x1") - expected).is_zero()


@pytest.mark.parametrize("N", [1, 2])
def test_ward_transport_symbolic(N):
    rep = ward_transport(WeightParams(N))
    assert rep.verified
    assert [r.identity for r in rep.results] == ["ward-e", "ward-h", "ward-t"]
    assert all(r.prolongation_order == 1 for r in rep.results)


@pytest.mark.parametrize(
    "mutation,caught",
    [("xi-sign", {"ward-t"}), ("exponent-shift", {"ward-h", "ward-t"}), ("chi-extra", {"ward-h"})],
)
def test_ward_transport_mutations(mutation, caught):
    rep = ward_transport(WeightParams(2, ["chi1", "chi1"]), mutation)
    assert {r.identity for r in rep.results if not r.zero} == caught


@pytest.mark.parametrize("mutation", ["xi-sign", "exponent-shift", "chi-extra"])
def test_ward_transport_mutations_three_points(mutation):
    assert not ward_transport(WeightParams(3), mutation).verified


def test_mutation_vacuous_for_distinct_weights():
    """With N <= 2 distinct weights the Ward relations force Psi = 0, so nothing can fail."""
    assert ward_transport(WeightParams(1), "exponent-shift").verified


def test_unknown_mutation():
    with pytest.raises(ValueError):
        hecke_transform(WeightParams(1), "bogus")
    assert "xi-sign" in MUTATIONS


@pytest.mark.parametrize("N,i", [(1, 1), (2, 1), (2, 2)])
def test_kz_transport_symbolic(N, i):
    assert kz_transport(WeightParams(N), i).verified


def test_kz_transport_mutation_detected():
    assert not kz_transport(WeightParams(2, ["chi1", "chi1"]), 1, "chi-extra").verified


def test_kz_transport_index_range():
    with pytest.raises(ValueError):
        kz_transport(WeightParams(1), 2)


def test_critical_level_excluded():
    with pytest.raises(ValueError):
        WeightParams(1, k=-2)
    with pytest.raises(ValueError):
        two_point_solution(1, -2)


@pytest.mark.parametrize("chi", [Fraction(1, 2), 1, Fraction(3, 2)])
@pytest.mark.parametrize("level", [1, 2, Fraction(-1, 2)])
def test_two_point_solution(chi, level):
    chk = two_point_solution(chi, level)
    assert chk.verified
    assert set(chk.transported) == {"ward-e", "ward-h", "ward-t", "kz-1", "kz-2"}


def test_two_point_symbolic_weight():
    assert two_point_solution(None, 1).verified


def test_two_point_negative_control():
    """A wrong exponent in t1 - t2 breaks the KZ equations."""
    chk = two_point_solution(1, 1)
    p = WeightParams(2, [1, 1], 1)
    bad = chk.psi * TwistedFunction.power(p.table, p.var("t1") - p.var("t2"), 1)
    res = diffop_apply(kz_op(1, p, 2, prefix="xi"), bad)
    assert not res.is_zero()
