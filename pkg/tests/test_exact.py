"""Exact polynomial, rational-function and Laurent-matrix arithmetic."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckeblocks.exact import (
    PGL2,
    SL2,
    FlavorMismatch,
    LaurentPolynomial,
    Polynomial,
    ProjectiveLaurentMatrix,
    RationalFunction,
    VarTable,
    VarTableMismatch,
    laurent_mat_mul,
    poly_arith,
    ratfunc_eq,
    regularity,
    ring,
)

T, (X, Y, Z) = ring("x", "y", "z")
RF = RationalFunction
ONE = Polynomial.one(T)


def lp(c, e):
    return LaurentPolynomial.monomial(c, e)


def mat(rows, flavor=PGL2):
    return ProjectiveLaurentMatrix(rows, flavor)


# -- strategies --------------------------------------------------------------

small = st.fractions(min_value=-3, max_value=3, max_denominator=3)


@st.composite
def polys(draw, max_terms=3):
    p = Polynomial.zero(T)
    for _ in range(draw(st.integers(0, max_terms))):
        mono = Polynomial.const(T, draw(small))
        for v in (X, Y, Z):
            for _ in range(draw(st.integers(0, 2))):
                mono = mono * v
        p = p + mono
    return p


@st.composite
def nonzero_polys(draw):
    p = draw(polys())
    return p if not p.is_zero() else ONE + X


@st.composite
def laurents(draw):
    out = LaurentPolynomial.zero()
    for _ in range(draw(st.integers(0, 2))):
        out = out + lp(draw(st.integers(-2, 2)), draw(st.integers(-2, 2)))
    return out


@st.composite
def unit_matrices(draw):
    """Products of elementary unipotents and diagonal units: always invertible."""
    M = ProjectiveLaurentMatrix.identity(PGL2)
    for _ in range(draw(st.integers(1, 3))):
        kind = draw(st.sampled_from(["upper", "lower", "diag"]))
        if kind == "diag":
            c = draw(st.sampled_from([1, -1, 2, Fraction(1, 3)]))
            G = mat([[lp(c, draw(st.integers(-2, 2))), 0], [0, 1]])
        else:
            u = draw(laurents())
            G = mat([[1, u], [0, 1]]) if kind == "upper" else mat([[1, 0], [u, 1]])
        M = laurent_mat_mul(M, G)
    return M


# -- polynomials ---------------------------------------------------------------


def test_poly_examples():
    assert poly_arith("mul", X + 1, X - 1) == X * X - 1
    assert poly_arith("add", X, Polynomial.zero(T)) == X
    x1x2, (x1, x2) = ring("x1", "x2")
    assert str((x1 - x2) * (x1 - x2)) == "x1^2 - 2*x1*x2 + x2^2"


def test_canonical_text():
    p = (X * X * Z).scale(3) - Polynomial.const(T, Fraction(1, 2))
    assert str(p) == "3*x^2*z - 1/2"
    assert str(Polynomial.zero(T)) == "0"


def test_table_embedding_and_mismatch():
    small_t = VarTable(("x",))
    px = Polynomial.var(small_t, "x")
    assert px + Y == X + Y  # x-table embeds into (x, y, z)
    other = Polynomial.var(VarTable(("w",)), "w")
    with pytest.raises(VarTableMismatch):
        poly_arith("add", other, Y)


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert (p + q) + r == p + (q + r)
    assert p * (q + r) == p * q + p * r
    assert p * q == q * p
    assert (p - p).is_zero()


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_serialization_is_bit_exact(p, q):
    assert (str(p + q) == str(q + p))
    if p == q:
        assert str(p) == str(q)


# -- rational functions --------------------------------------------------------


def test_ratfunc_examples():
    assert ratfunc_eq(RF(X * X - 1, X - 1), RF(X + 1, ONE))
    t, (t1, t2) = ring("t1", "t2")
    assert ratfunc_eq(RF(Polynomial.one(t), t1 - t2), RF(Polynomial.const(t, -1), t2 - t1))
    assert not ratfunc_eq(RF.var(T, "x"), RF.var(T, "y"))


def test_zero_denominator_rejected():
    with pytest.raises((ValueError, ZeroDivisionError)):
        RF(X, Polynomial.zero(T))


@settings(max_examples=40, deadline=None)
@given(polys(), nonzero_polys(), nonzero_polys(), nonzero_polys())
def test_ratfunc_eq_equivalence(n, d, c1, c2):
    a = RF(n, d)
    b = RF(n * c1, d * c1)
    c = RF(n * c1 * c2, d * c1 * c2)
    assert ratfunc_eq(a, a)
    assert ratfunc_eq(a, b) and ratfunc_eq(b, a)
    assert ratfunc_eq(a, c) and ratfunc_eq(b, c)


@settings(max_examples=40, deadline=None)
@given(polys(), nonzero_polys(), polys(), nonzero_polys())
def test_ratfunc_field_ops(n1, d1, n2, d2):
    a, b = RF(n1, d1), RF(n2, d2)
    assert ratfunc_eq((a + b) - b, a)
    assert ratfunc_eq(a * b, RF(n1 * n2, d1 * d2))
    if not n2.is_zero():
        assert ratfunc_eq((a * b) * b.inverse(), a)


# -- Laurent matrices ----------------------------------------------------------


def test_identity_product():
    M = mat([[lp(1, 1), 2], [0, lp(1, -1)]])
    assert laurent_mat_mul(M, ProjectiveLaurentMatrix.identity(PGL2)) == M


def test_unipotent_product():
    A = mat([[1, 1], [0, 1]])
    B = mat([[1, 0], [lp(1, 1), 1]])
    expected = mat([[lp(1, 1) + 1, 1], [lp(1, 1), 1]])
    assert laurent_mat_mul(A, B) == expected
    assert str(laurent_mat_mul(A, B)) == str(expected)


def test_weyl_square():
    w = mat([[0, 1], [-1, 0]], PGL2)
    assert laurent_mat_mul(w, w) == ProjectiveLaurentMatrix.identity(PGL2)
    ws = mat([[0, 1], [-1, 0]], SL2)
    minus = mat([[-1, 0], [0, -1]], SL2)
    assert laurent_mat_mul(ws, ws) == minus
    assert laurent_mat_mul(ws, ws) != ProjectiveLaurentMatrix.identity(SL2)


def test_flavor_mismatch_and_bad_det():
    with pytest.raises(FlavorMismatch):
        laurent_mat_mul(ProjectiveLaurentMatrix.identity(PGL2), ProjectiveLaurentMatrix.identity(SL2))
    with pytest.raises(ValueError):
        mat([[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        mat([[lp(1, 1), 0], [0, 1]], SL2)


def test_regularity_examples():
    assert regularity(mat([[1, 0], [lp(1, 1), 1]]), "zero")
    upper = mat([[1, lp(1, -1)], [0, 1]])
    assert regularity(upper, "infinity")
    assert not regularity(upper, "zero")


def test_regularity_uses_rescaling_only_for_pgl2():
    # diag(t^-1, t^-2) stays singular or polar at 0 under every rescaling
    D = mat([[lp(1, -1), 0], [0, lp(1, -2)]], PGL2)
    assert regularity(D, "zero") is False  # det t^-3 has odd degree: no rescaling is a unit at 0
    E = mat([[lp(1, -1), 0], [0, lp(1, -1)]], PGL2)
    assert regularity(E, "zero")  # a scalar multiple of the identity
    S = mat([[lp(1, -1), 0], [0, lp(1, 1)]], SL2)
    assert not regularity(S, "zero")
    assert not regularity(S, "infinity")


@settings(max_examples=30, deadline=None)
@given(unit_matrices(), unit_matrices(), unit_matrices())
def test_matrix_associativity_and_det(A, B, C):
    assert laurent_mat_mul(laurent_mat_mul(A, B), C) == laurent_mat_mul(A, laurent_mat_mul(B, C))
    assert laurent_mat_mul(A, B).det() == A.det() * B.det()


@settings(max_examples=30, deadline=None)
@given(unit_matrices(), unit_matrices(), st.sampled_from([1, -2, Fraction(1, 5)]), st.integers(-3, 3),
       st.sampled_from([1, 3]), st.integers(-3, 3))
def test_pgl2_equality_rescale_invariant(A, B, c1, m1, c2, m2):
    assert (A == B) == (A.rescale(c1, m1) == B.rescale(c2, m2))
    assert A == A.rescale(c1, m1)
