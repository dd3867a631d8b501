"""Affine sl2 modes, vacuum modules, Sugawara operators and the conjugation identities."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heckeblocks.affine import (
    VACUUM,
    K,
    ModeElement,
    ModuleState,
    ad_loop,
    annihilates,
    apply_mode,
    bracket_modes,
    check_currents,
    check_virasoro,
    conjugation_coweight_residual,
    induced,
    spectral_flow,
    sugawara_apply,
    sweep_conjugation_coweight,
    sweep_conjugation_nilpotent,
    vacuum_basis,
    verify_conjugation_coweight,
    verify_conjugation_nilpotent,
    verify_minuscule_presentation,
)
from heckeblocks.loops import LoopElement
from heckeblocks.roots import Coweight

M = ModeElement.mode
VAC = ModuleState.vacuum()


def st_(*letters, twist=0):
    return ModuleState.monomial(list(letters), twist)


# -- strategies ----------------------------------------------------------------

modes = st.builds(M, st.sampled_from("ehf"), st.integers(-3, 3))


@st.composite
def elements(draw):
    X = draw(modes).scale(draw(st.integers(-2, 2)))
    for _ in range(draw(st.integers(0, 2))):
        X = X + draw(modes).scale(draw(st.integers(-2, 2)))
    if draw(st.booleans()):
        X = X + ModeElement.central_element(draw(st.integers(-1, 1)))
    return X


loop_gens = st.one_of(
    st.builds(lambda s, a, m: LoopElement.exp_nilpotent(s, a, m), st.sampled_from([1, -1]), st.sampled_from([1, -2]), st.integers(0, 2)),
    st.builds(LoopElement.t_coweight, st.integers(-2, 2)),
    st.just(LoopElement.weyl()),
)


# -- modes and brackets --------------------------------------------------------


def test_bracket_with_central_term():
    assert bracket_modes(M("e", 1), M("f", -1)) == M("h", 0) + ModeElement.central_element(1)
    assert bracket_modes(M("h", 2), M("h", -2)) == ModeElement.central_element(4)
    assert bracket_modes(M("h", 0), M("e", 3)) == M("e", 3).scale(2)


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), elements())
def test_jacobi(X, Y, Z):
    total = bracket_modes(X, bracket_modes(Y, Z)) + bracket_modes(Y, bracket_modes(Z, X)) + bracket_modes(Z, bracket_modes(X, Y))
    assert total.is_zero()


def test_spectral_flow_examples():
    assert spectral_flow(M("e", 3), 1) == M("e", 4)
    assert spectral_flow(M("h", 0), 1) == M("h", 0) + ModeElement.central_element(1)
    assert spectral_flow(M("f", 2), 0) == M("f", 2)
    assert spectral_flow(ModeElement.central_element(1), 2) == ModeElement.central_element(1)


@settings(max_examples=60, deadline=None)
@given(elements(), elements(), st.integers(-3, 3), st.integers(-3, 3))
def test_spectral_flow_automorphism(X, Y, p, q):
    assert spectral_flow(bracket_modes(X, Y), p) == bracket_modes(spectral_flow(X, p), spectral_flow(Y, p))
    assert spectral_flow(spectral_flow(X, p), q) == spectral_flow(X, p + q)


@pytest.mark.parametrize("p", [-2, -1, 1, 2])
def test_ad_loop_coweight_is_spectral_flow(p):
    g = LoopElement.t_coweight(p)
    for b in "ehf":
        for m in range(-2, 3):
            assert ad_loop(g, M(b, m)) == spectral_flow(M(b, m), p)


def test_ad_loop_nilpotent_example():
    got = ad_loop(LoopElement.exp_nilpotent(1, 1, 1), M("f", -1))
    assert got == M("f", -1) + M("h", 0) - M("e", 1) + ModeElement.central_element(1)
    assert str(got) == "f[-1] + h[0] - e[1] + K"


def test_ad_loop_constant_has_no_central_term():
    got = ad_loop(LoopElement.exp_nilpotent(1, 3, 0), M("f", 2))
    assert got == M("f", 2) + M("h", 2).scale(3) - M("e", 2).scale(9)
    assert ad_loop(LoopElement.weyl(), M("e", -1)) == -M("f", -1)


@settings(max_examples=40, deadline=None)
@given(loop_gens, loop_gens, elements())
def test_ad_loop_composition(g, h, X):
    assert ad_loop(g * h, X) == ad_loop(g, ad_loop(h, X))


@settings(max_examples=40, deadline=None)
@given(loop_gens, elements(), elements())
def test_ad_loop_preserves_bracket(g, X, Y):
    assert ad_loop(g, bracket_modes(X, Y)) == bracket_modes(ad_loop(g, X), ad_loop(g, Y))


# -- module action -------------------------------------------------------------


def test_apply_mode_examples():
    assert apply_mode(M("e", 0), st_(("e", -1))).is_zero()
    assert apply_mode(M("e", 1), st_(("f", -1))) == VAC.scale(K)
    twisted = ModuleState.vacuum(1)
    assert apply_mode(M("h", 0), twisted) == twisted.scale(-K)


def test_annihilates_examples():
    assert annihilates("e", 0, 0) and not annihilates("e", -1, 0)
    assert annihilates("e", 1, 1)
    assert not annihilates("e", 0, 1)
    assert annihilates("f", 0, 1)  # 0 - (-1) >= 0
    assert not annihilates("h", 0, 1)
    assert annihilates("h", 0, 0)


@pytest.mark.parametrize("twist", [-2, -1, 0, 1, 2])
def test_annihilates_matches_action(twist):
    vac = ModuleState.vacuum(twist)
    for b in "ehf":
        for m in range(-3, 4):
            assert annihilates(b, m, twist) == apply_mode(M(b, m), vac).is_zero()


def test_twisted_display():
    v = st_(("e", 0), twist=1)
    assert str(v) == "e[0]*vac(lambda=1/2*acheck)"
    assert str(ModuleState.vacuum(-2)) == "vac(lambda=-1*acheck)"


def test_induced_cyclic_vector():
    lw = ModuleState.cyclic(induced(1))
    assert apply_mode(M("h", 0), lw) == lw.scale(-K)
    assert apply_mode(M("f", 0), lw).is_zero()
    assert not apply_mode(M("e", 0), lw).is_zero()


def test_vacuum_basis_counts():
    # partitions into 3 colours: 1, 3, 9, 22, 51
    counts = [len(vacuum_basis(d)) for d in range(5)]
    assert counts == [1, 4, 13, 35, 86]


# -- Sugawara ------------------------------------------------------------------


def test_sugawara_examples():
    assert sugawara_apply(-1, VAC).is_zero()
    v = st_(("e", -1))
    assert sugawara_apply(0, v) == v
    assert sugawara_apply(2, v).is_zero()


def test_sugawara_l_minus_2():
    got = sugawara_apply(-2, VAC, level=1)
    expected = (st_(("h", -1), ("h", -1)).scale(Fraction(1, 2)) + st_(("e", -1), ("f", -1)).scale(2) - st_(("h", -2))).scale(Fraction(1, 6))
    assert got == expected


def test_sugawara_energy_on_basis():
    for mono in vacuum_basis(3):
        v = ModuleState(mono and {mono: 1} or {(): 1})
        depth = -sum(m for _, m in mono)
        assert sugawara_apply(0, v) == v.scale(depth)


def test_twisted_vacuum_energy():
    assert sugawara_apply(0, ModuleState.vacuum(1)) == ModuleState.vacuum(1).scale(K * Fraction(1, 4))


def test_critical_level_rejected():
    with pytest.raises(ValueError):
        sugawara_apply(0, VAC, level=-2)


def test_virasoro_small():
    rep = check_virasoro(range(-2, 3), depth=2)
    assert rep.verified, rep.failures()[:1]


def test_currents_small():
    rep = check_currents(depth=2)
    assert rep.verified, rep.failures()[:1]


# -- conjugation identities ----------------------------------------------------


def test_conjugation_nilpotent_examples():
    assert verify_conjugation_nilpotent(1, "e", 1, 0, VAC)
    assert verify_conjugation_nilpotent(1, "e", 1, 1, st_(("f", -1)))
    assert verify_conjugation_nilpotent(0, "e", 1, 0, VAC)
    assert verify_conjugation_nilpotent(-2, "f", 2, -1, st_(("e", -1), ("h", -1)))


def test_conjugation_nilpotent_sweep_small():
    rep = sweep_conjugation_nilpotent(depth=1)
    assert rep.verified


def test_conjugation_coweight_examples():
    assert verify_conjugation_coweight(Coweight.zero(Coweight.from_pairing(0).datum), 0, VAC)
    assert verify_conjugation_coweight(1, 0, VAC)
    assert verify_conjugation_coweight(2, -1, st_(("e", -1)))


def test_conjugation_coweight_matrix_route():
    for p in (-1, 2):
        for n in (-1, 0, 1):
            assert conjugation_coweight_residual(p, n, st_(("f", -1)), via_matrices=True).is_zero()


def test_conjugation_coweight_sweep_small():
    assert sweep_conjugation_coweight(depth=1).verified


def test_coweight_correction_values():
    from heckeblocks.affine.lemmas import coweight_correction

    for p in (-2, -1, 1, 2):
        for n in range(-2, 3):
            expected = M("h", n).scale(Fraction(p, 2))
            if n == 0:
                expected = expected + ModeElement.central_element(Fraction(p * p, 4))
            assert coweight_correction(p, n) == expected


# -- minuscule presentation ----------------------------------------------------


def test_minuscule_presentation():
    rep = verify_minuscule_presentation(1, 2)
    assert rep.verified
    assert all(rep.relations.values())
    assert rep.dims_vacuum[(0, 0)] == 1 and rep.dims_quotient[(0, 0)] == 1
    assert rep.dims_vacuum == rep.dims_image == rep.dims_quotient


def test_minuscule_rejects_non_minuscule():
    for lam in (0, 2, -1):
        with pytest.raises(ValueError):
            verify_minuscule_presentation(lam, 1)
