"""Pairs, group actions, weak modules, invariants/coinvariants."""

from fractions import Fraction

import pytest

from hce.catalog import (
    abelian_pair,
    adjoint_module,
    direct_sum,
    gl1_character,
    gl1_pair,
    named_module,
    named_pair,
    sl2_irreducible_matrices,
    sl2_module,
    sl2_pair,
    sl2_torus_pair,
    trivial_module,
    weak_shifted_sum,
    weak_tensor_module,
)
from hce.errors import (
    AntisymmetryViolation,
    JacobiViolation,
    MixedAlgebras,
    NonIntegralWeight,
    NotAlgebraic,
    NotAModule,
    NotASubalgebra,
    NotEquivariant,
    NotReductive,
    UnsupportedGroup,
)
from hce.lie import (
    HCPair,
    LieAlgebra,
    SL2,
    SL2Action,
    SparseMatrix,
    SubgroupT,
    Torus,
    TorusAction,
    TrivialAction,
    WeakHCModule,
    abelian,
    check_complement,
    check_weak_module,
    exp_nilpotent,
    hc_morphisms,
    intertwines,
    invariant_complement,
    invariants_coinvariants,
    module_from_json,
    module_to_json,
    pair_from_json,
    pair_to_json,
    sl2_algebra,
    tensor_actions,
)


# ---------------------------------------------------------------------------
# Lie algebras


def test_sl2_structure_and_validate():
    g = sl2_algebra()
    g.validate()
    assert g.bracket(1, 0) == {0: Fraction(2)}  # [h,e] = 2e
    assert g.bracket(0, 2) == {1: Fraction(1)}  # [e,f] = h
    assert g.ad(1).get(0, 0) == 2 and g.ad(1).get(2, 2) == -2
    assert not g.is_abelian()
    assert abelian(3).is_abelian()


def test_jacobi_violation_detected():
    bad = LieAlgebra(["a", "b", "c"],
                     {(0, 1): {1: 1}, (0, 2): {2: 1}, (1, 2): {0: 1}})
    with pytest.raises(JacobiViolation):
        bad.validate()


def test_antisymmetry_violations():
    with pytest.raises(AntisymmetryViolation):
        LieAlgebra(["a", "b"], {(0, 0): {1: 1}})
    with pytest.raises(AntisymmetryViolation):
        LieAlgebra(["a", "b"], {(0, 1): {0: 1}, (1, 0): {0: 1}})


def test_exp_nilpotent():
    g = sl2_algebra()
    E = exp_nilpotent(g.ad(0))
    # exp(ad e): h -> h - 2e, f -> f + h - e
    assert E.column(1) == {1: Fraction(1), 0: Fraction(-2)}
    assert E.column(2) == {2: Fraction(1), 1: Fraction(1), 0: Fraction(-1)}
    with pytest.raises(NotAlgebraic):
        exp_nilpotent(SparseMatrix.identity(2))


# ---------------------------------------------------------------------------
# group actions


def test_sl2_action_weyl_on_standard_rep():
    e, h, f = sl2_irreducible_matrices(1)
    act = SL2Action(e, h, f)
    act.check_valid()
    w = act.weyl()
    assert w == SparseMatrix.from_rows([[0, 1], [-1, 0]])


def test_sl2_action_invalid_triple():
    z = SparseMatrix.zero(2, 2)
    e, h, f = sl2_irreducible_matrices(1)
    with pytest.raises(NotAlgebraic):
        SL2Action(e, h, z).check_valid()


def test_torus_action_integrality():
    with pytest.raises(NonIntegralWeight):
        TorusAction(1, [(Fraction(1, 2),)]).check_valid()
    TorusAction(2, [(1, -3), (0, 0)]).check_valid()


def test_tensor_and_intertwines():
    e, h, f = sl2_irreducible_matrices(1)
    a = SL2Action(e, h, f)
    t = tensor_actions(a, a)
    t.check_valid()
    assert sorted(t.h.get(i, i) for i in range(4)) == [-2, 0, 0, 2]
    assert intertwines(a, a, SparseMatrix.identity(2))
    assert not intertwines(a, a, SparseMatrix.from_rows([[1, 0], [0, 0]]))


# ---------------------------------------------------------------------------
# pairs


def test_named_pairs_validate():
    for name in ("sl2", "sl2_torus", "gl1", "abelian2"):
        pair = named_pair(name)
        pair.validate()


def test_pair_psi_must_embed():
    g = sl2_algebra()
    with pytest.raises(NotASubalgebra):
        HCPair(g, Torus(1), SparseMatrix.zero(3, 1)).validate()


def test_pair_torus_needs_weight_basis():
    g = sl2_algebra()
    # ad(e) is not diagonal on the (e, h, f) basis
    with pytest.raises(NotAlgebraic):
        HCPair(g, Torus(1), SparseMatrix.from_rows([[1], [0], [0]]))


def test_pair_torus_needs_integer_weights():
    g = LieAlgebra(["x", "y"], {(0, 1): {1: Fraction(1, 2)}})
    with pytest.raises(NonIntegralWeight):
        HCPair(g, Torus(1), SparseMatrix.from_rows([[1], [0]]))


def test_pair_json_round_trip():
    for name in ("sl2", "sl2_torus", "gl1", "abelian3"):
        pair = named_pair(name)
        back = pair_from_json(pair_to_json(pair))
        assert back.psi == pair.psi
        assert back.group == pair.group
        assert back.g.names == pair.g.names
        assert back.g.table == pair.g.table


# ---------------------------------------------------------------------------
# weak modules


def test_strict_modules_pass():
    p1, p2 = sl2_pair(), sl2_torus_pair()
    for V in (sl2_module(p1, 0), sl2_module(p1, 3), sl2_module(p2, 2),
              adjoint_module(p1), adjoint_module(p2), trivial_module(p1),
              trivial_module(gl1_pair()), gl1_character(4, 4)):
        rep = check_weak_module(V)
        assert rep["strict"], V.name


def test_weak_but_valid_modules():
    for V in (gl1_character(Fraction(1, 2), 0), weak_tensor_module(2, 1),
              weak_shifted_sum([(1, 3), (0, 0)])):
        rep = check_weak_module(V)
        assert not rep["strict"], V.name


def test_broken_pi_rejected():
    V = sl2_module(sl2_pair(), 2)
    pi = [SparseMatrix.zero(3, 3), V.pi[1], V.pi[2]]
    with pytest.raises(NotAModule):
        check_weak_module(WeakHCModule(V.pair, pi, V.nu))


def test_inequivariant_nu_rejected():
    pair = sl2_torus_pair()
    e, h, f = sl2_irreducible_matrices(1)
    nu = TorusAction(1, [(5, ), (-1, )])
    with pytest.raises(NotEquivariant):
        check_weak_module(WeakHCModule(pair, [e, h, f], nu))


def test_non_integral_nu_rejected():
    pair = gl1_pair()
    nu = TorusAction(1, [(Fraction(1, 2),)])
    pi = [SparseMatrix.from_rows([["1/2"]])]
    with pytest.raises(NonIntegralWeight):
        check_weak_module(WeakHCModule(pair, pi, nu))


def test_sl2_pair_needs_sl2_nu():
    pair = sl2_pair()
    pi = [SparseMatrix.zero(1, 1)] * 3
    with pytest.raises(NotAlgebraic):
        check_weak_module(WeakHCModule(pair, pi, TorusAction(1, [(0,)])))


def test_module_json_round_trip():
    V = weak_tensor_module(1, 1)
    W = module_from_json(module_to_json(V))
    assert W.dim == V.dim
    assert all(a == b for a, b in zip(W.pi, V.pi))
    assert not W.is_strict()


# ---------------------------------------------------------------------------
# invariants and coinvariants


def test_invariants_trivial_for_nonintegral_character():
    inv, co = invariants_coinvariants(gl1_character(Fraction(1, 2), 0))
    assert inv.module.dim == 0
    assert co.module.dim == 0


def test_invariants_identity_for_strict():
    V = sl2_module(sl2_pair(), 2)
    inv, co = invariants_coinvariants(V)
    assert inv.module.dim == 3 and co.module.dim == 3


def test_invariants_pick_out_strict_summand():
    V = direct_sum(sl2_module(sl2_pair(), 1), weak_tensor_module(1, 2))
    inv, co = invariants_coinvariants(V)
    assert inv.module.dim == 2
    assert co.module.dim == 2
    assert inv.module.is_strict() and co.module.is_strict()
    # inclusion is killed by every defect operator
    for om in V.omegas():
        assert (om * inv.matrix).is_zero()
    # projection kills every defect image
    for om in V.omegas():
        assert (co.matrix * om).is_zero()


def test_invariants_shifted_sum():
    V = weak_shifted_sum([(1, 0), (2, 3)])
    inv, co = invariants_coinvariants(V)
    assert inv.module.dim == 2
    assert co.module.dim == 2


def test_adjunction_dimension_identities():
    W = sl2_module(sl2_pair(), 1)  # strict
    V = direct_sum(sl2_module(sl2_pair(), 1), weak_tensor_module(1, 2))
    inv, co = invariants_coinvariants(V)
    into = len(hc_morphisms(W, V))
    onto = len(hc_morphisms(V, W))
    assert into == len(hc_morphisms(W, inv.module)) == 1
    assert onto == len(hc_morphisms(co.module, W)) == 1


# ---------------------------------------------------------------------------
# morphisms


def test_schur_dimensions():
    p = sl2_pair()
    assert len(hc_morphisms(sl2_module(p, 1), sl2_module(p, 1))) == 1
    assert len(hc_morphisms(sl2_module(p, 1), sl2_module(p, 2))) == 0
    pt = sl2_torus_pair()
    assert len(hc_morphisms(sl2_module(pt, 2), sl2_module(pt, 2))) == 1


def test_character_morphisms():
    a = gl1_character(2, 2)
    b = gl1_character(3, 3)
    assert len(hc_morphisms(a, a)) == 1
    assert len(hc_morphisms(a, b)) == 0


def test_mixed_pairs_rejected():
    with pytest.raises(MixedAlgebras):
        hc_morphisms(gl1_character(0, 0), sl2_module(sl2_pair(), 1))


# ---------------------------------------------------------------------------
# complements and subgroups


def test_invariant_complement_sl2_torus():
    pair = sl2_torus_pair()
    comp = invariant_complement(pair.g, pair.psi, pair.phi)
    assert sorted(tuple(v) for v in comp) == [(0,), (2,)]  # spans e and f
    check_complement(pair.g, pair.psi, pair.phi, comp)


def test_complement_weight_mixing_rejected():
    pair = sl2_torus_pair()
    bad = [{0: Fraction(1), 1: Fraction(1)}, {2: Fraction(1)}]  # e+h, f
    with pytest.raises(NotEquivariant):
        check_complement(pair.g, pair.psi, pair.phi, bad)


def test_complement_requires_t_in_weight_zero():
    pair = sl2_torus_pair()
    t_bad = SparseMatrix.from_rows([[1], [0], [0]])  # the line through e
    with pytest.raises(NotReductive):
        invariant_complement(pair.g, t_bad, pair.phi)


def test_complement_full_and_trivial_cases():
    pair = sl2_pair()
    assert invariant_complement(pair.g, pair.psi, pair.phi) == []
    comp = invariant_complement(pair.g, SparseMatrix.zero(3, 0), TrivialAction(3))
    assert len(comp) == 3


def test_subgroup_restriction():
    T = SubgroupT.diagonal_torus_of_sl2()
    T.validate(SL2())
    e, h, f = sl2_irreducible_matrices(3)
    act = SL2Action(e, h, f)
    r = T.restrict(act)
    assert [w[0] for w in r.weights] == [3, 1, -1, -3]
    full = SubgroupT.full(SL2())
    assert full.restrict(act) is act
    triv = SubgroupT.trivial(SL2())
    assert isinstance(triv.restrict(act), TrivialAction)


def test_subgroup_restriction_needs_eigenbasis():
    line_through_e = SubgroupT(Torus(1), SparseMatrix.from_rows([[1], [0], [0]]))
    e, h, f = sl2_irreducible_matrices(1)
    with pytest.raises(UnsupportedGroup):
        line_through_e.restrict(SL2Action(e, h, f))


def test_character_restriction():
    T = SubgroupT(Torus(1), SparseMatrix.from_rows([[1], [2]]))
    assert T.character_restriction([3, -1]) == [1]
    half = SubgroupT(Torus(1), SparseMatrix.from_rows([["1/2"]]))
    with pytest.raises(NonIntegralWeight):
        half.character_restriction([1])


# ---------------------------------------------------------------------------
# catalog names


def test_named_modules():
    p = sl2_pair()
    assert named_module(p, "F3").dim == 4
    assert named_module(p, "trivial").dim == 1
    assert named_module(p, "adjoint").dim == 3
    g = gl1_pair()
    assert named_module(g, "C2").is_strict()
    assert not named_module(g, "C1/2").is_strict()
    with pytest.raises(KeyError):
        named_module(p, "nonsense")
    with pytest.raises(KeyError):
        named_pair("so8")
