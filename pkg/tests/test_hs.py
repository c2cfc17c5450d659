"""Filtration of the standard window by complement wedge letters, its
graded pieces and splittings, the collapsed relative complex, and the
projectivity evidence suite."""

from fractions import Fraction
from random import Random

import pytest

from hce.catalog import sl2_pair
from hce.errors import (
    MismatchReport,
    NotASubalgebra,
    NotEquivariant,
    NotReductive,
    TruncationOverflow,
)
from hce.hs import (
    cone_presentation,
    graded_piece_map,
    graded_splitting,
    hs_filtration,
    kprojectivity_evidence,
    relative_standard_complex,
    semisplit_from_filtration,
)
from hce.lie import SL2Action, SubgroupT, TorusAction, TrivialAction, abelian
from hce.linalg import ONE, SparseMatrix
from hce.samples import (
    random_automorphism,
    sl2_acyclic_module,
    sl2_block,
    sl2_strict_module,
    twisted_acyclic_block,
)
from hce.tri import SemisplitSES, cone, semisplit_to_cone


def sl2_with_torus():
    k = sl2_pair().g
    t_embed = SparseMatrix.from_rows([[0], [1], [0]])
    t_action = TorusAction(1, [(2,), (0,), (-2,)])
    return k, t_embed, t_action


# ---------------------------------------------------------------------------
# the filtration


def test_filtration_sl2_torus_levels():
    k, t_embed, t_action = sl2_with_torus()
    F = hs_filtration(k, t_embed, t_action, 4)
    assert all(F.report["checks"].values())
    # wedge parts: level 1 at size two is spanned by the two mixed
    # wedges, level 0 at size one by the subalgebra letter alone
    assert F.report["lambda_dims"][1][2] == 2
    assert F.report["lambda_dims"][0][1] == 1
    assert F.report["lambda_dims"][3] == {0: 1, 1: 3, 2: 3, 3: 1}


def test_filtration_trivial_subgroup_is_wedge_degree():
    k, _, _ = sl2_with_torus()
    z = SparseMatrix.zero(3, 0)
    F = hs_filtration(k, z, TrivialAction(3), 3)
    assert all(F.report["checks"].values())
    for p in range(0, 4):
        assert set(F.report["dims"][p]) == {-w for w in range(p + 1)}
        for w in range(p + 1):
            assert F.level_module(p).dim(-w) == F.module.dim(-w)
    s = graded_splitting(F, 2)
    assert all(M == SparseMatrix.identity(M.cols) for M in s.values())


def test_filtration_full_sl2_subgroup():
    k, _, _ = sl2_with_torus()
    act = SL2Action(k.ad(0), k.ad(1), k.ad(2))
    F = hs_filtration(k, SparseMatrix.identity(3), act, 3)
    assert all(F.report["checks"].values())
    piece = graded_piece_map(F, 0)
    assert piece.report["dims"] == {q: F.module.dim(q)
                                    for q in F.module.degrees()}
    assert graded_piece_map(F, 1).report["dims"] == {}


def test_filtration_rejects_bad_subalgebras():
    k, t_embed, _ = sl2_with_torus()
    # not closed under brackets: span(e, f) against a rank 2 torus
    ef = SparseMatrix.from_rows([[1, 0], [0, 0], [0, 1]])
    with pytest.raises(NotASubalgebra):
        hs_filtration(k, ef, TorusAction(2, [(0, 0)] * 3), 3)
    # embedding shape disagrees with the group rank
    with pytest.raises(NotASubalgebra):
        hs_filtration(k, t_embed, TorusAction(2, [(0, 0)] * 3), 3)
    # closed subalgebra, but the declared weights are not ad of it
    with pytest.raises(NotEquivariant):
        hs_filtration(k, t_embed, TorusAction(1, [(1,), (0,), (-1,)]), 3)


# ---------------------------------------------------------------------------
# graded pieces


def test_graded_pieces_sl2_torus():
    k, t_embed, t_action = sl2_with_torus()
    F = hs_filtration(k, t_embed, t_action, 4)
    piece = graded_piece_map(F, 1)
    assert all(piece.report["checks"].values())
    assert piece.report["lambda_dims"] == {-1: 2, -2: 2}
    # top level against a proper subalgebra carries nothing
    assert graded_piece_map(F, 3).report["dims"] == {}
    # every level is covered and the dimensions add up to the window
    total = {}
    for p in range(0, 4):
        for q, n in graded_piece_map(F, p).report["dims"].items():
            total[q] = total.get(q, 0) + n
    assert total == {q: F.module.dim(q) for q in F.module.degrees()}


def test_graded_splitting_complements():
    k, t_embed, t_action = sl2_with_torus()
    F = hs_filtration(k, t_embed, t_action, 3)
    # scaled weight vectors still present the same classes
    comp = [{0: Fraction(3)}, {2: Fraction(-5)}]
    s = graded_splitting(F, 1, complement=comp)
    assert sorted(s) == [-2, -1]
    with pytest.raises(NotReductive):
        graded_splitting(F, 1, complement=[{0: ONE, 1: ONE}, {2: ONE}])
    with pytest.raises(NotReductive):
        graded_splitting(F, 1, complement=[{0: ONE}])
    with pytest.raises(NotReductive):
        graded_splitting(F, 1, complement=[{1: ONE}, {2: ONE}])


def test_graded_splitting_lifts_mix_subalgebra_letters():
    # zero-weight complement vectors may carry subalgebra components;
    # the section then lands outside the plain coordinate embedding
    k = abelian(2)
    t_embed = SparseMatrix.from_rows([[1], [0]])
    t_action = TorusAction(1, [(0,), (0,)])
    F = hs_filtration(k, t_embed, t_action, 3)
    assert all(F.report["checks"].values())
    s = graded_splitting(F, 1, complement=[{0: ONE, 1: ONE}])
    moved = any(len(M.column(c)) > 1
                for M in s.values() for c in range(M.cols))
    assert moved


# ---------------------------------------------------------------------------
# semisplit presentation of the levels


def test_levels_are_semisplit_extensions():
    k, t_embed, t_action = sl2_with_torus()
    F = hs_filtration(k, t_embed, t_action, 4)
    for p in range(0, 4):
        semisplit_from_filtration(F, p)


def test_cone_presentation_of_levels():
    k, t_embed, t_action = sl2_with_torus()
    F = hs_filtration(k, t_embed, t_action, 4)
    expected = {0: {0: 15}, 1: {-1: 6, 0: 1}, 2: {0: 1}, 3: {0: 1}}
    for p in range(0, 4):
        out = cone_presentation(F, p)
        assert out["report"]["cone_h"] == out["report"]["level_h"]
        assert out["report"]["cone_h"] == expected[p]
    # the middle connecting block is genuinely nonzero
    delta = cone_presentation(F, 1)["delta"]
    assert any(not M.is_zero() for M in delta.values())


def test_semisplit_to_cone_over_the_torus_restricted_pair():
    rng = Random(3)
    V = sl2_strict_module(rng, pieces=2)
    tri = cone(V, V, random_automorphism(rng, V))
    split = {}
    for q in tri.cone.degrees():
        M = SparseMatrix.zero(tri.cone.dim(q), tri.shifted.dim(q))
        for r in range(tri.shifted.dim(q)):
            M.set(r, r, ONE)
        split[q] = M
    S = SemisplitSES(V, tri.cone, tri.shifted, tri.include, tri.project,
                     split)
    delta, tri2, iso = semisplit_to_cone(S)
    assert any(not M.is_zero() for M in delta.values())


# ---------------------------------------------------------------------------
# the relative complex


def test_relative_sl2_torus():
    k, t_embed, t_action = sl2_with_torus()
    R = relative_standard_complex(k, t_embed, t_action, 6)
    assert all(R.report["checks"].values())
    lam = {w: len({kw[1] for kw in R.carrier.basis[w]})
           for w in R.carrier.basis}
    assert lam == {0: 1, 1: 2, 2: 1}
    assert R.report["h_dims"] == {0: 1}
    cmp = R.coinvariants_comparison()
    assert cmp["available"] is False
    assert "killed span" in cmp["reason"]


def test_relative_matches_collapse_when_it_exists():
    k = abelian(2)
    t_embed = SparseMatrix.from_rows([[1], [0]])
    t_action = TorusAction(1, [(0,), (0,)])
    R = relative_standard_complex(k, t_embed, t_action, 4)
    assert all(R.report["checks"].values())
    assert R.coinvariants_comparison() == {"available": True,
                                           "isomorphic": True}


def test_relative_trivial_subalgebra_is_the_window():
    k, _, _ = sl2_with_torus()
    R = relative_standard_complex(k, SparseMatrix.zero(3, 0),
                                  TrivialAction(3), 4)
    assert R.report["dims"] == {0: 35, -1: 60, -2: 30, -3: 4}
    assert R.report["h_dims"] == {0: 1}
    assert R.coinvariants_comparison()["isomorphic"] is True


def test_relative_full_subalgebra_is_the_ground_field():
    k, _, _ = sl2_with_torus()
    act = SL2Action(k.ad(0), k.ad(1), k.ad(2))
    R = relative_standard_complex(k, SparseMatrix.identity(3), act, 5)
    assert R.report["dims"] == {0: 1}
    assert R.report["h_dims"] == {0: 1}


def test_relative_window_must_hold_all_wedges():
    k, t_embed, t_action = sl2_with_torus()
    with pytest.raises(TruncationOverflow):
        relative_standard_complex(k, t_embed, t_action, 1)


# ---------------------------------------------------------------------------
# projectivity evidence


def test_kprojectivity_evidence_suite():
    pair = sl2_pair()
    sub = SubgroupT.diagonal_torus_of_sl2()
    rng = Random(11)
    V = sl2_strict_module(rng, pieces=2)
    ident = {q: SparseMatrix.identity(V.dim(q)) for q in V.degrees()}
    suite = [cone(V, V, ident).cone, twisted_acyclic_block(top=2, shift=1)]
    suite += [sl2_acyclic_module(rng, pieces=1) for _ in range(20)]
    rep = kprojectivity_evidence(pair, sub, suite)
    assert rep["count"] == 22
    assert rep["all_acyclic"]
    assert all(it["h_dims"] == {} for it in rep["items"])
    # the evidence is not vacuous: some morphism spaces are nonzero
    assert any(it["hom_dims"] for it in rep["items"])


def test_kprojectivity_rejects_non_acyclic_targets():
    pair = sl2_pair()
    sub = SubgroupT.diagonal_torus_of_sl2()
    W = sl2_block(Random(1), top=2)
    with pytest.raises(MismatchReport):
        kprojectivity_evidence(pair, sub, [W])
