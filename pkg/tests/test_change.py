"""Extension to contraction modules, coinvariants, inflation, and
induction from group representations."""

from fractions import Fraction

import pytest

from hce.akd import (
    AKDModule,
    DGTag,
    hom_complex,
    is_akd_morphism,
    truncated_standard_module,
    validate_akd,
)
from hce.catalog import (
    abelian_pair,
    direct_sum,
    gl1_character,
    gl1_pair,
    sl2_irreducible_matrices,
    sl2_module,
    sl2_pair,
    sl2_torus_pair,
    trivial_module,
)
from hce.change import (
    extend_C_t,
    extend_unit,
    induce_from_group,
    inflate_strict,
    nt_coinvariants,
    wedge_power_action,
)
from hce.errors import (
    MixedAlgebras,
    NotAModule,
    TruncationOverflow,
    UnsupportedGroup,
)
from hce.lie import (
    HCPair,
    SL2Action,
    SparseMatrix,
    SubgroupT,
    Torus,
    TorusAction,
    TrivialAction,
    TrivialGroup,
    WeakHCModule,
    abelian,
)
from hce.linalg import rank


def frac_mat(x) -> SparseMatrix:
    return SparseMatrix.from_rows([[x]])


def defect_single(V, degree: int = 0) -> AKDModule:
    return AKDModule.single(V, degree=degree, tag=DGTag.defect(V.pair))


def two_term_character(p_val, w: int) -> AKDModule:
    # identity differential between two copies of one character
    V = gl1_character(p_val, w)
    return AKDModule.from_weak_complex({0: V, 1: V}, {0: frac_mat(1)},
                                       tag=DGTag.defect(gl1_pair()))


# ---------------------------------------------------------------------------
# extension


def test_extension_of_character_is_edge_shaped():
    for p_val, w in ((2, 0), (Fraction(5, 3), 1), (0, 0), (3, 3)):
        V = defect_single(gl1_character(p_val, w))
        C = extend_C_t(V)
        assert C.tag == DGTag.contraction(gl1_pair())
        assert C.dims == {0: 1, -1: 1}
        assert C.diff(-1) == frac_mat(Fraction(p_val) - w)
        assert C.interior_op(0, 0) == frac_mat(-1)
        assert C.pi[0][0] == frac_mat(p_val)
        assert C.pi[-1][0] == frac_mat(p_val)
        assert C.nu[0].weights == [(w,)]
        assert C.nu[-1].weights == [(w,)]
        report = validate_akd(C)
        strict = Fraction(p_val) == w
        assert report["degrees_strict"] == {0: strict, -1: strict}
        want = {0: 1, -1: 1} if strict else {}
        assert C.complex().cohomology_dims() == want


def test_extension_two_term_invertible_defect():
    C = extend_C_t(two_term_character(3, 1))
    assert C.dims == {1: 1, 0: 2, -1: 1}
    # degree 0 basis: the wedge-zero block of V^0, then V^1 (x) xi
    assert C.diff(-1) == SparseMatrix.from_rows([[2], [1]])
    assert C.diff(0) == SparseMatrix.from_rows([[1, -2]])
    validate_akd(C)
    assert C.complex().cohomology_dims() == {}


def test_extension_of_strict_acyclic_complex():
    C = extend_C_t(two_term_character(2, 2))
    assert C.dims == {1: 1, 0: 2, -1: 1}
    report = validate_akd(C)
    assert report["degrees_strict"] == {1: True, 0: True, -1: True}
    assert C.complex().cohomology_dims() == {}


def test_extension_with_zero_subalgebra_re_tags():
    V = AKDModule.single(gl1_character(2, 1),
                         tag=DGTag("defect", SubgroupT.trivial(Torus(1))))
    C = extend_C_t(V)
    assert C.tag.kind == "contraction"
    assert C.dims == V.dims
    assert C.interior[0] == []
    assert C.pi[0][0] == V.pi[0][0]
    validate_akd(C)
    S = AKDModule.single(gl1_character(2, 1), tag=DGTag.scalars(gl1_pair()))
    assert extend_C_t(S).dims == {0: 1}


def test_extension_trivial_module_over_torus_of_sl2():
    pair = sl2_torus_pair()
    C = extend_C_t(defect_single(trivial_module(pair)))
    assert C.dims == {0: 1, -1: 1}
    assert C.diff(-1).is_zero()
    report = validate_akd(C)
    assert report["degrees_strict"] == {0: True, -1: True}
    assert C.complex().cohomology_dims() == {0: 1, -1: 1}


def test_extension_rank2_trivial_coefficients():
    pair = abelian_pair(2)
    C = extend_C_t(defect_single(trivial_module(pair)))
    assert C.dims == {0: 1, -1: 2, -2: 1}
    assert all(M.is_zero() for M in C.d.values())
    validate_akd(C)
    assert C.complex().cohomology_dims() == {0: 1, -1: 2, -2: 1}


def test_extension_rank2_koszul_acyclic():
    pair = abelian_pair(2)
    W = WeakHCModule(pair, [frac_mat(1), frac_mat(0)],
                     TorusAction(2, [(0, 0)]), name="koszul")
    C = extend_C_t(defect_single(W))
    assert C.dims == {0: 1, -1: 2, -2: 1}
    # defect scalars are (-1, 0); only the first generator differentiates
    assert C.diff(-2) == SparseMatrix.from_rows([[0], [1]])
    assert C.diff(-1) == SparseMatrix.from_rows([[1, 0]])
    validate_akd(C)
    assert C.complex().cohomology_dims() == {}


def test_extension_sl2_full_subgroup():
    pair = sl2_pair()
    C = extend_C_t(defect_single(sl2_module(pair, 2)))
    assert C.dims == {0: 3, -1: 9, -2: 9, -3: 3}
    validate_akd(C)
    assert C.complex().cohomology_dims() == {0: 3, -3: 3}


def test_extension_rejections():
    V = AKDModule.single(gl1_character(1, 1),
                         tag=DGTag.contraction(gl1_pair()))
    with pytest.raises(MixedAlgebras):
        extend_C_t(V)
    pair = sl2_pair()
    W = AKDModule.single(sl2_module(pair, 2),
                         tag=DGTag("defect", SubgroupT.diagonal_torus_of_sl2()))
    with pytest.raises(UnsupportedGroup, match="stabilize"):
        extend_C_t(W)


def test_wedge_powers_of_the_adjoint_sl2_action():
    act = sl2_pair().phi
    w2 = wedge_power_action(act, 2)
    assert w2.dim == 3
    w2.check_valid()
    # h eigenvalues on e^h, e^f, h^f
    assert w2.h == SparseMatrix.from_rows([[2, 0, 0], [0, 0, 0], [0, 0, -2]])
    w3 = wedge_power_action(act, 3)
    assert w3.dim == 1 and w3.h.is_zero()


# ---------------------------------------------------------------------------
# the unit and the graded correspondence it induces


def compose_with_unit(f: dict, unit: dict) -> dict:
    out = {}
    for q, u in unit.items():
        B = f.get(q)
        if B is None:
            continue
        g = B * u
        if not g.is_zero():
            out[q] = g
    return out


def assert_extension_adjunction(X: AKDModule, Y: AKDModule):
    C = extend_C_t(X)
    unit = extend_unit(X, C)
    assert is_akd_morphism(X, C.forget("defect"), unit)
    hom1 = hom_complex(C, Y)
    hom2 = hom_complex(X, Y.forget("defect"))
    assert hom1.dims() == hom2.dims()
    for n in sorted(set(hom1.maps) | set(hom2.maps)):
        basis = hom1.basis(n)
        assert len(basis) == len(hom2.basis(n))
        if not basis:
            continue
        rows = []
        for f in basis:
            g = compose_with_unit(f, unit)
            coords = hom2.coordinates(n, g)
            assert coords is not None, "composite left the morphism space"
            rows.append(coords)
            dg = compose_with_unit(hom1.differential_of(n, f), unit)
            assert dg == hom2.differential_of(n, g)
        M = SparseMatrix(len(rows), len(basis),
                         {(i, j): x for i, row in enumerate(rows)
                          for j, x in row.items()})
        assert rank(M) == len(basis)
    assert (hom1.complex().cohomology_dims()
            == hom2.complex().cohomology_dims())


def test_extension_unit_and_graded_adjunction():
    pair = gl1_pair()
    Y = truncated_standard_module(pair, 2)
    X1 = defect_single(trivial_module(pair))
    assert hom_complex(X1, Y.forget("defect")).dims() == {0: 1, -1: 1}
    assert_extension_adjunction(X1, Y)
    triv = trivial_module(pair)
    X2 = AKDModule.from_weak_complex({0: triv, 1: triv},
                                     {0: SparseMatrix.identity(1)},
                                     tag=DGTag.defect(pair))
    assert_extension_adjunction(X2, Y)


# ---------------------------------------------------------------------------
# coinvariants and inflation


def test_coinvariants_inverts_inflation():
    V = defect_single(gl1_character(2, 2))
    Q = inflate_strict(V)
    assert Q.tag.kind == "contraction"
    assert all(M.is_zero() for M in Q.interior[0])
    W, proj = nt_coinvariants(Q)
    assert W.dims == V.dims
    assert proj[0] == SparseMatrix.identity(1)
    assert W.pi[0][0] == frac_mat(2)
    assert W.nu[0].weights == [(2,)]
    assert is_akd_morphism(Q, W, proj)


def test_inflate_rejects():
    with pytest.raises(NotAModule, match="strict"):
        inflate_strict(defect_single(gl1_character(3, 1)))
    C = AKDModule.single(gl1_character(1, 1),
                         tag=DGTag.contraction(gl1_pair()))
    with pytest.raises(MixedAlgebras):
        inflate_strict(C)


def test_coinvariants_of_truncated_standard():
    V = truncated_standard_module(gl1_pair(), 3)
    W, proj = nt_coinvariants(V)
    assert W.dims == {0: 1}
    assert W.pi[0][0].is_zero()
    assert W.nu[0].weights == [(0,)]
    report = validate_akd(W)
    assert report["degrees_strict"] == {0: True}
    assert is_akd_morphism(V, W, proj)


def test_coinvariants_kill_everything_when_defect_invertible():
    C = extend_C_t(defect_single(gl1_character(3, 1)))
    W, proj = nt_coinvariants(C)
    assert W.dims == {} and proj == {}


def test_coinvariants_see_only_the_strict_summand():
    D = defect_single(direct_sum(gl1_character(2, 2), gl1_character(3, 1)))
    W, _ = nt_coinvariants(D)
    assert W.dims == {0: 1}
    assert W.pi[0][0] == frac_mat(2)
    assert W.nu[0].weights == [(2,)]
    C = extend_C_t(D)
    WC, _ = nt_coinvariants(C)
    assert WC.dims == {0: 1}
    assert WC.pi[0][0] == frac_mat(2)


# ---------------------------------------------------------------------------
# induction


def test_induction_ladder_rank1():
    pair = HCPair(abelian(1), TrivialGroup(), SparseMatrix.zero(1, 0))
    ind = induce_from_group(pair, TrivialAction(1), 3)
    assert ind.dim == 4
    shift = SparseMatrix.zero(4, 4)
    for k in range(3):
        shift.set(k + 1, k, 1)
    assert ind.pi_matrix(0, truncate=True) == shift
    with pytest.raises(TruncationOverflow, match="x0 x0 x0"):
        ind.pi_matrix(0)
    assert ind.counit() * ind.unit() == SparseMatrix.identity(1)
    tiny = induce_from_group(pair, TrivialAction(1), 0)
    assert tiny.dim == 1
    with pytest.raises(TruncationOverflow):
        tiny.pi_matrix(0)


def test_induction_torus_diagonal_weights():
    ind = induce_from_group(gl1_pair(), TorusAction(1, [(2,)]), 2)
    assert ind.dim == 3
    assert ind.nu().weights == [(2,)] * 3


def test_induction_sl2():
    pair = sl2_pair()
    e, h, f = sl2_irreducible_matrices(1)
    ind = induce_from_group(pair, SL2Action(e, h, f), 1)
    assert ind.dim == 8
    nu = ind.nu()
    nu.check_valid()
    assert ind.counit() * ind.unit() == SparseMatrix.identity(2)
