"""Truncated standard complexes: exactness, transport, module structure."""

from fractions import Fraction
from math import comb

import pytest

from hce.errors import TruncationOverflow
from hce.lie import (
    SparseMatrix,
    TorusAction,
    TrivialAction,
    abelian,
    intertwines,
    sl2_algebra,
)
from hce.linalg import ONE
from hce.standard import RelativeStandardComplex, StandardComplex, reordered_algebra


def t_weights_sl2():
    # ad-weights of (e, h, f) under the diagonal torus
    return TorusAction(1, [(2,), (0,), (-2,)])


# ---------------------------------------------------------------------------
# absolute complex


def test_dimensions_sl2_cutoff3():
    N = StandardComplex(sl2_algebra(), 3)
    assert [N.dim(p) for p in range(4)] == [20, 30, 12, 1]
    euler = sum((-1) ** p * N.dim(p) for p in range(4))
    assert euler == 1


def test_cohomology_is_scalars_every_cutoff():
    for k, cutmax in ((sl2_algebra(), 3), (abelian(1, "t"), 4), (abelian(2), 3)):
        for cutoff in range(cutmax + 1):
            N = StandardComplex(k, cutoff)
            C = N.complex()  # validates d^2 = 0
            assert C.cohomology_dims() == {0: 1}, (k.names, cutoff)


def test_differential_worked_example():
    N = StandardComplex(sl2_algebra(), 2)
    # d(1 (x) e^h) = e (x) h - h (x) e + 2 (1 (x) e)
    img = N.d_of_basis((), (0, 1))
    want = {
        N.index[1][((0,), (1,))]: ONE,
        N.index[1][((1,), (0,))]: -ONE,
        N.index[1][((), (0,))]: Fraction(2),
    }
    assert img == want


def test_transport_matches_formula():
    assert StandardComplex(sl2_algebra(), 3).transport_differential_agrees()
    assert StandardComplex(abelian(2), 2).transport_differential_agrees()


def test_filtration_layers():
    N = StandardComplex(sl2_algebra(), 3)
    for t in range(4):
        sub = N.filtration_subcomplex(t)
        assert sub.cohomology_dims() == {0: 1}, t
    assert N.graded_piece(0).cohomology_dims() == {0: 1}
    for t in range(1, 4):
        assert N.graded_piece(t).cohomology_dims() == {}, t


def test_augmentation_kills_boundaries():
    N = StandardComplex(sl2_algebra(), 2)
    eps = N.augmentation()
    assert (eps * N.d_matrix(1)).is_zero()
    C = N.complex()
    cls = C.cohomology_class(0, {N.index[0][((), ())]: ONE})
    assert cls and any(cls.values())


def test_left_multiplication_is_partial():
    N = StandardComplex(sl2_algebra(), 2)
    with pytest.raises(TruncationOverflow):
        N.left_mult_matrix(0, 0)
    with pytest.raises(TruncationOverflow):
        N.omega_even_matrix({1: ONE}, 0)
    with pytest.raises(TruncationOverflow):
        N.interior_matrix(0, 0)


def test_interior_vanishes_past_top_wedge():
    N = StandardComplex(abelian(1, "t"), 1)
    M = N.interior_matrix(0, 1)
    assert M.shape() == (0, N.dim(1))


def test_group_action_on_complex():
    N = StandardComplex(sl2_algebra(), 2)
    # torus case: weights add along monomial and wedge letters
    phi = t_weights_sl2()
    acts = {p: N.nu_action(p, phi) for p in range(3)}
    assert acts[2].weights[N.index[2][((), (0, 2))]] == (0,)  # 1 (x) e^f
    for p in range(1, 3):
        assert intertwines(acts[p], acts[p - 1], N.d_matrix(p)), p
    # SL2 case: the ad-derivation matrices form a valid sl2 triple and
    # commute with the differential
    from hce.catalog import sl2_pair
    sl2_acts = {p: N.nu_action(p, sl2_pair().phi) for p in range(3)}
    for act in sl2_acts.values():
        act.check_valid()
    for p in range(1, 3):
        assert intertwines(sl2_acts[p], sl2_acts[p - 1], N.d_matrix(p)), p


def test_torus_weights_match_content():
    N = StandardComplex(sl2_algebra(), 2)
    phi = t_weights_sl2()
    act = N.nu_action(1, phi)
    for (mon, wedge), w in zip(N.basis[1], act.weights):
        expect = sum((2, 0, -2)[i] for i in mon) + sum((2, 0, -2)[i] for i in wedge)
        assert w == (expect,)


# ---------------------------------------------------------------------------
# relative complex


def relative_sl2_torus(cutoff):
    pair_psi = SparseMatrix.from_rows([[0], [1], [0]])
    return RelativeStandardComplex(sl2_algebra(), pair_psi, t_weights_sl2(), cutoff)


def test_reordered_algebra():
    k = sl2_algebra()
    new = [{0: ONE}, {2: ONE}, {1: ONE}]  # e, f, h
    k2, C = reordered_algebra(k, new, ["p0", "p1", "t0"])
    k2.validate()
    assert k2.bracket(0, 1) == {2: ONE}        # [e, f] = h
    assert k2.bracket(2, 0) == {0: Fraction(2)}  # [h, e] = 2e


def test_relative_dimensions_and_exactness():
    R = relative_sl2_torus(3)
    assert [R.dim(p) for p in range(3)] == [comb(5, 2), 2 * comb(4, 2), comb(3, 2)]
    C = R.complex()
    assert C.cohomology_dims() == {0: 1}
    for t in range(4):
        assert R.filtration_subcomplex(t).cohomology_dims() == {0: 1}, t


def test_relative_equivariance_and_weights():
    R = relative_sl2_torus(3)
    R.check_equivariance()
    w = R.t_weights(1)
    # 1 (x) e has weight 2, 1 (x) f has weight -2
    assert (2,) in w and (-2,) in w


def test_relative_trivial_subalgebra_is_absolute():
    k = sl2_algebra()
    R = RelativeStandardComplex(k, SparseMatrix.zero(3, 0), TrivialAction(3), 2)
    N = StandardComplex(k, 2)
    assert [R.dim(p) for p in range(3)] == [N.dim(p) for p in range(3)]
    assert R.complex().cohomology_dims() == {0: 1}


def test_relative_full_subalgebra_is_scalars():
    t = abelian(2)
    R = RelativeStandardComplex(t, SparseMatrix.identity(2),
                                TorusAction(2, [(0, 0), (0, 0)]), 3)
    assert R.dim(0) == 1 and R.dim(1) == 0
    assert R.complex().cohomology_dims() == {0: 1}
