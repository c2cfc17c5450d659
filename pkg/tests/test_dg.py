"""Graded Lie algebras, PBW normal forms, Hopf structure."""

import random
from fractions import Fraction

import pytest

from hce.catalog import sl2_irreducible_matrices
from hce.dg import (
    DGLieAlgebra,
    Envelope,
    expected_pbw_count,
    hopf_checks,
    pbw_count,
    underline,
)
from hce.errors import AntisymmetryViolation, JacobiViolation, NotAModule
from hce.lie import SparseMatrix, sl2_algebra
from hce.linalg import ONE


def sl2_env():
    return Envelope(DGLieAlgebra.from_even(sl2_algebra()))


def under_env():
    return Envelope(underline(sl2_algebra()))


# ---------------------------------------------------------------------------
# the extended graded algebra


def test_underline_structure():
    dg = underline(sl2_algebra())
    assert dg.names == ["e", "h", "f", "e-", "h-", "f-"]
    assert dg.degrees == [0, 0, 0, -1, -1, -1]
    assert dg.bracket(1, 3) == {3: Fraction(2)}   # [h, e-] = 2 e-
    assert dg.bracket(3, 1) == {3: Fraction(-2)}
    assert dg.bracket(3, 4) == {}                 # odd-odd vanishes
    assert dg.d_of(3) == {0: ONE}
    assert dg.d_of(0) == {}


def test_dg_validation_failures():
    with pytest.raises(AntisymmetryViolation):
        DGLieAlgebra(["x"], [0], {(0, 0): {0: 1}})
    with pytest.raises(AntisymmetryViolation):
        # bracket lands in the wrong degree
        DGLieAlgebra(["x", "y"], [0, 1], {(0, 1): {0: 1}}).validate()
    with pytest.raises(JacobiViolation):
        DGLieAlgebra(["a", "b", "c"], [0, 0, 0],
                     {(0, 1): {1: 1}, (0, 2): {2: 1}, (1, 2): {0: 1}}).validate()
    with pytest.raises(NotAModule):
        # d(x) must raise degree by one
        DGLieAlgebra(["x", "y"], [0, 0], {}, {0: {1: 1}}).validate()
    with pytest.raises(NotAModule):
        # d fails Leibniz: d[a,b] = 0 but [da,b] = [c,b] = 0, [a,db]: pick
        # d(a) = c with [c, b] nonzero
        DGLieAlgebra(["a", "b", "c"], [-1, 0, 0],
                     {(1, 2): {2: 1}, (0, 1): {0: 1}},
                     {0: {2: 1}}).validate()


def test_odd_square_is_half_self_bracket():
    dg = DGLieAlgebra(["x", "s"], [2, 1], {(1, 1): {0: 1}})
    dg.validate()
    env = Envelope(dg)
    assert env.nf((1, 1)) == {(0,): Fraction(1, 2)}


# ---------------------------------------------------------------------------
# normal forms


def test_golden_normal_forms():
    env = sl2_env()
    # f e = e f - h
    assert env.nf((2, 0)) == {(0, 2): ONE, (1,): -ONE}
    u = under_env()
    # odd letters anticommute: h- e- = - e- h-
    assert u.nf((4, 3)) == {(3, 4): -ONE}
    # odd squares vanish when the self-bracket does
    assert u.nf((3, 3)) == {}
    # e- h = h e- - 2 e-
    assert u.nf((3, 1)) == {(1, 3): ONE, (3,): Fraction(-2)}


def test_normal_form_against_matrix_representation():
    """Straightening must agree with an honest representation."""
    env = sl2_env()
    e, h, f = sl2_irreducible_matrices(3)
    mats = [e, h, f]

    def rep(mon):
        M = SparseMatrix.identity(4)
        for i in mon:
            M = M * mats[i]
        return M

    rng = random.Random(7)
    for _ in range(40):
        word = tuple(rng.randrange(3) for _ in range(rng.randrange(1, 5)))
        direct = rep(word)
        via_nf = SparseMatrix.zero(4, 4)
        for mon, c in env.nf(word).items():
            via_nf = via_nf + rep(mon).scale(c)
        assert direct == via_nf, word


def test_products_respect_filtration():
    env = under_env()
    a = {(0, 4): ONE}          # e h-
    b = {(1, 3): Fraction(2)}  # 2 h e-
    prod = env.mul(a, b)
    assert env.element_filtration(prod) <= 2
    assert env.element_degree(prod) == -2


# ---------------------------------------------------------------------------
# differential and antiautomorphism


def test_differential_leibniz_example():
    env = under_env()
    got = env.differential({(3, 4): ONE})  # d(e- h-)
    want = {(0, 4): ONE, (1, 3): -ONE, (3,): Fraction(2)}
    assert got == want


def test_differential_squares_to_zero():
    env = under_env()
    for mon in env.monomials(2):
        assert env.differential(env.differential({mon: ONE})) == {}


def test_iota_examples():
    env = sl2_env()
    assert env.iota({(0,): ONE}) == {(0,): -ONE}
    # iota(e f) = iota(f) iota(e) = f e = e f - h
    assert env.iota({(0, 2): ONE}) == {(0, 2): ONE, (1,): -ONE}
    u = under_env()
    # iota on a single odd letter: sign (-1)^1 with no crossings
    assert u.iota({(3,): ONE}) == {(3,): -ONE}
    # iota is an involution here
    for mon in u.monomials(2):
        assert u.iota(u.iota({mon: ONE})) == {mon: ONE}


# ---------------------------------------------------------------------------
# Hopf structure


def test_hopf_checks_plain():
    env = sl2_env()
    report = hopf_checks(env, filt_bound=3)
    assert all(report.values()), report


def test_hopf_checks_graded():
    env = under_env()
    report = hopf_checks(env, filt_bound=2)
    assert all(report.values()), report


def test_comultiply_primitive_generator():
    env = sl2_env()
    c = env.comultiply({(0,): ONE})
    assert c == {((0,), ()): ONE, ((), (0,)): ONE}


def test_counit():
    env = sl2_env()
    el = {(): Fraction(3), (0, 1): ONE}
    assert env.counit(el) == 3


# ---------------------------------------------------------------------------
# PBW bases


def test_pbw_counts():
    u = under_env()
    for m in range(5):
        assert pbw_count(u, m) == expected_pbw_count(3, 3, m)
    p = sl2_env()
    for m in range(5):
        assert pbw_count(p, m) == expected_pbw_count(3, 0, m)


def test_monomial_order_deterministic():
    u = under_env()
    mons = u.monomials(2)
    assert mons == sorted(mons, key=lambda m: (u.monomial_filtration(m), len(m), m))
    assert mons[0] == ()
    assert len(set(mons)) == len(mons)
