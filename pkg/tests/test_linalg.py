import itertools
import random
from fractions import Fraction

from hce.linalg import (
    FiniteComplex,
    SparseMatrix,
    Subspace,
    complex_cohomology,
    echelonize,
    intersect,
    kernel_basis,
    rank,
    rank_kernel,
    solve,
    vec_from_list,
)


def test_rank_identity():
    assert rank(SparseMatrix.identity(2)) == 2
    assert kernel_basis(SparseMatrix.identity(2)) == []


def test_kernel_of_row():
    M = SparseMatrix.from_rows([[1, 1]])
    r, ker = rank_kernel(M)
    assert r == 1
    assert len(ker) == 1
    v = ker[0]
    # kernel spanned by (1, -1) up to scale
    assert v[1] / v[0] == Fraction(-1)


def test_solve_and_inconsistent():
    M = SparseMatrix.from_rows([[2, 0], [0, 3]])
    v = solve(M, {0: Fraction(1), 1: Fraction(1)})
    assert v == {0: Fraction(1, 2), 1: Fraction(1, 3)}
    M2 = SparseMatrix.from_rows([[1, 1], [2, 2]])
    assert solve(M2, {0: Fraction(1), 1: Fraction(3)}) is None


def test_rank_pivot_rules_agree():
    rng = random.Random(11)
    for _ in range(40):
        r = rng.randrange(1, 7)
        c = rng.randrange(1, 7)
        M = SparseMatrix(
            r, c,
            {(i, j): Fraction(rng.randrange(-4, 5))
             for i in range(r) for j in range(c) if rng.random() < 0.6},
        )
        assert rank(M, "minnum") == rank(M, "first")


def test_echelon_deterministic():
    M = SparseMatrix.from_rows([[2, 4], [3, 5], [1, 7]])
    e1, p1 = echelonize(M.row_dicts())
    e2, p2 = echelonize(M.row_dicts())
    assert e1 == e2 and p1 == p2


def test_subspace_ops():
    U = Subspace(3, [vec_from_list([1, 0, 1]), vec_from_list([0, 1, 0])])
    V = Subspace(3, [vec_from_list([1, 1, 1])])
    assert U.dim == 2 and V.dim == 1
    assert U.contains(vec_from_list([1, 1, 1]))
    W = intersect(U, V)
    assert W.dim == 1
    assert U.complement_pivots() == [2] or len(U.complement_pivots()) == 1
    coords = U.coordinates(vec_from_list([2, 3, 2]))
    assert coords is not None


# --- independent Chevalley-Eilenberg oracle (trivial coefficients) --------
#
# C^p = dual of Lambda^p(g), (d w)(x0..xp) = sum_{i<j} (-1)^{i+j}
# w([xi,xj], rest).  Built directly from structure constants; used to
# freeze expected cohomology dimensions for the main modules' tests.


def ce_complex(dim, bracket):
    """bracket(i, j) -> dict k -> coeff for basis elements i < j."""
    subsets = {p: list(itertools.combinations(range(dim), p))
               for p in range(dim + 1)}
    index = {p: {s: i for i, s in enumerate(subsets[p])} for p in subsets}
    dims = {p: len(subsets[p]) for p in range(dim + 1)}
    diffs = {}
    for p in range(dim):
        M = SparseMatrix.zero(dims[p + 1], dims[p])
        # (d w)(e_T) pairs off two factors of T and feeds their bracket back in
        for T, row in index[p + 1].items():
            for i_pos, j_pos in itertools.combinations(range(p + 1), 2):
                xi, xj = T[i_pos], T[j_pos]
                rest = tuple(t for k, t in enumerate(T) if k not in (i_pos, j_pos))
                sign = (-1) ** (i_pos + j_pos)
                for k, c in bracket(xi, xj).items():
                    if k in rest:
                        continue
                    s = sorted(rest + (k,))
                    wedge_sign = (-1) ** s.index(k)
                    col = index[p][tuple(s)]
                    M.set(row, col, M.get(row, col) + sign * wedge_sign * c)
        diffs[p] = M
    return FiniteComplex(dims, diffs)


def test_ce_abelian2():
    C = ce_complex(2, lambda i, j: {})
    assert complex_cohomology(C) == {0: 1, 1: 2, 2: 1}


def test_ce_sl2():
    # basis e, h, f with [e,h]=-2e, [e,f]=h, [h,f]=-2f
    def bracket(i, j):
        table = {
            (0, 1): {0: Fraction(-2)},
            (0, 2): {1: Fraction(1)},
            (1, 2): {2: Fraction(-2)},
        }
        return table.get((i, j), {})

    C = ce_complex(3, bracket)
    assert complex_cohomology(C) == {0: 1, 3: 1}


def test_ce_heisenberg():
    # [x,y]=z: H^* dims (1,2,2,1)
    def bracket(i, j):
        return {2: Fraction(1)} if (i, j) == (0, 1) else {}

    C = ce_complex(3, bracket)
    assert complex_cohomology(C) == {0: 1, 1: 2, 2: 2, 3: 1}


def test_complex_validation_catches_bad_d():
    d0 = SparseMatrix.from_rows([[1], [0]])
    d1 = SparseMatrix.from_rows([[1, 0]])
    try:
        FiniteComplex({0: 1, 1: 2, 2: 1}, {0: d0, 1: d1})
        assert False, "expected d^2 != 0 failure"
    except AssertionError as e:
        assert "d^2" in str(e)


def test_cohomology_class_coordinates():
    # 0 -> Q^2 -d-> Q^2 -> 0 with d = [[0,0],[1,0]]: H^0 = span(e1), H^1 = span(e0)
    d = SparseMatrix.from_rows([[0, 0], [1, 0]])
    C = FiniteComplex({0: 2, 1: 2}, {0: d})
    assert complex_cohomology(C) == {0: 1, 1: 1}
    cls = C.cohomology_class(1, {0: Fraction(3)})
    assert list(cls.values()) == [Fraction(3)]
