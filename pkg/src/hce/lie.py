"""Lie algebras over Q, algebraic group data, Harish-Chandra pairs and
weak modules.

Groups are never stored as abstract elements.  A torus action is a list
of integer weight tuples (one per basis vector); an SL2 action is the
triple of matrices for e, h, f.  Group-level identities are checked at
the Lie algebra level plus, for SL2, at the simple Weyl reflection
w = exp(e) exp(-f) exp(e), which together generate everything we need
for connected groups.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .errors import (
    AntisymmetryViolation,
    JacobiViolation,
    MismatchReport,
    NonIntegralWeight,
    NotAlgebraic,
    NotAModule,
    NotASubalgebra,
    NotEquivariant,
    UnsupportedGroup,
)
from .linalg import (
    ONE,
    ZERO,
    SparseMatrix,
    Subspace,
    frac,
    kernel_basis,
    rank,
    vec_add,
    vec_eq,
    vec_scale,
)


class LieAlgebra:
    """Finite-dimensional Lie algebra given by structure constants.

    Brackets are stored for index pairs i < j; [x_j, x_i] and [x_i, x_i]
    are derived.  validate() checks the input for antisymmetry conflicts
    and the Jacobi identity on all basis triples.
    """

    def __init__(self, names: Sequence[str], brackets: dict):
        self.names = list(names)
        self.dim = len(self.names)
        self.table: dict = {}
        for (i, j), coeffs in brackets.items():
            coeffs = {k: frac(c) for k, c in coeffs.items() if frac(c)}
            if i == j:
                if coeffs:
                    raise AntisymmetryViolation(
                        f"[{self.names[i]},{self.names[i]}] must vanish, got {coeffs}")
                continue
            if i > j:
                i, j = j, i
                coeffs = {k: -c for k, c in coeffs.items()}
            if (i, j) in self.table and self.table[(i, j)] != coeffs:
                raise AntisymmetryViolation(
                    f"conflicting brackets for ({self.names[i]},{self.names[j]})")
            self.table[(i, j)] = coeffs

    def bracket(self, i: int, j: int) -> dict:
        if i == j:
            return {}
        if i < j:
            return dict(self.table.get((i, j), {}))
        return {k: -c for k, c in self.table.get((j, i), {}).items()}

    def bracket_vec(self, u: dict, v: dict) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.bracket(i, j).items():
                    s = out.get(k, ZERO) + a * b * c
                    if s:
                        out[k] = s
                    else:
                        out.pop(k, None)
        return out

    def ad(self, i: int) -> SparseMatrix:
        M = SparseMatrix.zero(self.dim, self.dim)
        for j in range(self.dim):
            for k, c in self.bracket(i, j).items():
                M.set(k, j, c)
        return M

    def ad_vec(self, v: dict) -> SparseMatrix:
        M = SparseMatrix.zero(self.dim, self.dim)
        for i, a in v.items():
            M = M + self.ad(i).scale(a)
        return M

    def validate(self) -> None:
        for i, j, k in itertools.combinations(range(self.dim), 3):
            acc: dict = {}
            for (a, b, c) in ((i, j, k), (j, k, i), (k, i, j)):
                inner = self.bracket(a, b)
                for m, x in inner.items():
                    for n, y in self.bracket(m, c).items():
                        s = acc.get(n, ZERO) + x * y
                        if s:
                            acc[n] = s
                        else:
                            acc.pop(n, None)
            if acc:
                names = (self.names[i], self.names[j], self.names[k])
                raise JacobiViolation(f"Jacobi fails on {names}: residue {acc}")

    def is_abelian(self) -> bool:
        return all(not c for c in self.table.values())

    def index(self, name: str) -> int:
        return self.names.index(name)

    def to_json(self) -> dict:
        brs = []
        for (i, j), coeffs in sorted(self.table.items()):
            if coeffs:
                brs.append([i, j, {self.names[k]: str(c) for k, c in sorted(coeffs.items())}])
        return {"basis": list(self.names), "brackets": brs}

    @classmethod
    def from_json(cls, data: dict) -> "LieAlgebra":
        names = list(data["basis"])
        brackets = {}
        for i, j, coeffs in data.get("brackets", []):
            parsed = {}
            for key, val in coeffs.items():
                k = names.index(key) if isinstance(key, str) else int(key)
                parsed[k] = frac(val)
            brackets[(int(i), int(j))] = parsed
        alg = cls(names, brackets)
        alg.validate()
        return alg

    def __repr__(self):
        return f"LieAlgebra({self.names})"


def abelian(n: int, prefix: str = "x") -> LieAlgebra:
    return LieAlgebra([f"{prefix}{i}" for i in range(n)], {})


def sl2_algebra() -> LieAlgebra:
    # basis e, h, f: [h,e]=2e, [h,f]=-2f, [e,f]=h
    return LieAlgebra(
        ["e", "h", "f"],
        {(0, 1): {0: Fraction(-2)}, (0, 2): {1: Fraction(1)},
         (1, 2): {2: Fraction(-2)}},
    )


# ---------------------------------------------------------------------------
# group descriptors


@dataclass(frozen=True)
class TrivialGroup:
    kind: str = "trivial"

    @property
    def lie_dim(self) -> int:
        return 0


@dataclass(frozen=True)
class Torus:
    rank: int
    kind: str = "torus"

    @property
    def lie_dim(self) -> int:
        return self.rank


@dataclass(frozen=True)
class SL2:
    kind: str = "sl2"

    @property
    def lie_dim(self) -> int:
        return 3


@dataclass(frozen=True)
class ProductGroup:
    factors: tuple
    kind: str = "product"

    @property
    def lie_dim(self) -> int:
        return sum(f.lie_dim for f in self.factors)


GroupDescriptor = Union[TrivialGroup, Torus, SL2, ProductGroup]


def group_from_json(data: dict) -> GroupDescriptor:
    kind = data["kind"]
    if kind == "trivial":
        return TrivialGroup()
    if kind == "torus":
        return Torus(int(data["rank"]))
    if kind == "sl2":
        return SL2()
    if kind == "product":
        return ProductGroup(tuple(group_from_json(f) for f in data["factors"]))
    raise UnsupportedGroup(f"unknown group kind {kind!r}")


def group_to_json(K: GroupDescriptor) -> dict:
    if isinstance(K, TrivialGroup):
        return {"kind": "trivial"}
    if isinstance(K, Torus):
        return {"kind": "torus", "rank": K.rank}
    if isinstance(K, SL2):
        return {"kind": "sl2"}
    if isinstance(K, ProductGroup):
        return {"kind": "product", "factors": [group_to_json(f) for f in K.factors]}
    raise UnsupportedGroup(repr(K))


def group_lie(K: GroupDescriptor) -> LieAlgebra:
    """Canonical Lie algebra of a group descriptor, with fixed basis."""
    if isinstance(K, TrivialGroup):
        return LieAlgebra([], {})
    if isinstance(K, Torus):
        return abelian(K.rank, prefix="t")
    if isinstance(K, SL2):
        return sl2_algebra()
    if isinstance(K, ProductGroup):
        algs = [group_lie(f) for f in K.factors]
        names = []
        for fi, alg in enumerate(algs):
            names.extend(f"{n}.{fi}" for n in alg.names)
        brackets = {}
        off = 0
        for alg in algs:
            for (i, j), coeffs in alg.table.items():
                brackets[(off + i, off + j)] = {off + k: c for k, c in coeffs.items()}
            off += alg.dim
        return LieAlgebra(names, brackets)
    raise UnsupportedGroup(repr(K))


# ---------------------------------------------------------------------------
# group actions


def exp_nilpotent(M: SparseMatrix) -> SparseMatrix:
    """exp of a nilpotent matrix, exactly."""
    n = M.rows
    out = SparseMatrix.identity(n)
    term = SparseMatrix.identity(n)
    k = 1
    while True:
        term = term * M
        if term.is_zero():
            return out
        out = out + term.scale(Fraction(1, _factorial(k)))
        if k > n:
            raise NotAlgebraic("matrix is not nilpotent")
        k += 1


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


class TrivialAction:
    def __init__(self, dim: int):
        self.dim = dim

    group = TrivialGroup()

    def differential(self, coords) -> SparseMatrix:
        return SparseMatrix.zero(self.dim, self.dim)

    def check_valid(self) -> None:
        pass


class TorusAction:
    """Diagonal torus action: basis vector b has weight weights[b] in Z^r."""

    def __init__(self, rank: int, weights: Sequence[Sequence[int]]):
        self.rank = rank
        self.weights = [tuple(w) for w in weights]
        self.dim = len(self.weights)
        self.group = Torus(rank)

    def differential(self, coords) -> SparseMatrix:
        # coords: coefficients on the canonical torus basis h_1..h_r
        M = SparseMatrix.zero(self.dim, self.dim)
        for b, w in enumerate(self.weights):
            x = sum((frac(coords[i]) * w[i] for i in range(self.rank)), ZERO)
            if x:
                M.set(b, b, x)
        return M

    def check_valid(self) -> None:
        for b, w in enumerate(self.weights):
            if len(w) != self.rank:
                raise NotAlgebraic(f"weight tuple {w} has wrong rank at basis {b}")
            if any(not isinstance(x, int) for x in w):
                raise NonIntegralWeight(f"non-integer weight {w} at basis {b}")


class SL2Action:
    """SL2 action through the matrices of e, h, f (an exact sl2 triple)."""

    def __init__(self, e: SparseMatrix, h: SparseMatrix, f: SparseMatrix):
        self.e, self.h, self.f = e, h, f
        self.dim = e.rows
        self.group = SL2()

    def differential(self, coords) -> SparseMatrix:
        return (self.e.scale(frac(coords[0])) + self.h.scale(frac(coords[1]))
                + self.f.scale(frac(coords[2])))

    def weyl(self) -> SparseMatrix:
        """Representative of the simple reflection: exp(e) exp(-f) exp(e)."""
        return exp_nilpotent(self.e) * exp_nilpotent(-self.f) * exp_nilpotent(self.e)

    def check_valid(self) -> None:
        e, h, f = self.e, self.h, self.f
        if (h * e - e * h) != e.scale(2):
            raise NotAlgebraic("[h,e] != 2e in SL2 action")
        if (h * f - f * h) != f.scale(-2):
            raise NotAlgebraic("[h,f] != -2f in SL2 action")
        if (e * f - f * e) != h:
            raise NotAlgebraic("[e,f] != h in SL2 action")
        # finite-dimensional sl2 representations are semisimple with integer
        # h-eigenvalues; confirm the weight spaces exhaust the carrier
        total = 0
        n = self.dim
        for m in range(-n, n + 1):
            shifted = h - SparseMatrix.identity(n).scale(m)
            total += n - rank(shifted)
        if total != n:
            raise NotAlgebraic("h-action is not semisimple with integer weights")
        # e, f must be nilpotent for the Weyl element to exist
        exp_nilpotent(self.e)
        exp_nilpotent(self.f)

    def h_weight_spaces(self) -> dict:
        out = {}
        n = self.dim
        for m in range(-n, n + 1):
            shifted = self.h - SparseMatrix.identity(n).scale(m)
            ker = kernel_basis(shifted)
            if ker:
                out[m] = ker
        return out


class ProductAction:
    def __init__(self, factors: Sequence):
        self.factors = list(factors)
        dims = {a.dim for a in self.factors}
        assert len(dims) == 1, "product factors must act on one carrier"
        self.dim = dims.pop()
        self.group = ProductGroup(tuple(a.group for a in self.factors))

    def differential(self, coords) -> SparseMatrix:
        M = SparseMatrix.zero(self.dim, self.dim)
        off = 0
        for a in self.factors:
            r = a.group.lie_dim
            M = M + a.differential(list(coords)[off:off + r])
            off += r
        return M

    def check_valid(self) -> None:
        for a in self.factors:
            a.check_valid()
        # factor actions must commute: check on Lie generators and, for SL2
        # factors, on the Weyl representative
        mats = []
        for a in self.factors:
            mats.append(_generator_matrices(a))
        for (i, mi), (j, mj) in itertools.combinations(enumerate(mats), 2):
            for A in mi:
                for B in mj:
                    if A * B != B * A:
                        raise NotEquivariant(
                            f"product factors {i} and {j} do not commute")


def _generator_matrices(action) -> list:
    if isinstance(action, TrivialAction):
        return []
    if isinstance(action, TorusAction):
        out = []
        for i in range(action.rank):
            coords = [0] * action.rank
            coords[i] = 1
            out.append(action.differential(coords))
        return out
    if isinstance(action, SL2Action):
        return [action.e, action.h, action.f, action.weyl()]
    if isinstance(action, ProductAction):
        out = []
        for a in action.factors:
            out.extend(_generator_matrices(a))
        return out
    raise UnsupportedGroup(repr(action))


GroupAction = Union[TrivialAction, TorusAction, SL2Action, ProductAction]


def action_lie_generators(action: GroupAction) -> list:
    """Matrices of the canonical Lie basis of the acting group."""
    if isinstance(action, TrivialAction):
        return []
    if isinstance(action, TorusAction):
        gens = []
        for i in range(action.rank):
            coords = [0] * action.rank
            coords[i] = 1
            gens.append(action.differential(coords))
        return gens
    if isinstance(action, SL2Action):
        return [action.e, action.h, action.f]
    if isinstance(action, ProductAction):
        out = []
        for a in action.factors:
            out.extend(action_lie_generators(a))
        return out
    raise UnsupportedGroup(repr(action))


def intertwines(A: GroupAction, B: GroupAction, M: SparseMatrix) -> bool:
    """Does M: carrier(A) -> carrier(B) commute with the group action?

    Checked on Lie generators, plus the Weyl representative for SL2 parts
    (enough for the connected groups supported here).
    """
    if type(A) is not type(B):
        return False
    if isinstance(A, TrivialAction):
        return True
    if isinstance(A, TorusAction):
        if A.rank != B.rank:
            return False
        for (r, c), x in M.data.items():
            if x and B.weights[r] != A.weights[c]:
                return False
        return True
    if isinstance(A, SL2Action):
        return (M * A.e == B.e * M and M * A.h == B.h * M
                and M * A.f == B.f * M and M * A.weyl() == B.weyl() * M)
    if isinstance(A, ProductAction):
        return all(intertwines(a, b, M) for a, b in zip(A.factors, B.factors))
    raise UnsupportedGroup(repr(A))


def tensor_actions(A: GroupAction, B: GroupAction):
    """Diagonal action on the tensor product, basis ordered (a, b) row-major."""
    if isinstance(A, TorusAction) and isinstance(B, TorusAction):
        assert A.rank == B.rank
        weights = []
        for wa in A.weights:
            for wb in B.weights:
                weights.append(tuple(x + y for x, y in zip(wa, wb)))
        return TorusAction(A.rank, weights)
    if isinstance(A, SL2Action) and isinstance(B, SL2Action):
        def kron_sum(X, Y):
            n, m = A.dim, B.dim
            M = SparseMatrix.zero(n * m, n * m)
            for (r, c), x in X.data.items():
                for j in range(m):
                    M.set(r * m + j, c * m + j, M.get(r * m + j, c * m + j) + x)
            for (r, c), y in Y.data.items():
                for i in range(n):
                    M.set(i * m + r, i * m + c, M.get(i * m + r, i * m + c) + y)
            return M
        return SL2Action(kron_sum(A.e, B.e), kron_sum(A.h, B.h), kron_sum(A.f, B.f))
    if isinstance(A, TrivialAction) and isinstance(B, TrivialAction):
        return TrivialAction(A.dim * B.dim)
    if isinstance(A, ProductAction) and isinstance(B, ProductAction):
        assert len(A.factors) == len(B.factors)
        return ProductAction([tensor_actions(a, b)
                              for a, b in zip(A.factors, B.factors)])
    raise UnsupportedGroup(f"tensor of {type(A).__name__} and {type(B).__name__}")


def direct_sum_actions(parts: Sequence) -> "GroupAction":
    """Blockwise action of one group on a concatenation of carriers.

    All parts must be actions of the same group, in the block order of
    the concatenated basis.
    """
    assert parts, "direct sum of no actions has no group"
    first = parts[0]
    if isinstance(first, TrivialAction):
        return TrivialAction(sum(a.dim for a in parts))
    if isinstance(first, TorusAction):
        weights = []
        for a in parts:
            weights.extend(a.weights)
        return TorusAction(first.rank, weights)
    if isinstance(first, SL2Action):
        n = sum(a.dim for a in parts)
        mats = []
        for pick in (lambda a: a.e, lambda a: a.h, lambda a: a.f):
            M = SparseMatrix.zero(n, n)
            off = 0
            for a in parts:
                for (r, c), x in pick(a).data.items():
                    M.set(off + r, off + c, x)
                off += a.dim
            mats.append(M)
        return SL2Action(*mats)
    if isinstance(first, ProductAction):
        width = len(first.factors)
        return ProductAction([direct_sum_actions([a.factors[i] for a in parts])
                              for i in range(width)])
    raise UnsupportedGroup(repr(first))


# ---------------------------------------------------------------------------
# Harish-Chandra pairs

# Ad(w) on the sl2 basis (e, h, f) for w = exp(e) exp(-f) exp(e)
_SL2_AD_W = SparseMatrix.from_rows([[0, 0, -1], [0, -1, 0], [-1, 0, 0]])


class HCPair:
    """Pair (A, K) with A = U(g): an algebra with a compatible K-action.

    psi embeds Lie(K) into g (columns indexed by the canonical basis of
    Lie(K)); phi is the algebraic K-action on g.  Compatibility:
      (a) psi is an injective morphism of Lie algebras;
      (b) the differential of phi is ad composed with psi;
      (c) phi(k) restricted along psi agrees with the adjoint action of K
          on its own Lie algebra (checked on torus weights and, for SL2,
          on the simple Weyl reflection).
    """

    def __init__(self, g: LieAlgebra, group: GroupDescriptor,
                 psi: SparseMatrix, phi: Optional[GroupAction] = None):
        self.g = g
        self.group = group
        self.k = group_lie(group)
        assert psi.shape() == (g.dim, self.k.dim), (psi.shape(), g.dim, self.k.dim)
        self.psi = psi
        self.phi = phi if phi is not None else derive_phi(g, group, psi)

    def psi_col(self, j: int) -> dict:
        return self.psi.column(j)

    def validate(self) -> None:
        self.g.validate()
        self.phi.check_valid()
        if self.phi.dim != self.g.dim:
            raise NotEquivariant("phi acts on a carrier of the wrong dimension")
        if rank(self.psi) != self.k.dim:
            raise NotASubalgebra("psi is not injective")
        # Lie algebra morphism
        for i in range(self.k.dim):
            for j in range(i + 1, self.k.dim):
                lhs = self.g.bracket_vec(self.psi_col(i), self.psi_col(j))
                rhs: dict = {}
                for k0, c in self.k.bracket(i, j).items():
                    rhs = vec_add(rhs, vec_scale(c, self.psi_col(k0)))
                if lhs != rhs:
                    raise NotASubalgebra(
                        f"psi breaks bracket of ({self.k.names[i]},{self.k.names[j]})")
        # differential of phi = ad o psi
        gens = action_lie_generators(self.phi)
        for j, M in enumerate(gens):
            if M != self.g.ad_vec(self.psi_col(j)):
                raise NotEquivariant(
                    f"d(phi)({self.k.names[j]}) != ad(psi({self.k.names[j]}))")
        self._check_psi_equivariance(self.group, self.phi, list(range(self.k.dim)))

    def _check_psi_equivariance(self, K, phi, cols) -> None:
        # phi(k) o psi = psi o Ad(k), checked per factor
        if isinstance(K, TrivialGroup):
            return
        if isinstance(K, Torus):
            # Ad is trivial on the torus's own algebra: psi columns must be
            # fixed, i.e. land in the weight-zero part of phi
            for j in cols:
                for b in self.psi_col(j):
                    if any(phi.weights[b]):
                        raise NotEquivariant(
                            f"psi({self.k.names[j]}) meets nonzero phi-weight")
            return
        if isinstance(K, SL2):
            w = phi.weyl() if isinstance(phi, SL2Action) else None
            if w is None:
                raise UnsupportedGroup("SL2 factor needs an SL2 action")
            sub = SparseMatrix.from_columns([self.psi_col(j) for j in cols], self.g.dim)
            if w * sub != sub * _SL2_AD_W:
                raise NotEquivariant("psi does not intertwine the Weyl reflection")
            return
        if isinstance(K, ProductGroup):
            assert isinstance(phi, ProductAction)
            off = 0
            for fac, act in zip(K.factors, phi.factors):
                r = fac.lie_dim
                self._check_psi_equivariance(fac, act, cols[off:off + r])
                off += r
            return
        raise UnsupportedGroup(repr(K))


def derive_phi(g: LieAlgebra, K: GroupDescriptor, psi: SparseMatrix) -> GroupAction:
    """Exponentiate ad o psi to a group action on g.

    Tori require the given basis of g to consist of joint ad-eigenvectors
    with integer eigenvalues (weight vectors); SL2 uses the matrices of
    ad(psi(e)), ad(psi(h)), ad(psi(f)) directly.
    """
    if isinstance(K, TrivialGroup):
        return TrivialAction(g.dim)
    if isinstance(K, Torus):
        mats = [g.ad_vec(psi.column(j)) for j in range(K.rank)]
        weights = []
        for b in range(g.dim):
            w = []
            for M in mats:
                col = M.column(b)
                if set(col) - {b}:
                    raise NotAlgebraic(
                        f"basis vector {g.names[b]} is not a weight vector")
                x = col.get(b, ZERO)
                if x.denominator != 1:
                    raise NonIntegralWeight(
                        f"ad-weight {x} of {g.names[b]} is not an integer")
                w.append(int(x))
            weights.append(tuple(w))
        act = TorusAction(K.rank, weights)
        act.check_valid()
        return act
    if isinstance(K, SL2):
        act = SL2Action(g.ad_vec(psi.column(0)), g.ad_vec(psi.column(1)),
                        g.ad_vec(psi.column(2)))
        act.check_valid()
        return act
    if isinstance(K, ProductGroup):
        facs = []
        off = 0
        for fac in K.factors:
            r = fac.lie_dim
            cols = SparseMatrix.from_columns(
                [psi.column(off + j) for j in range(r)], g.dim)
            facs.append(derive_phi(g, fac, cols))
            off += r
        act = ProductAction(facs)
        act.check_valid()
        return act
    raise UnsupportedGroup(repr(K))


def pair_from_json(data: dict) -> HCPair:
    g = LieAlgebra.from_json(data["g"])
    K = group_from_json(data["group"])
    rows = data["k_embedding"]
    psi = SparseMatrix.from_rows(rows) if rows else SparseMatrix.zero(g.dim, 0)
    if psi.cols != K.lie_dim:
        # accept the transpose orientation (columns = Lie(K) basis) only
        raise NotASubalgebra(
            f"k_embedding must have {K.lie_dim} columns, got {psi.cols}")
    pair = HCPair(g, K, psi)
    pair.validate()
    return pair


def pair_to_json(pair: HCPair) -> dict:
    return {
        "g": pair.g.to_json(),
        "k_embedding": [[str(pair.psi.get(r, c)) for c in range(pair.psi.cols)]
                        for r in range(pair.psi.rows)],
        "group": group_to_json(pair.group),
    }


# ---------------------------------------------------------------------------
# weak modules


class WeakHCModule:
    """Weak (A, K)-module: compatible actions pi of g and nu of K.

    pi is a list of matrices, one per basis element of g.  omega(xi) =
    d(nu)(xi) - pi(psi(xi)) measures the failure of strictness; it is
    itself a representation of Lie(K) commuting with pi (checked).
    """

    def __init__(self, pair: HCPair, pi: Sequence[SparseMatrix],
                 nu: GroupAction, name: str = ""):
        self.pair = pair
        self.pi = list(pi)
        self.nu = nu
        self.dim = nu.dim
        self.name = name
        assert len(self.pi) == pair.g.dim
        for M in self.pi:
            assert M.shape() == (self.dim, self.dim)

    def pi_vec(self, v: dict) -> SparseMatrix:
        M = SparseMatrix.zero(self.dim, self.dim)
        for i, c in v.items():
            M = M + self.pi[i].scale(c)
        return M

    def nu_lie(self, j: int) -> SparseMatrix:
        coords = [0] * self.pair.k.dim
        coords[j] = 1
        return self.nu.differential(coords)

    def omega(self, j: int) -> SparseMatrix:
        return self.nu_lie(j) - self.pi_vec(self.pair.psi_col(j))

    def omegas(self) -> list:
        return [self.omega(j) for j in range(self.pair.k.dim)]

    def is_strict(self) -> bool:
        return all(M.is_zero() for M in self.omegas())


def check_weak_module(V: WeakHCModule) -> dict:
    """Full axiom check; raises on failure, returns a small report dict."""
    pair = V.pair
    g = pair.g
    # pi is a Lie algebra representation
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            comm = V.pi[i] * V.pi[j] - V.pi[j] * V.pi[i]
            br: dict = g.bracket(i, j)
            target = SparseMatrix.zero(V.dim, V.dim)
            for k, c in br.items():
                target = target + V.pi[k].scale(c)
            if comm != target:
                raise NotAModule(
                    f"pi breaks [{g.names[i]},{g.names[j]}] on module {V.name!r}")
    # nu is an algebraic action
    V.nu.check_valid()
    if V.nu.dim != V.dim:
        raise NotAlgebraic("nu acts on wrong dimension")
    # K-equivariance of pi: [d(nu)(xi), pi(x)] = pi(d(phi)(xi) x)
    phi_gens = action_lie_generators(pair.phi)
    for j in range(pair.k.dim):
        nj = V.nu_lie(j)
        for x in range(g.dim):
            lhs = nj * V.pi[x] - V.pi[x] * nj
            rhs = V.pi_vec(phi_gens[j].column(x))
            if lhs != rhs:
                raise NotEquivariant(
                    f"pi is not K-equivariant at ({pair.k.names[j]}, {g.names[x]})")
    _check_group_level(V)
    # derived identities: omega is a Lie(K)-representation commuting with pi,
    # and is itself K-equivariant
    om = V.omegas()
    k = pair.k
    for i in range(k.dim):
        for j in range(i + 1, k.dim):
            comm = om[i] * om[j] - om[j] * om[i]
            target = SparseMatrix.zero(V.dim, V.dim)
            for k0, c in k.bracket(i, j).items():
                target = target + om[k0].scale(c)
            if comm != target:
                raise NotAModule(f"omega breaks [{k.names[i]},{k.names[j]}]")
    for j in range(k.dim):
        for x in range(g.dim):
            if om[j] * V.pi[x] != V.pi[x] * om[j]:
                raise NotAModule(
                    f"omega({k.names[j]}) does not commute with pi({g.names[x]})")
    return {"dim": V.dim, "strict": V.is_strict()}


def _check_group_level(V: WeakHCModule) -> None:
    """Weyl-reflection instance of the group-level equivariance for SL2 parts."""
    pair = V.pair

    def walk(K, phi, nu):
        if isinstance(K, SL2):
            w_phi = phi.weyl()
            w_nu = nu.weyl()
            for x in range(pair.g.dim):
                lhs = w_nu * V.pi[x]
                rhs = V.pi_vec(w_phi.column(x)) * w_nu
                if lhs != rhs:
                    raise NotEquivariant(
                        f"pi not equivariant under Weyl reflection at {pair.g.names[x]}")
        elif isinstance(K, ProductGroup):
            for fac, p, n in zip(K.factors, phi.factors, nu.factors):
                walk(fac, p, n)

    if isinstance(pair.group, (SL2, ProductGroup)):
        if isinstance(pair.group, SL2) and not isinstance(V.nu, SL2Action):
            raise NotAlgebraic("SL2 pair needs an SL2 action on the module")
        walk(pair.group, pair.phi, V.nu)


def restrict_action(nu: GroupAction, basis: list) -> GroupAction:
    """Action of the same group on the span of the given basis vectors.

    The span must be stable and the basis fully reduced (as produced by
    Subspace.basis()); stability then forces each basis vector to be
    weight-homogeneous for torus parts.
    """
    span = Subspace(nu.dim, basis)

    def push(M: SparseMatrix) -> SparseMatrix:
        out = SparseMatrix.zero(len(basis), len(basis))
        for j, v in enumerate(basis):
            img = M.apply(v)
            coords = _coords_in(basis, img, span)
            for i, c in coords.items():
                out.set(i, j, c)
        return out

    if isinstance(nu, TrivialAction):
        return TrivialAction(len(basis))
    if isinstance(nu, TorusAction):
        weights = []
        for v in basis:
            ws = {nu.weights[b] for b in v}
            if len(ws) != 1:
                raise NotEquivariant("basis vector mixes torus weights")
            weights.append(ws.pop())
        return TorusAction(nu.rank, weights)
    if isinstance(nu, SL2Action):
        return SL2Action(push(nu.e), push(nu.h), push(nu.f))
    if isinstance(nu, ProductAction):
        return ProductAction([restrict_action(a, basis) for a in nu.factors])
    raise UnsupportedGroup(repr(nu))


def _coords_in(basis: list, v: dict, span: Subspace) -> dict:
    M = SparseMatrix.from_columns(basis, span.ambient)
    from .linalg import solve
    sol = solve(M, v)
    if sol is None:
        raise NotEquivariant("span is not stable under the action")
    return sol


def quotient_action(nu: GroupAction, sub: Subspace, rep_indices: list) -> GroupAction:
    """Action induced on the quotient by a stable subspace.

    rep_indices are ambient coordinates representing the quotient basis
    (the complement pivots of sub).
    """
    def push(M: SparseMatrix) -> SparseMatrix:
        out = SparseMatrix.zero(len(rep_indices), len(rep_indices))
        for j, b in enumerate(rep_indices):
            img = sub.reduce(M.apply({b: ONE}))
            for i, bi in enumerate(rep_indices):
                x = img.get(bi, ZERO)
                if x:
                    out.set(i, j, x)
        return out

    if isinstance(nu, TrivialAction):
        return TrivialAction(len(rep_indices))
    if isinstance(nu, TorusAction):
        return TorusAction(nu.rank, [nu.weights[b] for b in rep_indices])
    if isinstance(nu, SL2Action):
        return SL2Action(push(nu.e), push(nu.h), push(nu.f))
    if isinstance(nu, ProductAction):
        return ProductAction([quotient_action(a, sub, rep_indices) for a in nu.factors])
    raise UnsupportedGroup(repr(nu))


# ---------------------------------------------------------------------------
# invariants and coinvariants


class SubQuotientModule:
    """A weak module together with the map relating it to its parent."""

    def __init__(self, module: WeakHCModule, matrix: SparseMatrix, kind: str):
        self.module = module
        self.matrix = matrix  # inclusion (sub) or projection (quotient)
        self.kind = kind


def invariants_coinvariants(V: WeakHCModule):
    """Largest strict submodule and largest strict quotient w.r.t. omega.

    Returns (invariants: SubQuotientModule, coinvariants: SubQuotientModule).
    Invariants: joint kernel of all omega(xi).  Coinvariants: quotient by
    the span of all omega(xi) images.  Both inherit pi and nu and are
    verified strict.
    """
    pair = V.pair
    oms = V.omegas()
    # invariants
    inv = Subspace(V.dim)
    if not oms:
        for b in range(V.dim):
            inv.add({b: ONE})
    else:
        stacked = SparseMatrix.zero(V.dim * len(oms), V.dim)
        for t, M in enumerate(oms):
            for (r, c), x in M.data.items():
                stacked.set(t * V.dim + r, c, x)
        for v in kernel_basis(stacked):
            inv.add(v)
    inv_basis = inv.basis()
    inc = SparseMatrix.from_columns(inv_basis, V.dim)
    pi_sub = [apply_on_basis(M, inv_basis, inv) for M in V.pi]
    nu_sub = restrict_action(V.nu, inv_basis)
    Vinv = WeakHCModule(pair, pi_sub, nu_sub, name=f"{V.name}^inv")
    check_weak_module(Vinv)
    assert Vinv.is_strict(), "invariants must be strict"

    # coinvariants
    span = Subspace(V.dim)
    for M in oms:
        for j in range(V.dim):
            col = M.column(j)
            if col:
                span.add(col)
    reps = span.complement_pivots()
    proj = SparseMatrix.zero(len(reps), V.dim)
    for j in range(V.dim):
        red = span.reduce({j: ONE})
        for i, b in enumerate(reps):
            x = red.get(b, ZERO)
            if x:
                proj.set(i, j, x)
    pi_quot = [quotient_matrix(M, span, reps) for M in V.pi]
    nu_quot = quotient_action(V.nu, span, reps)
    Vco = WeakHCModule(pair, pi_quot, nu_quot, name=f"{V.name}_coinv")
    check_weak_module(Vco)
    assert Vco.is_strict(), "coinvariants must be strict"

    return (SubQuotientModule(Vinv, inc, "sub"),
            SubQuotientModule(Vco, proj, "quotient"))


def apply_on_basis(M: SparseMatrix, basis: list, span: Subspace) -> SparseMatrix:
    """Matrix of M restricted to a stable span, in the given basis."""
    out = SparseMatrix.zero(len(basis), len(basis))
    cols = SparseMatrix.from_columns(basis, span.ambient)
    from .linalg import solve
    for j, v in enumerate(basis):
        img = M.apply(v)
        if not img:
            continue
        sol = solve(cols, img)
        if sol is None:
            raise NotAModule("span is not stable under the operator")
        for i, c in sol.items():
            out.set(i, j, c)
    return out


def quotient_matrix(M: SparseMatrix, sub: Subspace, reps: list) -> SparseMatrix:
    out = SparseMatrix.zero(len(reps), len(reps))
    for j, b in enumerate(reps):
        img = sub.reduce(M.apply({b: ONE}))
        for i, bi in enumerate(reps):
            x = img.get(bi, ZERO)
            if x:
                out.set(i, j, x)
    return out


def hc_morphisms(V: WeakHCModule, W: WeakHCModule) -> list:
    """Basis of the space of (A, K)-morphisms V -> W.

    Unknowns are the dim(W) x dim(V) matrix entries; constraints are
    intertwining with every pi generator and with the K-action (torus
    weight matching, SL2 e/f/h plus Weyl reflection matrices).
    """
    nv, nw = V.dim, W.dim
    from .errors import MixedAlgebras
    if (V.pair.g.names != W.pair.g.names or V.pair.g.table != W.pair.g.table
            or V.pair.group != W.pair.group or V.pair.psi != W.pair.psi):
        raise MixedAlgebras("morphisms need a common pair")

    def unk(r, c):
        return r * nv + c

    rows = []

    def add_intertwine(A: SparseMatrix, B: SparseMatrix):
        # f A = B f: one equation per (target row r, source col c)
        for r in range(nw):
            for c in range(nv):
                row: dict = {}
                for k in range(nv):
                    x = A.get(k, c)
                    if x:
                        row[unk(r, k)] = row.get(unk(r, k), ZERO) + x
                for k in range(nw):
                    y = B.get(r, k)
                    if y:
                        row[unk(k, c)] = row.get(unk(k, c), ZERO) - y
                if row:
                    rows.append(row)

    for i in range(V.pair.g.dim):
        add_intertwine(V.pi[i], W.pi[i])
    for A, B in zip(_generator_matrices(V.nu), _generator_matrices(W.nu)):
        add_intertwine(A, B)

    M = SparseMatrix(len(rows), nw * nv,
                     {(i, j): x for i, row in enumerate(rows) for j, x in row.items()})
    out = []
    for v in kernel_basis(M):
        F = SparseMatrix.zero(nw, nv)
        for idx, x in v.items():
            F.set(idx // nv, idx % nv, x)
        out.append(F)
    return out


# ---------------------------------------------------------------------------
# invariant complements


def invariant_complement(k: LieAlgebra, t_embed: SparseMatrix,
                         t_action_on_k: GroupAction) -> list:
    """T-stable complement of t inside k, as a list of vectors.

    For torus T the complement is the sum of the nonzero weight spaces
    plus a deterministic completion inside the zero weight space.  For
    T = K (SL2 case) the complement is zero.  Raises NotReductive when
    t is not contained in the zero weight space.
    """
    from .errors import NotReductive

    t_dim = t_embed.cols
    t_cols = [t_embed.column(j) for j in range(t_dim)]
    if isinstance(t_action_on_k, SL2Action):
        if t_dim != k.dim:
            raise UnsupportedGroup("SL2 acting as T needs t = k")
        return []
    if isinstance(t_action_on_k, TrivialAction):
        span = Subspace(k.dim, t_cols)
        return [{b: ONE} for b in span.complement_pivots()]
    if not isinstance(t_action_on_k, TorusAction):
        raise UnsupportedGroup(repr(t_action_on_k))

    zero_idx = [b for b in range(k.dim) if not any(t_action_on_k.weights[b])]
    nonzero_idx = [b for b in range(k.dim) if any(t_action_on_k.weights[b])]
    zero_set = set(zero_idx)
    for j, col in enumerate(t_cols):
        if set(col) - zero_set:
            raise NotReductive(
                f"t basis column {j} has a nonzero T-weight component")
    comp = [{b: ONE} for b in nonzero_idx]
    span = Subspace(k.dim, t_cols)
    for b in zero_idx:
        v = span.reduce({b: ONE})
        if v and span.add(v):
            comp.append(v)
    return comp


def check_complement(k: LieAlgebra, t_embed: SparseMatrix,
                     t_action_on_k: GroupAction, p_basis: list) -> None:
    """Verify k = t + p with p stable under the T-action (weight purity)."""
    t_cols = [t_embed.column(j) for j in range(t_embed.cols)]
    total = Subspace(k.dim, t_cols + list(p_basis))
    if total.dim != k.dim or len(p_basis) + t_embed.cols != k.dim:
        raise NotASubalgebra("t + p does not decompose k")
    span = Subspace(k.dim, p_basis)
    for g in action_lie_generators(t_action_on_k):
        for v in p_basis:
            if not span.contains(g.apply(v)):
                raise NotEquivariant("complement is not T-stable (weight mixing)")
    if isinstance(t_action_on_k, TorusAction):
        for v in p_basis:
            ws = {t_action_on_k.weights[b] for b in v}
            if len(ws) > 1:
                raise NotEquivariant("complement is not T-stable (weight mixing)")


# ---------------------------------------------------------------------------
# Closed subgroups


@dataclass(frozen=True)
class SubgroupT:
    """A closed subgroup T of a group K, given by a descriptor for T itself
    and the embedding of its Lie algebra into Lie(K).

    ``embed`` has one column per basis vector of Lie(T), expressed in the
    canonical basis of Lie(K) (see group_lie).
    """

    group: GroupDescriptor
    embed: SparseMatrix

    @classmethod
    def full(cls, K: GroupDescriptor) -> "SubgroupT":
        return cls(K, SparseMatrix.identity(group_lie(K).dim))

    @classmethod
    def trivial(cls, K: GroupDescriptor) -> "SubgroupT":
        return cls(TrivialGroup(), SparseMatrix(group_lie(K).dim, 0, {}))

    @classmethod
    def diagonal_torus_of_sl2(cls) -> "SubgroupT":
        return cls(Torus(1), SparseMatrix.from_rows([[0], [1], [0]]))

    def lie(self) -> LieAlgebra:
        return group_lie(self.group)

    def is_full(self, K: GroupDescriptor) -> bool:
        n = group_lie(K).dim
        return self.group == K and self.embed == SparseMatrix.identity(n)

    def validate(self, K: GroupDescriptor) -> None:
        k_lie = group_lie(K)
        t_lie = self.lie()
        if self.embed.rows != k_lie.dim or self.embed.cols != t_lie.dim:
            raise MismatchReport("subgroup embedding has wrong shape")
        cols = [self.embed.column(j) for j in range(t_lie.dim)]
        span = Subspace(k_lie.dim)
        for c in cols:
            if not span.add(c):
                raise NotASubalgebra("subgroup embedding is not injective")
        for i in range(t_lie.dim):
            for j in range(i + 1, t_lie.dim):
                br = k_lie.bracket_vec(cols[i], cols[j])
                want = {}
                for b, x in t_lie.bracket(i, j).items():
                    want = vec_add(want, vec_scale(x, cols[b]))
                if not vec_eq(br, want):
                    raise NotASubalgebra(
                        "embedding does not respect brackets at (%d, %d)" % (i, j))

    def restrict(self, nu: GroupAction) -> GroupAction:
        """Restrict an action of K to this subgroup.

        The carrier and its basis are unchanged.  Torus restrictions need
        the basis to consist of joint eigenvectors of the subgroup's
        infinitesimal generators; anything else is reported, not guessed.
        """
        n = nu.dim
        if isinstance(self.group, TrivialGroup):
            return TrivialAction(n)
        if self.is_full_action_reuse(nu):
            return nu
        if isinstance(self.group, Torus):
            gens = action_lie_generators(nu)
            weights = [[0] * self.group.rank for _ in range(n)]
            for j in range(self.group.rank):
                col = self.embed.column(j)
                M = SparseMatrix.zero(n, n)
                for b, x in col.items():
                    M = M + gens[b].scale(x)
                for (r, c), x in M.data.items():
                    if r != c:
                        raise UnsupportedGroup(
                            "basis is not an eigenbasis for the subgroup torus")
                    if x.denominator != 1:
                        raise NonIntegralWeight(
                            "restricted weight %s is not an integer" % (x,))
                    weights[r][j] = int(x)
            return TorusAction(self.group.rank, weights)
        raise UnsupportedGroup(
            "restriction to subgroup of type %s is not supported"
            % type(self.group).__name__)

    def is_full_action_reuse(self, nu: GroupAction) -> bool:
        k_dim = self.embed.rows
        if self.embed.cols != k_dim or self.embed != SparseMatrix.identity(k_dim):
            return False
        if isinstance(self.group, SL2) and isinstance(nu, SL2Action):
            return True
        if isinstance(self.group, Torus) and isinstance(nu, TorusAction):
            return nu.rank == self.group.rank
        return False

    def character_restriction(self, mu: list) -> list:
        """Push a torus character of K down to one of a torus subgroup."""
        if not isinstance(self.group, Torus):
            raise UnsupportedGroup("character restriction needs a torus subgroup")
        out = []
        for j in range(self.group.rank):
            col = self.embed.column(j)
            acc = Fraction(0)
            for b, x in col.items():
                acc += x * mu[b]
            if acc.denominator != 1:
                raise NonIntegralWeight("character does not restrict integrally")
            out.append(int(acc))
        return out


# ---------------------------------------------------------------------------
# serialization of actions and modules


def matrix_to_json(M: SparseMatrix) -> list:
    return [[str(M.get(r, c)) for c in range(M.cols)] for r in range(M.rows)]


def matrix_from_json(rows: list, shape=None) -> SparseMatrix:
    if not rows:
        r, c = shape if shape else (0, 0)
        return SparseMatrix.zero(r, c)
    return SparseMatrix.from_rows(rows)


def action_to_json(nu: GroupAction) -> dict:
    if isinstance(nu, TrivialAction):
        return {"kind": "trivial", "dim": nu.dim}
    if isinstance(nu, TorusAction):
        return {"kind": "torus", "rank": nu.rank,
                "weights": [list(w) for w in nu.weights]}
    if isinstance(nu, SL2Action):
        return {"kind": "sl2", "e": matrix_to_json(nu.e),
                "h": matrix_to_json(nu.h), "f": matrix_to_json(nu.f)}
    if isinstance(nu, ProductAction):
        return {"kind": "product",
                "factors": [action_to_json(a) for a in nu.factors]}
    raise UnsupportedGroup(repr(nu))


def action_from_json(data: dict) -> GroupAction:
    kind = data["kind"]
    if kind == "trivial":
        return TrivialAction(int(data["dim"]))
    if kind == "torus":
        return TorusAction(int(data["rank"]),
                           [tuple(int(x) for x in w) for w in data["weights"]])
    if kind == "sl2":
        return SL2Action(matrix_from_json(data["e"]), matrix_from_json(data["h"]),
                         matrix_from_json(data["f"]))
    if kind == "product":
        return ProductAction([action_from_json(f) for f in data["factors"]])
    raise UnsupportedGroup(f"unknown action kind {kind!r}")


def module_to_json(V: WeakHCModule) -> dict:
    return {
        "pair": pair_to_json(V.pair),
        "dim": V.dim,
        "pi": [matrix_to_json(M) for M in V.pi],
        "nu": action_to_json(V.nu),
        "name": V.name,
    }


def module_from_json(data: dict, pair: Optional[HCPair] = None) -> WeakHCModule:
    if pair is None:
        pair = pair_from_json(data["pair"])
    n = int(data["dim"])
    pi = [matrix_from_json(rows, (n, n)) for rows in data["pi"]]
    V = WeakHCModule(pair, pi, action_from_json(data["nu"]),
                     name=data.get("name", ""))
    check_weak_module(V)
    return V
