"""Standard resolution complexes, truncated by total degree.

The complex for a Lie algebra k lives in degrees -dim(k)..0; the degree
-p piece has basis u (x) w with u a PBW monomial in U(k) of filtration
at most (cutoff - p) and w a p-element subset of the basis of k.  With
that truncation the differential never overflows and squares to zero on
the nose, and the cohomology is exactly Q in degree 0 for every cutoff.

Left multiplication and the even defect operators raise the filtration,
so they exist only as partial operators here; asking for an image that
falls outside the truncation raises TruncationOverflow with a witness.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .dg import DGLieAlgebra, Envelope, underline
from .errors import NotEquivariant, TruncationOverflow, UnsupportedGroup
from .lie import (
    LieAlgebra,
    SL2,
    SL2Action,
    SparseMatrix,
    Torus,
    TorusAction,
    TrivialAction,
    TrivialGroup,
    check_complement,
    invariant_complement,
)
from .linalg import ONE, ZERO, FiniteComplex, Subspace, solve

BasisKey = Tuple[Tuple[int, ...], Tuple[int, ...]]  # (even monomial, wedge)


def _insert_wedge(m: int, rest: Tuple[int, ...]):
    """(position sign, sorted wedge) for x_m wedged in front of rest; None
    if m already occurs."""
    if m in rest:
        return None
    pos = sum(1 for r in rest if r < m)
    return (-1) ** pos, tuple(sorted(rest + (m,)))


class StandardComplex:
    """Truncated standard resolution of the trivial module over U(k)."""

    def __init__(self, k: LieAlgebra, cutoff: int):
        assert cutoff >= 0
        self.k = k
        self.cutoff = cutoff
        self.dg = underline(k)
        self.env = Envelope(self.dg)
        self.basis: Dict[int, List[BasisKey]] = {}
        self.index: Dict[int, Dict[BasisKey, int]] = {}
        n = k.dim
        for p in range(min(n, cutoff) + 1):
            mons = [m for m in self.env.monomials(cutoff - p)
                    if all(self.dg.parity(i) == 0 for i in m)]
            keys = []
            for mon in mons:
                for wedge in itertools.combinations(range(n), p):
                    keys.append((mon, wedge))
            keys.sort(key=lambda kw: (len(kw[0]), kw[0], kw[1]))
            self.basis[p] = keys
            self.index[p] = {kw: i for i, kw in enumerate(keys)}

    def dim(self, p: int) -> int:
        return len(self.basis.get(p, []))

    def degrees(self) -> list:
        return sorted(-p for p in self.basis)

    # -- differential -------------------------------------------------------

    def d_of_basis(self, mon: Tuple[int, ...], wedge: Tuple[int, ...]) -> dict:
        """Image of u (x) w in the degree -(p-1) piece, as index -> coeff."""
        p = len(wedge)
        out: dict = {}
        tgt = self.index[p - 1]
        lam = list(wedge)
        for i, xi in enumerate(lam):
            sign = Fraction((-1) ** i)
            rest = tuple(lam[:i] + lam[i + 1:])
            for m2, c in self.env.nf(mon + (xi,)).items():
                j = tgt[(m2, rest)]
                s = out.get(j, ZERO) + sign * c
                if s:
                    out[j] = s
                else:
                    out.pop(j, None)
        for i in range(p):
            for j in range(i + 1, p):
                rest = tuple(lam[:i] + lam[i + 1:j] + lam[j + 1:])
                for m, c in self.k.bracket(lam[i], lam[j]).items():
                    ins = _insert_wedge(m, rest)
                    if ins is None:
                        continue
                    wsign, new_wedge = ins
                    jj = tgt[(mon, new_wedge)]
                    s = out.get(jj, ZERO) + Fraction((-1) ** (i + j) * wsign) * c
                    if s:
                        out[jj] = s
                    else:
                        out.pop(jj, None)
        return out

    def d_matrix(self, p: int) -> SparseMatrix:
        """Matrix of d from degree -p to degree -(p-1)."""
        M = SparseMatrix.zero(self.dim(p - 1), self.dim(p))
        for col, (mon, wedge) in enumerate(self.basis[p]):
            for row, c in self.d_of_basis(mon, wedge).items():
                M.set(row, col, c)
        return M

    def complex(self) -> FiniteComplex:
        dims = {-p: self.dim(p) for p in self.basis}
        d = {-p: self.d_matrix(p) for p in self.basis if p >= 1}
        labels = {-p: [self.label(kw) for kw in self.basis[p]] for p in self.basis}
        return FiniteComplex(dims, d, labels=labels)

    def label(self, kw: BasisKey) -> str:
        mon, wedge = kw
        u = " ".join(self.k.names[i] for i in mon) or "1"
        w = "^".join(self.k.names[i] for i in wedge) or "1"
        return f"{u} (x) {w}"

    def augmentation(self) -> SparseMatrix:
        """Row map N^0 -> Q, the coefficient of 1 (x) 1."""
        M = SparseMatrix.zero(1, self.dim(0))
        M.set(0, self.index[0][((), ())], ONE)
        return M

    # -- transport to the enveloping algebra of the graded extension --------

    def to_envelope_monomial(self, kw: BasisKey) -> Tuple[int, ...]:
        mon, wedge = kw
        return mon + tuple(self.k.dim + i for i in wedge)

    def from_envelope_monomial(self, emon: Tuple[int, ...]) -> BasisKey:
        n = self.k.dim
        mon = tuple(i for i in emon if i < n)
        wedge = tuple(i - n for i in emon if i >= n)
        return (mon, wedge)

    def transport_differential_agrees(self) -> bool:
        """The combinatorial differential must match the one computed by
        Leibniz straightening upstairs."""
        for p in sorted(self.basis):
            if p == 0:
                for mon, wedge in self.basis[0]:
                    if self.env.differential({self.to_envelope_monomial((mon, wedge)): ONE}):
                        return False
                continue
            for mon, wedge in self.basis[p]:
                up = self.env.differential(
                    {self.to_envelope_monomial((mon, wedge)): ONE})
                got: dict = {}
                for emon, c in up.items():
                    got[self.index[p - 1][self.from_envelope_monomial(emon)]] = c
                if got != self.d_of_basis(mon, wedge):
                    return False
        return True

    # -- filtration by total degree ------------------------------------------

    def filtration_indices(self, t: int) -> Dict[int, List[int]]:
        """Indices of basis vectors with filtration(u) + p <= t."""
        out = {}
        for p, keys in self.basis.items():
            out[p] = [i for i, (mon, _) in enumerate(keys) if len(mon) + p <= t]
        return out

    def filtration_subcomplex(self, t: int) -> FiniteComplex:
        idx = self.filtration_indices(t)
        dims = {-p: len(idx[p]) for p in self.basis}
        d = {}
        for p in self.basis:
            if p < 1:
                continue
            pos_tgt = {old: new for new, old in enumerate(idx[p - 1])}
            M = SparseMatrix.zero(len(idx[p - 1]), len(idx[p]))
            for col, old in enumerate(idx[p]):
                mon, wedge = self.basis[p][old]
                for row_old, c in self.d_of_basis(mon, wedge).items():
                    # d preserves the total-degree filtration
                    M.set(pos_tgt[row_old], col, c)
            d[-p] = M
        return FiniteComplex(dims, d)

    def graded_piece(self, t: int) -> FiniteComplex:
        """Filtration layer t / (t-1); the induced differential keeps only
        the terms that raise the word length."""
        layer = {}
        for p, keys in self.basis.items():
            layer[p] = [i for i, (mon, _) in enumerate(keys) if len(mon) + p == t]
        dims = {-p: len(layer[p]) for p in self.basis}
        d = {}
        for p in self.basis:
            if p < 1:
                continue
            pos_tgt = {old: new for new, old in enumerate(layer[p - 1])}
            M = SparseMatrix.zero(len(layer[p - 1]), len(layer[p]))
            for col, old in enumerate(layer[p]):
                mon, wedge = self.basis[p][old]
                for row_old, c in self.d_of_basis(mon, wedge).items():
                    tmon, _ = self.basis[p - 1][row_old]
                    if len(tmon) + p - 1 == t:
                        M.set(pos_tgt[row_old], col, c)
            d[-p] = M
        return FiniteComplex(dims, d)

    # -- module structure -----------------------------------------------------

    def left_mult_matrix(self, gen: int, p: int,
                         truncate: bool = False) -> SparseMatrix:
        """Left multiplication by the Lie generator on the degree -p piece.
        Partial: raises TruncationOverflow when the image leaves the
        truncation, unless truncate is set, which drops the overflow."""
        M = SparseMatrix.zero(self.dim(p), self.dim(p))
        bound = self.cutoff - p
        for col, (mon, wedge) in enumerate(self.basis[p]):
            for m2, c in self.env.nf((gen,) + mon).items():
                if len(m2) > bound:
                    if truncate:
                        continue
                    raise TruncationOverflow(
                        f"left multiplication overflows at {self.label((mon, wedge))}")
                M.set(self.index[p][(m2, wedge)], col, c)
        return M

    def ad_derivation_matrix(self, gen_vec: dict, p: int) -> SparseMatrix:
        """The adjoint action extended as a derivation of u (x) w; this is
        the differential of the group action and is always total."""
        M = SparseMatrix.zero(self.dim(p), self.dim(p))
        for col, (mon, wedge) in enumerate(self.basis[p]):
            # derivation over the monomial letters
            for pos, letter in enumerate(mon):
                img = self.k.bracket_vec(gen_vec, {letter: ONE})
                for b, c in img.items():
                    for m2, c2 in self.env.nf(mon[:pos] + (b,) + mon[pos + 1:]).items():
                        i = self.index[p][(m2, wedge)]
                        M.set(i, col, M.get(i, col) + c * c2)
            # derivation over the wedge letters: replacing the letter in
            # slot pos by x_b costs (-1)^pos to pull x_b to the front and
            # the insertion sign to re-sort
            lam = list(wedge)
            for pos, letter in enumerate(lam):
                img = self.k.bracket_vec(gen_vec, {letter: ONE})
                rest = tuple(lam[:pos] + lam[pos + 1:])
                for b, c in img.items():
                    ins = _insert_wedge(b, rest)
                    if ins is None:
                        continue
                    wsign, new_wedge = ins
                    i = self.index[p][(mon, new_wedge)]
                    M.set(i, col, M.get(i, col) + c * Fraction((-1) ** pos) * wsign)
        return M

    def nu_action(self, p: int, phi) -> object:
        """Group action on the degree -p piece induced by an action phi of
        the group on k itself (by weights for tori, ad-triples for SL2)."""
        if isinstance(phi, TrivialAction):
            return TrivialAction(self.dim(p))
        if isinstance(phi, TorusAction):
            weights = []
            for mon, wedge in self.basis[p]:
                w = [0] * phi.rank
                for i in mon + wedge:
                    for a in range(phi.rank):
                        w[a] += phi.weights[i][a]
                weights.append(tuple(w))
            return TorusAction(phi.rank, weights)
        if isinstance(phi, SL2Action):
            mats = [self.ad_derivation_matrix(v, p)
                    for v in ({0: ONE}, {1: ONE}, {2: ONE})]
            return SL2Action(*mats)
        raise UnsupportedGroup(repr(phi))

    def omega_even_matrix(self, gen_vec: dict, p: int,
                          truncate: bool = False) -> SparseMatrix:
        """Defect operator for an even Lie element X: u (x) w maps to
        -(u X) (x) w + u (x) ad(X)w.  Partial (right multiplication can
        overflow) unless truncate drops the overflow."""
        M = SparseMatrix.zero(self.dim(p), self.dim(p))
        bound = self.cutoff - p
        for col, (mon, wedge) in enumerate(self.basis[p]):
            for b, c in gen_vec.items():
                for m2, c2 in self.env.nf(mon + (b,)).items():
                    if len(m2) > bound:
                        if truncate:
                            continue
                        raise TruncationOverflow(
                            f"defect operator overflows at {self.label((mon, wedge))}")
                    i = self.index[p][(m2, wedge)]
                    M.set(i, col, M.get(i, col) - c * c2)
            lam = list(wedge)
            for pos, letter in enumerate(lam):
                img = self.k.bracket_vec(gen_vec, {letter: ONE})
                rest = tuple(lam[:pos] + lam[pos + 1:])
                for b, c in img.items():
                    ins = _insert_wedge(b, rest)
                    if ins is None:
                        continue
                    wsign, new_wedge = ins
                    i = self.index[p][(mon, new_wedge)]
                    M.set(i, col, M.get(i, col) + c * Fraction((-1) ** pos) * wsign)
        return M

    def interior_matrix(self, j: int, p: int,
                        truncate: bool = False) -> SparseMatrix:
        """Degree -1 contraction of generator j: the signed right
        multiplication n -> (-1)^(p+1) n xi upstairs, mapping degree -p
        to degree -(p+1).  The sign makes d i + i d equal the defect
        operator.  Partial: the top filtration layer overflows."""
        if p + 1 > self.k.dim:
            # full wedge already: every image genuinely vanishes
            return SparseMatrix.zero(0, self.dim(p))
        tgt = self.index.get(p + 1)
        M = SparseMatrix.zero(self.dim(p + 1), self.dim(p))
        n = self.k.dim
        bound = self.cutoff - (p + 1)
        sign = Fraction((-1) ** (p + 1))
        for col, kw in enumerate(self.basis[p]):
            word = self.to_envelope_monomial(kw) + (n + j,)
            for emon, c in self.env.nf(word).items():
                mon2, wedge2 = self.from_envelope_monomial(emon)
                if tgt is None or len(mon2) > bound:
                    if truncate:
                        continue
                    raise TruncationOverflow(
                        f"interior operator overflows at {self.label(kw)}")
                M.set(tgt[(mon2, wedge2)], col, sign * c)
        return M


# ---------------------------------------------------------------------------
# relative version


def reordered_algebra(k: LieAlgebra, new_basis: list, names: list):
    """k in a new ordered basis (list of coordinate dicts); returns the
    algebra together with the change-of-basis matrix (columns = new basis
    vectors in old coordinates)."""
    C = SparseMatrix.from_columns(new_basis, k.dim)
    brackets = {}
    for i in range(len(new_basis)):
        for j in range(i + 1, len(new_basis)):
            br = k.bracket_vec(new_basis[i], new_basis[j])
            if not br:
                continue
            sol = solve(C, br)
            assert sol is not None, "new basis does not span"
            brackets[(i, j)] = sol
    return LieAlgebra(names, brackets), C


class RelativeStandardComplex:
    """Standard complex relative to a subalgebra t with a T-stable
    complement p: carrier U(k) (x)_{U(t)} Lambda(k/t), modelled on
    p-monomials times wedges in p.

    The PBW order puts the complement first, so reducing a word means
    peeling trailing t-letters onto the wedge through the adjoint action.
    """

    def __init__(self, k: LieAlgebra, t_embed: SparseMatrix, t_action,
                 cutoff: int):
        self.cutoff = cutoff
        p_basis = invariant_complement(k, t_embed, t_action)
        check_complement(k, t_embed, t_action, p_basis)
        t_cols = [t_embed.column(j) for j in range(t_embed.cols)]
        self.n_p = len(p_basis)
        self.n_t = len(t_cols)
        names = [f"p{i}" for i in range(self.n_p)] + [f"t{i}" for i in range(self.n_t)]
        self.k2, self.change = reordered_algebra(k, p_basis + t_cols, names)
        self.env = Envelope(DGLieAlgebra.from_even(self.k2))
        self.t_action = t_action
        self.p_vectors = p_basis
        # weights of the reordered basis under the torus action, if any
        self.weights = None
        if isinstance(t_action, TorusAction):
            self.weights = []
            for v in p_basis:
                ws = {t_action.weights[b] for b in v}
                assert len(ws) == 1
                self.weights.append(ws.pop())
            self.weights.extend((0,) * t_action.rank for _ in range(self.n_t))

        self.basis: Dict[int, List[BasisKey]] = {}
        self.index: Dict[int, Dict[BasisKey, int]] = {}
        for p in range(min(self.n_p, cutoff) + 1):
            keys = []
            for total in range(cutoff - p + 1):
                for mon in itertools.combinations_with_replacement(
                        range(self.n_p), total):
                    for wedge in itertools.combinations(range(self.n_p), p):
                        keys.append((mon, wedge))
            keys.sort(key=lambda kw: (len(kw[0]), kw[0], kw[1]))
            self.basis[p] = keys
            self.index[p] = {kw: i for i, kw in enumerate(keys)}

    def dim(self, p: int) -> int:
        return len(self.basis.get(p, []))

    def reduce(self, mon: Tuple[int, ...], wedge: Tuple[int, ...],
               coeff: Fraction, out: dict, tgt: dict) -> None:
        """Peel trailing t-letters of mon onto the wedge; accumulate into
        out (index -> coeff) using the index map tgt."""
        if any(i >= self.n_p for i in wedge):
            # wedge letters are classes mod t; t-letters vanish
            return
        if mon and mon[-1] >= self.n_p:
            x = mon[-1]
            head = mon[:-1]
            lam = list(wedge)
            for pos, letter in enumerate(lam):
                for b, c in self.k2.bracket(x, letter).items():
                    assert b < self.n_p, "complement is not stable"
                    ins = _insert_wedge(b, tuple(lam[:pos] + lam[pos + 1:]))
                    if ins is None:
                        continue
                    wsign, new_wedge = ins
                    sgn = Fraction((-1) ** pos) * wsign
                    self.reduce(head, new_wedge, coeff * c * sgn, out, tgt)
            return
        key = (mon, wedge)
        j = tgt[key]
        s = out.get(j, ZERO) + coeff
        if s:
            out[j] = s
        else:
            out.pop(j, None)

    def d_of_basis(self, mon: Tuple[int, ...], wedge: Tuple[int, ...]) -> dict:
        p = len(wedge)
        out: dict = {}
        tgt = self.index[p - 1]
        lam = list(wedge)
        for i, xi in enumerate(lam):
            sign = Fraction((-1) ** i)
            rest = tuple(lam[:i] + lam[i + 1:])
            for m2, c in self.env.nf(mon + (xi,)).items():
                self.reduce(m2, rest, sign * c, out, tgt)
        for i in range(p):
            for j in range(i + 1, p):
                rest = tuple(lam[:i] + lam[i + 1:j] + lam[j + 1:])
                for m, c in self.k2.bracket(lam[i], lam[j]).items():
                    if m >= self.n_p:
                        continue  # projection to k/t
                    ins = _insert_wedge(m, rest)
                    if ins is None:
                        continue
                    wsign, new_wedge = ins
                    self.reduce(mon, new_wedge,
                                Fraction((-1) ** (i + j)) * wsign * c, out, tgt)
        return out

    def d_matrix(self, p: int) -> SparseMatrix:
        M = SparseMatrix.zero(self.dim(p - 1), self.dim(p))
        for col, (mon, wedge) in enumerate(self.basis[p]):
            for row, c in self.d_of_basis(mon, wedge).items():
                M.set(row, col, c)
        return M

    def complex(self) -> FiniteComplex:
        dims = {-p: self.dim(p) for p in self.basis}
        d = {-p: self.d_matrix(p) for p in self.basis if p >= 1}
        return FiniteComplex(dims, d)

    def filtration_subcomplex(self, t: int) -> FiniteComplex:
        idx = {p: [i for i, (mon, _) in enumerate(keys) if len(mon) + p <= t]
               for p, keys in self.basis.items()}
        dims = {-p: len(idx[p]) for p in self.basis}
        d = {}
        for p in self.basis:
            if p < 1:
                continue
            pos_tgt = {old: new for new, old in enumerate(idx[p - 1])}
            M = SparseMatrix.zero(len(idx[p - 1]), len(idx[p]))
            for col, old in enumerate(idx[p]):
                mon, wedge = self.basis[p][old]
                for row_old, c in self.d_of_basis(mon, wedge).items():
                    M.set(pos_tgt[row_old], col, c)
            d[-p] = M
        return FiniteComplex(dims, d)

    def t_weights(self, p: int) -> list:
        """Torus weights of the degree -p basis (requires a torus action)."""
        assert self.weights is not None
        out = []
        for mon, wedge in self.basis[p]:
            w = [0] * len(self.weights[0])
            for i in mon + wedge:
                for a in range(len(w)):
                    w[a] += self.weights[i][a]
            out.append(tuple(w))
        return out

    def nu_action(self, p: int):
        if self.weights is None:
            if isinstance(self.t_action, TrivialAction):
                return TrivialAction(self.dim(p))
            raise UnsupportedGroup("only torus or trivial T here")
        return TorusAction(len(self.weights[0]), self.t_weights(p))

    def check_equivariance(self) -> None:
        """The differential must preserve torus weights."""
        if self.weights is None:
            return
        for p in sorted(self.basis):
            if p < 1:
                continue
            wsrc = self.t_weights(p)
            wtgt = self.t_weights(p - 1)
            M = self.d_matrix(p)
            for (r, c), x in M.data.items():
                if x and wtgt[r] != wsrc[c]:
                    raise NotEquivariant(
                        f"differential mixes weights {wsrc[c]} -> {wtgt[r]}")
