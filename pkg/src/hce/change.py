"""Change-of-structure functors between the tagged module categories.

extend_C_t tensors a complex with the exterior algebra of its tagged
subalgebra and twists the differential by the defect operators.  The
result carries honest contraction operators, and the inclusion of the
wedge-degree-zero block (extend_unit) is the unit of the adjunction
between extension and forgetting contractions.

nt_coinvariants collapses the images of the defect and contraction
operators degreewise; it is left adjoint to inflate_strict, which
re-tags a strict complex with zero contraction operators.

induce_from_group builds the left-multiplication module on a window of
enveloping-algebra monomials tensored with a group representation.
Products that leave the window are errors, never silent drops.
"""

from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .akd import AKDModule, DGTag, _nu_generators, _sign, wedge_basis
from .dg import DGLieAlgebra, Envelope
from .errors import (
    MixedAlgebras,
    NotAModule,
    NotEquivariant,
    TruncationOverflow,
    UnsupportedGroup,
)
from .lie import (
    GroupAction,
    HCPair,
    ProductAction,
    SL2Action,
    TorusAction,
    TrivialAction,
    WeakHCModule,
    derive_phi,
    direct_sum_actions,
    quotient_action,
    quotient_matrix,
    restrict_action,
    tensor_actions,
)
from .linalg import ONE, ZERO, SparseMatrix, Subspace
from .standard import _insert_wedge


# ---------------------------------------------------------------------------
# exterior powers of an action


def _wedge_derivation(M: SparseMatrix, p: int, n: int) -> SparseMatrix:
    """Derivation extension of an n x n matrix to the p-th wedge power."""
    combos = wedge_basis(n, p)
    idx = {S: i for i, S in enumerate(combos)}
    out = SparseMatrix.zero(len(combos), len(combos))
    for ci, S in enumerate(combos):
        for pos in range(p):
            rest = S[:pos] + S[pos + 1:]
            for r, x in M.column(S[pos]).items():
                got = _insert_wedge(r, rest)
                if got is None:
                    continue
                wsign, newS = got
                ri = idx[newS]
                out.set(ri, ci, out.get(ri, ci)
                        + x * Fraction((-1) ** pos * wsign))
    return out


def wedge_power_action(act: GroupAction, p: int) -> GroupAction:
    """Induced action on the p-th exterior power of the carrier."""
    combos = wedge_basis(act.dim, p)
    if isinstance(act, TrivialAction):
        return TrivialAction(len(combos))
    if isinstance(act, TorusAction):
        weights = [tuple(sum(act.weights[s][k] for s in S)
                         for k in range(act.rank)) for S in combos]
        return TorusAction(act.rank, weights)
    if isinstance(act, SL2Action):
        n = act.dim
        return SL2Action(_wedge_derivation(act.e, p, n),
                         _wedge_derivation(act.h, p, n),
                         _wedge_derivation(act.f, p, n))
    if isinstance(act, ProductAction):
        return ProductAction([wedge_power_action(f, p) for f in act.factors])
    raise UnsupportedGroup(repr(act))


# ---------------------------------------------------------------------------
# extension: from defect operators to contraction operators


def extend_C_t(V: AKDModule) -> AKDModule:
    """Tensor with the exterior algebra of the tagged subalgebra.

    Degree n of the result is the sum over wedge degrees p of
    V^{n+p} (x) Lambda^p, blocks in ascending p, basis (i, S) with i
    major.  The differential is the input differential on the left
    factor plus a Koszul-style part that peels wedge letters through
    the defect operators and contracts wedge pairs through the
    subalgebra bracket.  Contraction operators append wedge letters.

    Requires the ambient group to stabilize the embedded subalgebra
    under its adjoint action (the wedge factor must carry a group
    action for the result to be equivariant).
    """
    if V.tag.kind == "contraction":
        raise MixedAlgebras("input already carries contraction operators")
    pair = V.pair
    sub = V.tag.subgroup
    sub.validate(pair.group)
    tag = DGTag("contraction", sub)
    name = f"C_t({V.name})" if V.name else "C_t"
    m = sub.lie().dim
    if m == 0 or not V.dims:
        return AKDModule(pair, tag, dict(V.dims), dict(V.d),
                         {p: list(ms) for p, ms in V.pi.items()},
                         dict(V.nu), None, name=name)

    t_lie = sub.lie()
    phi_k = derive_phi(pair.k, pair.group, SparseMatrix.identity(pair.k.dim))
    try:
        ad_t = restrict_action(phi_k, [sub.embed.column(j) for j in range(m)])
    except NotEquivariant:
        raise UnsupportedGroup(
            "ambient group does not stabilize the tagged subalgebra")
    combos = [wedge_basis(m, p) for p in range(m + 1)]
    windex = [{S: i for i, S in enumerate(c)} for c in combos]
    wedge_acts = [wedge_power_action(ad_t, p) for p in range(m + 1)]

    blocks: Dict[int, Dict[int, int]] = {}
    dims: Dict[int, int] = {}
    for n in sorted({q - p for q in V.degrees() for p in range(m + 1)}):
        off = 0
        bl = {}
        for p in range(m + 1):
            dv = V.dim(n + p)
            if dv:
                bl[p] = off
                off += dv * len(combos[p])
        if off:
            blocks[n] = bl
            dims[n] = off

    omega_cache: Dict[Tuple[int, int], SparseMatrix] = {}

    def omega(q, j):
        if (q, j) not in omega_cache:
            omega_cache[(q, j)] = V.omega_even(q, j)
        return omega_cache[(q, j)]

    pi: Dict[int, list] = {}
    nu: Dict[int, GroupAction] = {}
    for n, bl in blocks.items():
        mats = []
        for gen in range(pair.g.dim):
            M = SparseMatrix.zero(dims[n], dims[n])
            for p, off in bl.items():
                w = len(combos[p])
                for (r, i), x in V.pi[n + p][gen].data.items():
                    for si in range(w):
                        M.set(off + r * w + si, off + i * w + si, x)
            mats.append(M)
        pi[n] = mats
        nu[n] = direct_sum_actions(
            [tensor_actions(V.nu[n + p], wedge_acts[p]) for p in sorted(bl)])

    d: Dict[int, SparseMatrix] = {}
    for n in blocks:
        if (n + 1) not in blocks:
            continue
        M = SparseMatrix.zero(dims[n + 1], dims[n])
        bl, bl1 = blocks[n], blocks[n + 1]
        for p, off in bl.items():
            w = len(combos[p])
            vdeg = n + p
            if p in bl1:
                off1 = bl1[p]
                for (r, i), x in V.diff(vdeg).data.items():
                    for si in range(w):
                        M.set(off1 + r * w + si, off + i * w + si, x)
            if p == 0:
                continue
            # both twist parts keep the left factor in degree vdeg
            offb = bl1[p - 1]
            wb = len(combos[p - 1])
            for S in combos[p]:
                si = windex[p][S]
                for pos in range(p):
                    om = omega(vdeg, S[pos])
                    if om.is_zero():
                        continue
                    ti = windex[p - 1][S[:pos] + S[pos + 1:]]
                    sg = _sign(vdeg + pos + 1)
                    for (r, i), x in om.data.items():
                        rr, cc = offb + r * wb + ti, off + i * w + si
                        M.set(rr, cc, M.get(rr, cc) + sg * x)
                for i1 in range(p):
                    for i2 in range(i1 + 1, p):
                        br = t_lie.bracket(S[i1], S[i2])
                        if not br:
                            continue
                        rest = tuple(x for t, x in enumerate(S)
                                     if t not in (i1, i2))
                        for b, cb in br.items():
                            got = _insert_wedge(b, rest)
                            if got is None:
                                continue
                            wsg, newS = got
                            ti = windex[p - 1][newS]
                            val = _sign(vdeg) * Fraction(
                                (-1) ** (i1 + i2) * wsg) * cb
                            for i in range(V.dim(vdeg)):
                                rr = offb + i * wb + ti
                                cc = off + i * w + si
                                M.set(rr, cc, M.get(rr, cc) + val)
        d[n] = M

    interior: Dict[int, list] = {}
    for n in blocks:
        if (n - 1) not in blocks:
            continue
        sg = _sign(n + 1)
        mats = []
        for j in range(m):
            M = SparseMatrix.zero(dims[n - 1], dims[n])
            for p, off in blocks[n].items():
                if p + 1 > m or (p + 1) not in blocks[n - 1]:
                    continue
                offt = blocks[n - 1][p + 1]
                w, wt = len(combos[p]), len(combos[p + 1])
                for S in combos[p]:
                    if j in S:
                        continue
                    val = sg * Fraction((-1) ** sum(1 for r in S if r > j))
                    si = windex[p][S]
                    ti = windex[p + 1][tuple(sorted(S + (j,)))]
                    for i in range(V.dim(n + p)):
                        M.set(offt + i * wt + ti, off + i * w + si, val)
            mats.append(M)
        interior[n] = mats

    return AKDModule(pair, tag, dims, d, pi, nu, interior, name=name)


def extend_unit(V: AKDModule, C: AKDModule) -> Dict[int, SparseMatrix]:
    """Inclusion of V as the wedge-degree-zero block of its extension.

    A morphism V -> C.forget("defect"); the extension's defect operators
    are block diagonal and restrict to those of V on this block.
    """
    unit = {}
    for q in V.degrees():
        # block p = 0 always sits at offset 0 when present
        f = SparseMatrix.zero(C.dim(q), V.dim(q))
        for i in range(V.dim(q)):
            f.set(i, i, ONE)
        unit[q] = f
    return unit


# ---------------------------------------------------------------------------
# coinvariants and inflation


def nt_coinvariants(V: AKDModule):
    """Quotient by the images of all tagged operators, degreewise.

    Kills the images of the defect operators and, for contraction kind,
    of the contraction operators.  The killed span must be stable under
    the differential, the algebra action and the group action; inputs
    violating that are reported, not patched.  Returns (quotient,
    projection maps); the quotient keeps the input's tag with zero
    contraction operators, making the projection a morphism.
    """
    pair = V.pair
    m = V.tag.t_dim()
    spans = {p: Subspace(V.dim(p)) for p in V.degrees()}
    if V.tag.kind != "scalars":
        for p in V.degrees():
            ops = [V.omega_even(p, j) for j in range(m)]
            if V.tag.kind == "contraction":
                ops += [V.interior_op(p + 1, j) for j in range(m)]
            for M in ops:
                for c in range(M.cols):
                    col = M.column(c)
                    if col:
                        spans[p].add(col)
    for p in V.degrees():
        for v in spans[p].basis():
            img = V.diff(p).apply(v)
            red = spans[p + 1].reduce(img) if (p + 1) in spans else img
            if red:
                raise NotAModule(
                    f"degree {p}: killed span does not map into the next one")
            for M in V.pi[p]:
                if spans[p].reduce(M.apply(v)):
                    raise NotAModule(
                        f"degree {p}: killed span is not stable under pi")
            for M in _nu_generators(V, p):
                if spans[p].reduce(M.apply(v)):
                    raise NotEquivariant(
                        f"degree {p}: killed span is not stable under nu")

    reps = {p: spans[p].complement_pivots() for p in V.degrees()}
    dims = {p: len(reps[p]) for p in V.degrees()}

    def in_reps(p, vec):
        red = spans[p].reduce(vec)
        return {t: red[b] for t, b in enumerate(reps[p]) if red.get(b)}

    proj: Dict[int, SparseMatrix] = {}
    for p in V.degrees():
        if not dims[p]:
            continue
        P = SparseMatrix.zero(dims[p], V.dim(p))
        for i in range(V.dim(p)):
            for t, x in in_reps(p, {i: ONE}).items():
                P.set(t, i, x)
        proj[p] = P
    d: Dict[int, SparseMatrix] = {}
    for p in V.degrees():
        if not dims[p] or not dims.get(p + 1):
            continue
        D = SparseMatrix.zero(dims[p + 1], dims[p])
        for t, b in enumerate(reps[p]):
            for s, x in in_reps(p + 1, V.diff(p).apply({b: ONE})).items():
                D.set(s, t, x)
        d[p] = D
    pi = {p: [quotient_matrix(M, spans[p], reps[p]) for M in V.pi[p]]
          for p in V.degrees() if dims[p]}
    nu = {p: quotient_action(V.nu[p], spans[p], reps[p])
          for p in V.degrees() if dims[p]}
    name = f"{V.name}_coinv" if V.name else "coinv"
    W = AKDModule(pair, V.tag, dims, d, pi, nu, None, name=name)
    return W, proj


def inflate_strict(V: AKDModule) -> AKDModule:
    """Re-tag a strict complex with zero contraction operators.

    The section of nt_coinvariants on complexes whose defect operators
    all vanish; anything non-strict is rejected.
    """
    if V.tag.kind == "contraction":
        raise MixedAlgebras("input already carries contraction operators")
    for p in V.degrees():
        for j in range(V.tag.t_dim()):
            if not V.omega_even(p, j).is_zero():
                raise NotAModule(
                    f"degree {p} is not strict along the subgroup")
    return AKDModule(V.pair, DGTag("contraction", V.tag.subgroup),
                     dict(V.dims), dict(V.d),
                     {p: list(ms) for p, ms in V.pi.items()},
                     dict(V.nu), None, name=V.name)


# ---------------------------------------------------------------------------
# induction from a group representation


class InducedModule:
    """Left-multiplication module on a monomial window tensor a
    representation.

    Carrier basis: (mon, j) with mon a normal-form monomial of length at
    most cutoff, monomial major.  The algebra acts by left
    multiplication; a product leaving the window is an error carrying
    the offending monomial, unless truncate is requested.  The group
    acts diagonally: on monomials through the pair's algebraic action,
    letter by letter (normal forms never grow, so that side is always
    total), and on the right factor as given.
    """

    def __init__(self, pair: HCPair, w_action: GroupAction, cutoff: int,
                 name: str = ""):
        assert cutoff >= 0
        assert w_action.group == pair.group, "representation of the wrong group"
        self.pair = pair
        self.w = w_action
        self.cutoff = cutoff
        self.env = Envelope(DGLieAlgebra.from_even(pair.g))
        self.mons: List[tuple] = sorted(self.env.monomials(cutoff),
                                        key=lambda t: (len(t), t))
        self.mindex = {t: i for i, t in enumerate(self.mons)}
        self.dim = len(self.mons) * w_action.dim
        self.name = name or f"ind({pair.g.dim},{w_action.dim})@{cutoff}"

    def _label(self, mon: tuple) -> str:
        return " ".join(self.pair.g.names[i] for i in mon) if mon else "1"

    def pi_matrix(self, gen: int, truncate: bool = False) -> SparseMatrix:
        M = SparseMatrix.zero(self.dim, self.dim)
        wd = self.w.dim
        for t, mon in enumerate(self.mons):
            for mon2, c in self.env.nf((gen,) + mon).items():
                if len(mon2) > self.cutoff:
                    if truncate:
                        continue
                    raise TruncationOverflow(
                        "left multiplication by %s leaves the window at %s"
                        % (self.pair.g.names[gen], self._label(mon2)))
                r = self.mindex[mon2]
                for j in range(wd):
                    M.set(r * wd + j, t * wd + j, c)
        return M

    def _derivation_on_monomials(self, A: SparseMatrix) -> SparseMatrix:
        nm = len(self.mons)
        out = SparseMatrix.zero(nm, nm)
        for t, mon in enumerate(self.mons):
            for pos in range(len(mon)):
                for r, x in A.column(mon[pos]).items():
                    word = mon[:pos] + (r,) + mon[pos + 1:]
                    for mon2, c in self.env.nf(word).items():
                        i = self.mindex[mon2]
                        out.set(i, t, out.get(i, t) + x * c)
        return out

    def _monomial_action(self, phi: GroupAction) -> GroupAction:
        if isinstance(phi, TrivialAction):
            return TrivialAction(len(self.mons))
        if isinstance(phi, TorusAction):
            weights = [tuple(sum(phi.weights[l][k] for l in mon)
                             for k in range(phi.rank)) for mon in self.mons]
            return TorusAction(phi.rank, weights)
        if isinstance(phi, SL2Action):
            return SL2Action(self._derivation_on_monomials(phi.e),
                             self._derivation_on_monomials(phi.h),
                             self._derivation_on_monomials(phi.f))
        if isinstance(phi, ProductAction):
            return ProductAction([self._monomial_action(f)
                                  for f in phi.factors])
        raise UnsupportedGroup(repr(phi))

    def nu(self) -> GroupAction:
        return tensor_actions(self._monomial_action(self.pair.phi), self.w)

    def unit(self) -> SparseMatrix:
        """Inclusion of the representation at the empty monomial."""
        wd = self.w.dim
        base = self.mindex[()] * wd
        U = SparseMatrix.zero(self.dim, wd)
        for j in range(wd):
            U.set(base + j, j, ONE)
        return U

    def counit(self) -> SparseMatrix:
        """Coefficient of the empty monomial."""
        wd = self.w.dim
        base = self.mindex[()] * wd
        E = SparseMatrix.zero(wd, self.dim)
        for j in range(wd):
            E.set(j, base + j, ONE)
        return E

    def weak_module(self, truncate: bool = True) -> WeakHCModule:
        """Weak module on the window.  With truncate, boundary products
        are dropped, so relation checks are only meaningful below the
        top filtration layer."""
        pi = [self.pi_matrix(i, truncate=truncate)
              for i in range(self.pair.g.dim)]
        return WeakHCModule(self.pair, pi, self.nu(), name=self.name)


def induce_from_group(pair: HCPair, w_action: GroupAction, cutoff: int,
                      name: str = "") -> InducedModule:
    """Monomial-window induction of a group representation to the pair."""
    return InducedModule(pair, w_action, cutoff, name=name)
