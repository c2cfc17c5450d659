"""Seeded instance generators for randomized suites.

Every generator is deterministic in the caller's Random object.  The
carriers are weight-graded complexes over the rank one pair: direct
sums of strict characters scattered over a degree window, contractible
two-term blocks, morphisms drawn from the actual degree zero morphism
space, and acyclic modules built as cones of automorphisms.  Instances
are checked before being handed out.
"""

from random import Random
from typing import Dict, List

from .akd import AKDModule, DGTag, HomComplex, _same_pair_and_tag
from .catalog import (gl1_character, gl1_pair, sl2_irreducible_matrices,
                      sl2_module, sl2_torus_pair)
from .lie import TorusAction, WeakHCModule, direct_sum_actions
from .linalg import SparseMatrix, frac, rank
from .tri import cone


def direct_sum_akd(parts: List[AKDModule]) -> AKDModule:
    """Blockwise direct sum of tagged modules, in the given order."""
    assert parts, "empty direct sum"
    first = parts[0]
    for X in parts[1:]:
        _same_pair_and_tag(first, X)
    pair, tag = first.pair, first.tag
    degs = sorted({p for X in parts for p in X.degrees()})
    dims = {p: sum(X.dim(p) for X in parts) for p in degs}
    d: Dict[int, SparseMatrix] = {}
    pi: Dict[int, list] = {}
    nu: Dict[int, object] = {}
    interior = {} if tag.kind == "contraction" else None
    for p in degs:
        D = SparseMatrix.zero(sum(X.dim(p + 1) for X in parts), dims[p])
        ro = co = 0
        for X in parts:
            for (r, c), x in X.diff(p).data.items():
                D.set(ro + r, co + c, x)
            ro += X.dim(p + 1)
            co += X.dim(p)
        d[p] = D
        mats = []
        for i in range(pair.g.dim):
            M = SparseMatrix.zero(dims[p], dims[p])
            off = 0
            for X in parts:
                if X.dim(p):
                    for (r, c), x in X.pi[p][i].data.items():
                        M.set(off + r, off + c, x)
                off += X.dim(p)
            mats.append(M)
        pi[p] = mats
        acts = [X.nu[p] for X in parts if X.dim(p)]
        nu[p] = acts[0] if len(acts) == 1 else direct_sum_actions(acts)
        if interior is not None:
            ms = []
            for j in range(tag.t_dim()):
                M = SparseMatrix.zero(sum(X.dim(p - 1) for X in parts),
                                      dims[p])
                ro = co = 0
                for X in parts:
                    for (r, c), x in X.interior_op(p, j).data.items():
                        M.set(ro + r, co + c, x)
                    ro += X.dim(p - 1)
                    co += X.dim(p)
                ms.append(M)
            interior[p] = ms
    return AKDModule(pair, tag, dims, d, pi, nu, interior, name="sum")


def character_block(rng: Random, degree_span=(-2, 2), weight_span=(-2, 2),
                    contractible: bool = False) -> AKDModule:
    """A strict character in a random degree, or a contractible
    two-term block on it when asked."""
    w = rng.randint(weight_span[0], weight_span[1])
    p = rng.randint(degree_span[0], degree_span[1])
    tag = DGTag.contraction(gl1_pair())
    X = gl1_character(w, w)
    if not contractible:
        return AKDModule.single(X, p, tag=tag, name="chi")
    return AKDModule.from_weak_complex(
        {p: X, p + 1: X}, {p: SparseMatrix.identity(1)}, tag=tag,
        name="split")


def random_strict_module(rng: Random, pieces: int = 4, degree_span=(-2, 2),
                         weight_span=(-2, 2)) -> AKDModule:
    """Direct sum of strict characters and contractible blocks."""
    parts = [character_block(rng, degree_span, weight_span,
                             contractible=rng.random() < 0.5)
             for _ in range(pieces)]
    return direct_sum_akd(parts)


def random_morphism(rng: Random, V: AKDModule, W: AKDModule,
                    coeff_span=(-2, 2)) -> dict:
    """Random rational combination of a basis of the morphism space."""
    out: Dict[int, SparseMatrix] = {}
    for m in HomComplex(V, W).morphisms():
        c = frac(rng.randint(coeff_span[0], coeff_span[1]))
        if not c:
            continue
        for p, M in m.items():
            blk = out.get(p)
            out[p] = M.scale(c) if blk is None else blk + M.scale(c)
    return {p: M for p, M in out.items() if not M.is_zero()}


def random_automorphism(rng: Random, V: AKDModule) -> dict:
    """Invertible degree 0 self-morphism: a scaled identity plus a
    random morphism, retried until every block has full rank."""
    ident = {p: SparseMatrix.identity(V.dim(p)) for p in V.degrees()}
    for _ in range(8):
        f = random_morphism(rng, V, V)
        c = frac(rng.randint(1, 3))
        g = {p: ident[p].scale(c)
             + f.get(p, SparseMatrix.zero(V.dim(p), V.dim(p)))
             for p in V.degrees()}
        if all(rank(g[p]) == V.dim(p) for p in V.degrees()):
            return g
    return ident


def random_acyclic_module(rng: Random, pieces: int = 3) -> AKDModule:
    """Cone of an automorphism, sometimes padded with a contractible
    block; checked acyclic before returning."""
    V = random_strict_module(rng, pieces=pieces)
    C = cone(V, V, random_automorphism(rng, V)).cone
    if rng.random() < 0.5:
        C = direct_sum_akd([C, character_block(rng, contractible=True)])
    assert not C.complex().cohomology_dims()
    return C


# ---------------------------------------------------------------------------
# the same menagerie over sl2 restricted to its diagonal torus


def sl2_block(rng: Random, top: int = None, degree_span=(-2, 2),
              contractible: bool = False) -> AKDModule:
    """An irreducible sl2 module in a random degree, or a contractible
    two-term block on it."""
    pair = sl2_torus_pair()
    tag = DGTag.contraction(pair)
    m = rng.randint(0, 3) if top is None else top
    p = rng.randint(degree_span[0], degree_span[1])
    X = sl2_module(pair, m)
    if not contractible:
        return AKDModule.single(X, p, tag=tag, name=f"irr{m}")
    return AKDModule.from_weak_complex(
        {p: X, p + 1: X}, {p: SparseMatrix.identity(m + 1)}, tag=tag,
        name=f"irr{m}-split")


def sl2_strict_module(rng: Random, pieces: int = 3,
                      degree_span=(-2, 2)) -> AKDModule:
    """Direct sum of irreducibles and contractible blocks on them."""
    parts = [sl2_block(rng, degree_span=degree_span,
                       contractible=rng.random() < 0.5)
             for _ in range(pieces)]
    return direct_sum_akd(parts)


def sl2_acyclic_module(rng: Random, pieces: int = 2) -> AKDModule:
    """Cone of an automorphism over the torus-restricted sl2 pair."""
    V = sl2_strict_module(rng, pieces=pieces)
    C = cone(V, V, random_automorphism(rng, V)).cone
    if rng.random() < 0.5:
        C = direct_sum_akd([C, sl2_block(rng, contractible=True)])
    assert not C.complex().cohomology_dims()
    return C


def twisted_acyclic_block(top: int = 2, shift: int = 1, scale: int = 1,
                          degree: int = 0) -> AKDModule:
    """Two-term acyclic block that is weak but not strict.

    The torus weights sit shift steps off the h-eigenvalues, so every
    defect operator is shift times the identity; the contraction
    compensating it is the defect composed with the inverse of the
    connecting isomorphism."""
    assert shift and scale
    pair = sl2_torus_pair()
    tag = DGTag.contraction(pair)
    e, h, f = sl2_irreducible_matrices(top)
    n = top + 1
    nu = TorusAction(1, [(top - 2 * s + shift,) for s in range(n)])
    X = WeakHCModule(pair, [e, h, f], nu, name=f"irr{top}+{shift}")
    D = SparseMatrix.identity(n).scale(frac(scale))
    hom = SparseMatrix.identity(n).scale(frac(shift) / frac(scale))
    dims = {degree: n, degree + 1: n}
    return AKDModule(pair, tag, dims, {degree: D},
                     {degree: list(X.pi), degree + 1: list(X.pi)},
                     {degree: nu, degree + 1: nu},
                     {degree + 1: [hom]}, name="twisted")
