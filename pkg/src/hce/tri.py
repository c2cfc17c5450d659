"""Translation, cones, semisplit extensions, and smart truncation.

The degree-shifting layer on tagged complexes.  Shifting a complex one
step negates the differential and any contraction operators; the cone
of a morphism stacks the shifted source over the target with a lower
triangular differential, and its two structure maps embed every
morphism in a triangle whose cohomology sequence is exact.  A
degreewise split short exact sequence is turned back into a cone
presentation by reading off the connecting block of the middle
differential, and the two-sided truncation cuts a complex at one
degree without disturbing cohomology on either side of the cut.

Triangles are kept concrete: a morphism, its cone, and the structure
maps.  No localized category is ever formed; the checkable
consequences (long exact sequences, two-out-of-three, reconstruction
from semisplit data) are what the functions here compute.
"""

from typing import Dict, Optional

from .akd import (
    AKDModule,
    _nu_generators,
    _same_pair_and_tag,
    _sign,
    is_akd_morphism,
)
from .errors import NotAMorphism, NotSemisplit
from .lie import (
    apply_on_basis,
    direct_sum_actions,
    quotient_action,
    quotient_matrix,
    restrict_action,
)
from .linalg import (
    ONE,
    SparseMatrix,
    Subspace,
    induced_on_cohomology,
    kernel_basis,
    rank,
    solve,
)


def _paste(M: SparseMatrix, block: SparseMatrix, r0: int, c0: int,
           negate: bool = False) -> None:
    for (r, c), x in block.data.items():
        M.set(r0 + r, c0 + c, -x if negate else x)


# ---------------------------------------------------------------------------
# translation


def translate(V: AKDModule, n: int = 1) -> AKDModule:
    """Shift a module n steps down: degree p of the result is degree
    p + n of the input.

    The differential and any contraction operators change sign once per
    step; the algebra and group actions only move.  n = 0 returns V
    itself and opposite shifts undo each other.
    """
    if n == 0:
        return V
    sgn = _sign(n)
    dims = {p - n: m for p, m in V.dims.items()}
    d = {p - n: M.scale(sgn) for p, M in V.d.items()}
    pi = {p - n: list(mats) for p, mats in V.pi.items()}
    nu = {p - n: act for p, act in V.nu.items()}
    interior = None
    if V.tag.kind == "contraction":
        interior = {p - n: [M.scale(sgn) for M in mats]
                    for p, mats in V.interior.items()}
    return AKDModule(V.pair, V.tag, dims, d, pi, nu, interior,
                     name="T^%d(%s)" % (n, V.name))


def translate_map(f: dict, n: int = 1) -> dict:
    """Shift a degree 0 morphism along the translation: block p of the
    result is block p + n of the input."""
    return {p - n: M for p, M in f.items()}


def compose_maps(second: dict, first: dict) -> dict:
    """Degreewise composite of degree 0 morphisms; zero blocks dropped."""
    out: Dict[int, SparseMatrix] = {}
    for p, F in first.items():
        G = second.get(p)
        if G is not None:
            M = G * F
            if not M.is_zero():
                out[p] = M
    return out


# ---------------------------------------------------------------------------
# cones


class Triangle:
    """A morphism f: source -> target together with its cone.

    include embeds the target as the lower block of the cone, project
    retracts the cone onto the shifted source; shifted caches the
    translated source so exactness checks can reuse it.
    """

    def __init__(self, source: AKDModule, target: AKDModule, f: dict,
                 cone_module: AKDModule, include: dict, project: dict,
                 shifted: AKDModule):
        self.source = source
        self.target = target
        self.f = f
        self.cone = cone_module
        self.include = include
        self.project = project
        self.shifted = shifted


def cone(V: AKDModule, W: AKDModule, f: dict) -> Triangle:
    """Mapping cone of a morphism f: V -> W.

    Degree p of the cone carries V^{p+1} followed by W^p; the
    differential has blocks -d_V, f, d_W in lower triangular position,
    contractions on the shifted block change sign.  Raises NotAMorphism
    unless f satisfies every axiom.
    """
    if not is_akd_morphism(V, W, f):
        raise NotAMorphism("cone of a map that fails the morphism axioms")
    pair, tag = V.pair, V.tag
    degs = sorted({p - 1 for p in V.degrees()} | set(W.degrees()))
    dims = {p: V.dim(p + 1) + W.dim(p) for p in degs}
    d: Dict[int, SparseMatrix] = {}
    pi: Dict[int, list] = {}
    nu: Dict[int, object] = {}
    interior: Optional[dict] = {} if tag.kind == "contraction" else None
    include: Dict[int, SparseMatrix] = {}
    project: Dict[int, SparseMatrix] = {}
    for p in degs:
        nv, nw = V.dim(p + 1), W.dim(p)
        D = SparseMatrix.zero(V.dim(p + 2) + W.dim(p + 1), nv + nw)
        _paste(D, V.diff(p + 1), 0, 0, negate=True)
        fp = f.get(p + 1)
        if fp is not None:
            _paste(D, fp, V.dim(p + 2), 0)
        _paste(D, W.diff(p), V.dim(p + 2), nv)
        d[p] = D
        if not nv + nw:
            continue
        mats = []
        for i in range(pair.g.dim):
            M = SparseMatrix.zero(nv + nw, nv + nw)
            if nv:
                _paste(M, V.pi[p + 1][i], 0, 0)
            if nw:
                _paste(M, W.pi[p][i], nv, nv)
            mats.append(M)
        pi[p] = mats
        parts = []
        if nv:
            parts.append(V.nu[p + 1])
        if nw:
            parts.append(W.nu[p])
        nu[p] = parts[0] if len(parts) == 1 else direct_sum_actions(parts)
        if interior is not None:
            ms = []
            for j in range(tag.t_dim()):
                M = SparseMatrix.zero(V.dim(p) + W.dim(p - 1), nv + nw)
                _paste(M, V.interior_op(p + 1, j), 0, 0, negate=True)
                _paste(M, W.interior_op(p, j), V.dim(p), nv)
                ms.append(M)
            interior[p] = ms
        if nw:
            inc = SparseMatrix.zero(nv + nw, nw)
            for r in range(nw):
                inc.set(nv + r, r, ONE)
            include[p] = inc
        if nv:
            pr = SparseMatrix.zero(nv, nv + nw)
            for c in range(nv):
                pr.set(c, c, ONE)
            project[p] = pr
    C = AKDModule(pair, tag, dims, d, pi, nu, interior,
                  name="cone(%s->%s)" % (V.name, W.name))
    return Triangle(V, W, dict(f), C, include, project, translate(V, 1))


def cone_map(src: Triangle, dst: Triangle, g: dict, h: dict) -> dict:
    """Map between cones induced by a commuting square.

    g: src.source -> dst.source and h: src.target -> dst.target must
    satisfy h src.f = dst.f g; the induced map is the shifted g beside
    h in block form.
    """
    out: Dict[int, SparseMatrix] = {}
    for p in sorted(set(src.cone.degrees()) | set(dst.cone.degrees())):
        rows, cols = dst.cone.dim(p), src.cone.dim(p)
        if not rows or not cols:
            continue
        M = SparseMatrix.zero(rows, cols)
        gp = g.get(p + 1)
        if gp is not None:
            _paste(M, gp, 0, 0)
        hp = h.get(p)
        if hp is not None:
            _paste(M, hp, dst.source.dim(p + 1), src.source.dim(p + 1))
        if not M.is_zero():
            out[p] = M
    return out


def triangle_les_exact(tri: Triangle) -> bool:
    """Exactness of the cohomology sequence of a triangle, by ranks.

    At each node the incoming and outgoing induced maps must compose to
    zero and their ranks must fill the middle dimension.  The shifted
    source shares cohomology representatives with the source one degree
    up, so no extra identification is needed.
    """
    cv = tri.source.complex()
    cw = tri.target.complex()
    cc = tri.cone.complex()
    ct = tri.shifted.complex()
    hf = induced_on_cohomology(tri.f, cv, cw)
    hi = induced_on_cohomology(tri.include, cw, cc)
    hp = induced_on_cohomology(tri.project, cc, ct)
    dv = cv.cohomology_dims()
    dw = cw.cohomology_dims()
    dc = cc.cohomology_dims()

    def rk(M):
        return rank(M) if M is not None else 0

    def dies(first, second):
        return (first is None or second is None
                or (second * first).is_zero())

    degs = set(dv) | set(dw) | set(dc) | {p - 1 for p in dv}
    for p in sorted(degs):
        if rk(hf.get(p)) + rk(hi.get(p)) != dw.get(p, 0):
            return False
        if not dies(hf.get(p), hi.get(p)):
            return False
        if rk(hi.get(p)) + rk(hp.get(p)) != dc.get(p, 0):
            return False
        if not dies(hi.get(p), hp.get(p)):
            return False
        if rk(hp.get(p)) + rk(hf.get(p + 1)) != dv.get(p + 1, 0):
            return False
        if not dies(hp.get(p), hf.get(p + 1)):
            return False
    return True


# ---------------------------------------------------------------------------
# semisplit short exact sequences


def _graded_morphism(V: AKDModule, W: AKDModule, f: dict) -> bool:
    # degree 0 intertwiner of pi, nu and contractions; d not consulted
    _same_pair_and_tag(V, W)
    for p in sorted(set(V.degrees()) | set(W.degrees())):
        fp = f.get(p, SparseMatrix.zero(W.dim(p), V.dim(p)))
        if fp.shape() != (W.dim(p), V.dim(p)):
            return False
        if not V.dim(p):
            continue
        wpi = W.pi.get(p)
        for i in range(V.pair.g.dim):
            rhs = (wpi[i] * fp if wpi is not None
                   else SparseMatrix.zero(0, V.dim(p)))
            if fp * V.pi[p][i] != rhs:
                return False
        for A, B in zip(_nu_generators(V, p), _nu_generators(W, p, like=V)):
            if fp * A != B * fp:
                return False
        if V.tag.kind == "contraction":
            flow = f.get(p - 1, SparseMatrix.zero(W.dim(p - 1), V.dim(p - 1)))
            for j in range(V.tag.t_dim()):
                if flow * V.interior_op(p, j) != W.interior_op(p, j) * fp:
                    return False
    return True


class SemisplitSES:
    """Short exact sequence of tagged modules, split degree by degree.

    include: U -> V and project: V -> W are chain morphisms forming an
    exact sequence in every degree.  splitting: W -> V is a section of
    project that intertwines the algebra action, the group action, and
    any contractions, but need not commute with the differential.
    """

    def __init__(self, U: AKDModule, V: AKDModule, W: AKDModule,
                 include: dict, project: dict, splitting: dict):
        self.U = U
        self.V = V
        self.W = W
        self.include = dict(include)
        self.project = dict(project)
        self.splitting = dict(splitting)

    def degrees(self) -> list:
        return sorted(set(self.U.degrees()) | set(self.V.degrees())
                      | set(self.W.degrees()))

    def validate(self) -> None:
        if not is_akd_morphism(self.U, self.V, self.include):
            raise NotAMorphism("inclusion fails the morphism axioms")
        if not is_akd_morphism(self.V, self.W, self.project):
            raise NotAMorphism("projection fails the morphism axioms")
        for p in self.degrees():
            du, dv, dw = self.U.dim(p), self.V.dim(p), self.W.dim(p)
            if du + dw != dv:
                raise NotSemisplit(
                    "degree %d is not exact: %d + %d != %d" % (p, du, dw, dv))
            inc = self.include.get(p, SparseMatrix.zero(dv, du))
            pr = self.project.get(p, SparseMatrix.zero(dw, dv))
            if du and rank(inc) != du:
                raise NotSemisplit("inclusion drops rank at degree %d" % p)
            if dw and rank(pr) != dw:
                raise NotSemisplit("projection drops rank at degree %d" % p)
            if not (pr * inc).is_zero():
                raise NotSemisplit(
                    "composite through the middle is nonzero at degree %d" % p)
            s = self.splitting.get(p, SparseMatrix.zero(dv, dw))
            if pr * s != SparseMatrix.identity(dw):
                raise NotSemisplit("splitting is not a section at degree %d" % p)
        if not _graded_morphism(self.W, self.V, self.splitting):
            raise NotSemisplit("splitting does not intertwine the operators")


def twisted_extension(U: AKDModule, W: AKDModule, delta: dict) -> SemisplitSES:
    """Semisplit extension of W by U with the given connecting block.

    delta must be a degree 0 morphism W -> T(U); the middle term is
    W + U degreewise with differential blocks d_W, delta, d_U.
    """
    tri = cone(translate(W, -1), U, translate_map(delta, -1))
    V = tri.cone
    splitting = {}
    for p in W.degrees():
        M = SparseMatrix.zero(V.dim(p), W.dim(p))
        for r in range(W.dim(p)):
            M.set(r, r, ONE)
        splitting[p] = M
    return SemisplitSES(U, V, W, tri.include, tri.project, splitting)


def semisplit_to_cone(S: SemisplitSES):
    """Present the middle term of a semisplit sequence as a cone.

    Returns (delta, tri, iso).  delta is the connecting block of d_V in
    the splitting decomposition, a degree 0 morphism W -> T(U); tri is
    the cone triangle of its unshift T^{-1}(W) -> U; iso maps V onto
    the cone degreewise bijectively, first the W coordinates then the
    U coordinates.
    """
    S.validate()
    U, V, W = S.U, S.V, S.W
    comp: Dict[int, SparseMatrix] = {}
    for p in V.degrees():
        du = U.dim(p)
        if not du:
            continue
        n = V.dim(p)
        resid = SparseMatrix.identity(n)
        s = S.splitting.get(p)
        pr = S.project.get(p)
        if s is not None and pr is not None:
            resid = resid - s * pr
        inc = S.include.get(p, SparseMatrix.zero(n, du))
        out = SparseMatrix.zero(du, n)
        for j in range(n):
            col = resid.column(j)
            sol = solve(inc, col) if col else {}
            assert sol is not None, "exactness puts the residual in the image"
            for i, x in sol.items():
                out.set(i, j, x)
        comp[p] = out
    delta: Dict[int, SparseMatrix] = {}
    for p in W.degrees():
        nxt = comp.get(p + 1)
        s = S.splitting.get(p)
        if nxt is None or s is None:
            continue
        blk = nxt * (V.diff(p) * s)
        if not blk.is_zero():
            delta[p] = blk
    tri = cone(translate(W, -1), U, translate_map(delta, -1))
    iso: Dict[int, SparseMatrix] = {}
    for p in V.degrees():
        M = SparseMatrix.zero(W.dim(p) + U.dim(p), V.dim(p))
        pr = S.project.get(p)
        if pr is not None:
            _paste(M, pr, 0, 0)
        cp = comp.get(p)
        if cp is not None:
            _paste(M, cp, W.dim(p), 0)
        iso[p] = M
    assert is_akd_morphism(V, tri.cone, iso)
    for p in V.degrees():
        assert rank(iso[p]) == V.dim(p), "not bijective at degree %d" % p
    return delta, tri, iso


# ---------------------------------------------------------------------------
# truncation


def truncate(V: AKDModule, q: int):
    """Cut V at degree q without changing cohomology on either side.

    Returns (below, above, data).  below keeps the degrees under q plus
    the kernel of d at q, above keeps the degrees over q + 1 plus the
    cokernel of d out of degree q.  data holds the inclusion and
    projection morphisms; H^p(below) = H^p(V) for p <= q and vanishes
    above, H^p(above) = H^p(V) for p > q and vanishes below.
    """
    pair, tag = V.pair, V.tag
    td = tag.t_dim()

    kern = kernel_basis(V.diff(q)) if V.dim(q) else []
    K = SparseMatrix.from_columns(kern, V.dim(q))
    bdims = {p: V.dim(p) for p in V.degrees() if p < q}
    if kern:
        bdims[q] = len(kern)
    bd = {p: M for p, M in V.d.items() if p < q - 1}
    if kern and V.dim(q - 1):
        D = SparseMatrix.zero(len(kern), V.dim(q - 1))
        dlow = V.diff(q - 1)
        for j in range(V.dim(q - 1)):
            col = dlow.column(j)
            if not col:
                continue
            sol = solve(K, col)
            assert sol is not None, "d squares to zero"
            for i, x in sol.items():
                D.set(i, j, x)
        bd[q - 1] = D
    bpi = {p: list(V.pi[p]) for p in bdims if p < q}
    bnu = {p: V.nu[p] for p in bdims if p < q}
    binterior = None
    if tag.kind == "contraction":
        binterior = {p: list(V.interior[p]) for p in bdims if p < q}
    if kern:
        span = Subspace(V.dim(q), kern)
        bpi[q] = [apply_on_basis(M, kern, span) for M in V.pi[q]]
        bnu[q] = restrict_action(V.nu[q], kern)
        if binterior is not None:
            binterior[q] = [V.interior_op(q, j) * K for j in range(td)]
    below = AKDModule(pair, tag, bdims, bd, bpi, bnu, binterior,
                      name="%s<=%d" % (V.name, q))
    include = {p: SparseMatrix.identity(V.dim(p)) for p in bdims if p < q}
    if kern:
        include[q] = K

    n1 = V.dim(q + 1)
    ispan = Subspace(n1)
    if n1 and V.dim(q):
        dq = V.diff(q)
        for j in range(V.dim(q)):
            col = dq.column(j)
            if col:
                ispan.add(col)
    reps = ispan.complement_pivots() if n1 else []
    adims = {p: V.dim(p) for p in V.degrees() if p > q + 1}
    if reps:
        adims[q + 1] = len(reps)
    ad = {p: M for p, M in V.d.items() if p > q + 1}
    api = {p: list(V.pi[p]) for p in adims if p > q + 1}
    anu = {p: V.nu[p] for p in adims if p > q + 1}
    ainterior = None
    if tag.kind == "contraction":
        ainterior = {p: list(V.interior[p]) for p in adims if p > q + 2}
    P = None
    if reps:
        P = SparseMatrix.zero(len(reps), n1)
        for j in range(n1):
            red = ispan.reduce({j: ONE})
            for i, b in enumerate(reps):
                x = red.get(b)
                if x:
                    P.set(i, j, x)
        if V.dim(q + 2):
            sec = SparseMatrix.from_columns([{b: ONE} for b in reps], n1)
            ad[q + 1] = V.diff(q + 1) * sec
        api[q + 1] = [quotient_matrix(M, ispan, reps) for M in V.pi[q + 1]]
        anu[q + 1] = quotient_action(V.nu[q + 1], ispan, reps)
        if ainterior is not None and V.dim(q + 2):
            ainterior[q + 2] = [P * V.interior_op(q + 2, j) for j in range(td)]
    above = AKDModule(pair, tag, adims, ad, api, anu, ainterior,
                      name="%s>=%d" % (V.name, q + 1))
    project = {p: SparseMatrix.identity(V.dim(p)) for p in adims if p > q + 1}
    if P is not None:
        project[q + 1] = P
    return below, above, {"include": include, "project": project}


def truncation_les_exact(V: AKDModule, below: AKDModule, above: AKDModule,
                         data: dict) -> bool:
    """Exactness of the truncation triangle's cohomology sequence.

    The smart truncation splits cohomology cleanly, so the connecting
    maps vanish: the inclusion must be injective on cohomology, the
    projection surjective, and the two must be exact in the middle.
    """
    cb = below.complex()
    cv = V.complex()
    ca = above.complex()
    hinc = induced_on_cohomology(data["include"], cb, cv)
    hpr = induced_on_cohomology(data["project"], cv, ca)
    hb = cb.cohomology_dims()
    hv = cv.cohomology_dims()
    ha = ca.cohomology_dims()
    for p in sorted(set(hb) | set(hv) | set(ha)):
        ri = rank(hinc[p]) if p in hinc else 0
        rp = rank(hpr[p]) if p in hpr else 0
        if ri != hb.get(p, 0):
            return False
        if rp != ha.get(p, 0):
            return False
        if ri + rp != hv.get(p, 0):
            return False
        left, right = hinc.get(p), hpr.get(p)
        if left is not None and right is not None \
                and not (right * left).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# quasi-isomorphism detection


def is_quasi_iso(V: AKDModule, W: AKDModule, f: dict) -> dict:
    """Whether f induces bijections on all cohomology.

    Returns a report: the quasi_iso flag, per-degree cohomology of
    source and target, and the rank of the induced map in each degree.
    Raises NotAMorphism when f fails the morphism axioms.
    """
    if not is_akd_morphism(V, W, f):
        raise NotAMorphism("quasi-isomorphism test needs a morphism")
    cv, cw = V.complex(), W.complex()
    ind = induced_on_cohomology(f, cv, cw)
    hs, ht = cv.cohomology_dims(), cw.cohomology_dims()
    ranks = {p: rank(M) for p, M in ind.items()}
    ok = True
    for p in set(hs) | set(ht):
        if hs.get(p, 0) != ht.get(p, 0) or ranks.get(p, 0) != hs.get(p, 0):
            ok = False
    return {"quasi_iso": ok, "source": hs, "target": ht, "ranks": ranks}
