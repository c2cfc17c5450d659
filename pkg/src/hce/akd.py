"""Equivariant complexes and their Hom complexes.

An AKDModule is a bounded complex whose degrees are weak modules over
one Harish-Chandra pair, together with a tag saying how much extra
operator structure rides along: none ("scalars"), the even defect
operators of a chosen subgroup ("defect"), or defect operators plus odd
degree -1 contractions ("contraction").  The defect operators are never
stored; they are the difference between the differentiated group action
and the algebra action along the embedding.  Contractions are honest
extra data, and the homotopy identity d i + i d = defect forces the
defect operators to vanish on cohomology.

Hom complexes between two such modules are kernels of explicit
constraint matrices.  Maps out of the standard resolution are reduced
through freeness to their values on the wedge generators, so no
truncation enters there.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

from .errors import (
    MixedAlgebras,
    NotAModule,
    NotEquivariant,
    UnsupportedGroup,
)
from .lie import (
    HCPair,
    SL2,
    SubgroupT,
    WeakHCModule,
    _SL2_AD_W,
    _generator_matrices,
    action_from_json,
    action_to_json,
    check_weak_module,
    derive_phi,
    exp_nilpotent,
    group_from_json,
    group_lie,
    group_to_json,
    intertwines,
    matrix_from_json,
    matrix_to_json,
)
from .linalg import (
    ONE,
    ZERO,
    FiniteComplex,
    SparseMatrix,
    induced_on_cohomology,
    kernel_basis,
    solve,
)
from .standard import StandardComplex

DG_KINDS = ("scalars", "defect", "contraction")


def _sign(n: int) -> Fraction:
    # (-1) ** n returns a float when n < 0
    return ONE if n % 2 == 0 else -ONE


@dataclass(frozen=True)
class DGTag:
    """Which operator structure a complex carries, over which subgroup.

    "scalars" carries nothing extra.  "defect" distinguishes the even
    defect operators of the subgroup's generators.  "contraction" adds
    one odd degree -1 operator per subgroup generator.
    """

    kind: str
    subgroup: SubgroupT

    def __post_init__(self):
        assert self.kind in DG_KINDS, self.kind

    def t_dim(self) -> int:
        return self.subgroup.lie().dim

    @classmethod
    def scalars(cls, pair: HCPair) -> "DGTag":
        return cls("scalars", SubgroupT.trivial(pair.group))

    @classmethod
    def defect(cls, pair: HCPair) -> "DGTag":
        return cls("defect", SubgroupT.full(pair.group))

    @classmethod
    def contraction(cls, pair: HCPair) -> "DGTag":
        return cls("contraction", SubgroupT.full(pair.group))


class AKDModule:
    """Bounded complex of weak modules with tagged operator structure.

    dims: degree -> dimension.  d: degree p -> matrix into degree p+1.
    pi: degree -> one matrix per basis element of pair.g.  nu: degree ->
    group action on that degree.  interior: degree p -> one matrix per
    subgroup generator into degree p-1 (contraction kind only).
    """

    def __init__(self, pair: HCPair, tag: DGTag, dims: dict, d: dict,
                 pi: dict, nu: dict, interior: Optional[dict] = None,
                 name: str = ""):
        self.pair = pair
        self.tag = tag
        self.dims = {p: n for p, n in dims.items() if n}
        self.d = {p: M for p, M in d.items()
                  if M is not None and (self.dim(p) or self.dim(p + 1))}
        self.pi = {p: list(mats) for p, mats in pi.items() if self.dim(p)}
        self.nu = {p: a for p, a in nu.items() if self.dim(p)}
        self.interior = {p: list(mats) for p, mats in (interior or {}).items()
                         if self.dim(p)}
        self.name = name
        assert tag.subgroup.embed.rows == pair.k.dim
        FiniteComplex(self.dims, self.d, check=False)  # shape discipline
        td = tag.t_dim()
        for p in self.dims:
            assert p in self.pi and p in self.nu, f"degree {p} lacks actions"
            assert len(self.pi[p]) == pair.g.dim
            assert self.nu[p].dim == self.dim(p)
            assert self.nu[p].group == pair.group
            for M in self.pi[p]:
                assert M.shape() == (self.dim(p), self.dim(p))
            if tag.kind == "contraction":
                mats = self.interior.get(p)
                if not mats:
                    # omitted contractions mean zero operators
                    mats = [SparseMatrix.zero(self.dim(p - 1), self.dim(p))
                            for _ in range(td)]
                    self.interior[p] = mats
                assert len(mats) == td, f"degree {p} needs {td} contractions"
                for M in mats:
                    assert M.shape() == (self.dim(p - 1), self.dim(p))

    @classmethod
    def from_weak_complex(cls, modules: Dict[int, WeakHCModule], d: dict,
                          tag: Optional[DGTag] = None,
                          interior: Optional[dict] = None,
                          name: str = "") -> "AKDModule":
        any_mod = next(iter(modules.values()))
        pair = any_mod.pair
        tag = tag if tag is not None else DGTag.scalars(pair)
        return cls(pair, tag,
                   {p: V.dim for p, V in modules.items()},
                   d,
                   {p: V.pi for p, V in modules.items()},
                   {p: V.nu for p, V in modules.items()},
                   interior, name=name)

    @classmethod
    def single(cls, V: WeakHCModule, degree: int = 0,
               tag: Optional[DGTag] = None, name: str = "") -> "AKDModule":
        return cls.from_weak_complex({degree: V}, {}, tag=tag,
                                     name=name or V.name)

    def dim(self, p: int) -> int:
        return self.dims.get(p, 0)

    def degrees(self) -> list:
        return sorted(self.dims)

    def diff(self, p: int) -> SparseMatrix:
        M = self.d.get(p)
        return M if M is not None else SparseMatrix.zero(self.dim(p + 1),
                                                         self.dim(p))

    def complex(self) -> FiniteComplex:
        return FiniteComplex(dict(self.dims), dict(self.d), check=False)

    def weak_module(self, p: int) -> WeakHCModule:
        return WeakHCModule(self.pair, self.pi[p], self.nu[p],
                            name=f"{self.name}@{p}")

    def forget(self, kind: str = "scalars") -> "AKDModule":
        """Drop operator structure down to the given kind.  The subgroup
        slot of the tag is kept as is."""
        assert DG_KINDS.index(kind) <= DG_KINDS.index(self.tag.kind)
        interior = self.interior if kind == "contraction" else None
        return AKDModule(self.pair, DGTag(kind, self.tag.subgroup),
                         dict(self.dims), dict(self.d),
                         {p: list(m) for p, m in self.pi.items()},
                         dict(self.nu), interior, name=self.name)

    # -- subgroup generators in the three coordinate systems ---------------

    def t_col(self, j: int) -> dict:
        """Generator j of the subgroup in Lie(pair.group) coordinates."""
        return self.tag.subgroup.embed.column(j)

    def t_col_in_g(self, j: int) -> dict:
        out: dict = {}
        for b, x in self.t_col(j).items():
            for r, y in self.pair.psi.column(b).items():
                s = out.get(r, ZERO) + x * y
                if s:
                    out[r] = s
                else:
                    out.pop(r, None)
        return out

    def dnu(self, p: int, coords_k: dict) -> SparseMatrix:
        """Differentiated group action of an element of Lie(pair.group)."""
        if p not in self.nu:
            return SparseMatrix.zero(self.dim(p), self.dim(p))
        dense = [ZERO] * self.pair.k.dim
        for b, x in coords_k.items():
            dense[b] = x
        return self.nu[p].differential(dense)

    def pi_vec(self, p: int, vec_g: dict) -> SparseMatrix:
        M = SparseMatrix.zero(self.dim(p), self.dim(p))
        if p not in self.pi:
            return M
        for i, c in vec_g.items():
            M = M + self.pi[p][i].scale(c)
        return M

    def omega_even(self, p: int, j: int) -> SparseMatrix:
        """Defect operator of subgroup generator j on degree p."""
        return self.dnu(p, self.t_col(j)) - self.pi_vec(p, self.t_col_in_g(j))

    def interior_op(self, p: int, j: int) -> SparseMatrix:
        mats = self.interior.get(p)
        if not mats:
            return SparseMatrix.zero(self.dim(p - 1), self.dim(p))
        return mats[j]


def _nu_generators(V: AKDModule, p: int,
                   like: Optional[AKDModule] = None) -> list:
    """Group generator matrices on degree p.  Zero-size placeholders on an
    empty degree, so intertwining checks stay well shaped."""
    if V.dim(p):
        return _generator_matrices(V.nu[p])
    ref = V if V.degrees() else like
    count = len(_generator_matrices(ref.nu[ref.degrees()[0]]))
    return [SparseMatrix.zero(0, 0)] * count


def _weyl_from_dnu(dnu_e: SparseMatrix, dnu_f: SparseMatrix) -> SparseMatrix:
    """Simple-reflection representative exp(e) exp(-f) exp(e) in a given
    representation of an sl2 triple."""
    return exp_nilpotent(dnu_e) * exp_nilpotent(-dnu_f) * exp_nilpotent(dnu_e)


def validate_akd(V: AKDModule) -> dict:
    """Check every axiom of the tagged structure; raise with a witness on
    the first failure.

    Returns a report with dims, the tag kind, per-degree strictness, and
    for tagged kinds whether the defect operators vanish on cohomology.
    For the contraction kind that vanishing is forced by the homotopy
    identity, so a failure there raises instead of being reported.
    """
    pair = V.pair
    tag = V.tag
    tag.subgroup.validate(pair.group)

    report = {"dims": dict(V.dims), "kind": tag.kind, "degrees_strict": {}}
    for p in V.degrees():
        info = check_weak_module(V.weak_module(p))
        report["degrees_strict"][p] = info["strict"]

    for p in V.degrees():
        dp = V.diff(p)
        if dp.is_zero():
            continue
        if V.dim(p + 2) and not (V.diff(p + 1) * dp).is_zero():
            raise NotAModule(f"differential does not square to zero"
                             f" at degree {p}")
        for i in range(pair.g.dim):
            if dp * V.pi[p][i] != V.pi[p + 1][i] * dp:
                raise NotAModule(
                    f"d fails to intertwine the algebra action at degree {p}"
                    f" (generator {pair.g.names[i]})")
        for A, B in zip(_nu_generators(V, p), _nu_generators(V, p + 1)):
            if dp * A != B * dp:
                raise NotEquivariant(
                    f"d fails to intertwine the group action at degree {p}")

    if tag.kind == "scalars":
        return report

    td = tag.t_dim()
    t_lie = tag.subgroup.lie()

    # chain rule for the defect operators; follows from the two
    # intertwinings, but checked directly so failures name the generator
    for p in V.degrees():
        dp = V.diff(p)
        if dp.is_zero():
            continue
        for j in range(td):
            if dp * V.omega_even(p, j) != V.omega_even(p + 1, j) * dp:
                raise NotAModule(
                    f"defect operator {t_lie.names[j]} fails the chain rule"
                    f" at degree {p}")

    if tag.kind == "contraction":
        _check_contractions(V)

    # induced defect operators on cohomology
    C = V.complex()
    strict_on_h = True
    for j in range(td):
        f = {p: V.omega_even(p, j) for p in V.degrees()}
        for p, M in induced_on_cohomology(f, C, C).items():
            if not M.is_zero():
                if tag.kind == "contraction":
                    raise NotAModule(
                        f"defect operator {t_lie.names[j]} acts nontrivially"
                        f" on cohomology at degree {p}")
                strict_on_h = False
    report["cohomology_strict"] = strict_on_h
    return report


def _check_contractions(V: AKDModule) -> None:
    pair = V.pair
    tag = V.tag
    td = tag.t_dim()
    t_lie = tag.subgroup.lie()
    for p in V.degrees():
        for a in range(td):
            ia = V.interior_op(p, a)
            for b in range(a, td):
                anti = (V.interior_op(p - 1, a) * V.interior_op(p, b)
                        + V.interior_op(p - 1, b) * ia)
                if not anti.is_zero():
                    raise NotAModule(
                        f"contractions {t_lie.names[a]},{t_lie.names[b]}"
                        f" fail to anticommute at degree {p}")
            lower_pi = V.pi.get(p - 1)
            for i in range(pair.g.dim):
                low = (lower_pi[i] if lower_pi is not None
                       else SparseMatrix.zero(V.dim(p - 1), V.dim(p - 1)))
                if low * ia != ia * V.pi[p][i]:
                    raise NotAModule(
                        f"contraction {t_lie.names[a]} does not commute with"
                        f" the algebra action at degree {p}")
            homotopy = (V.diff(p - 1) * ia
                        + V.interior_op(p + 1, a) * V.diff(p))
            if homotopy != V.omega_even(p, a):
                raise NotAModule(
                    f"homotopy identity fails for contraction"
                    f" {t_lie.names[a]} at degree {p}")
            for b in range(td):
                eta = V.dnu(p, V.t_col(b))
                eta_low = V.dnu(p - 1, V.t_col(b))
                lhs = eta_low * ia - ia * eta
                rhs = SparseMatrix.zero(V.dim(p - 1), V.dim(p))
                for c, x in t_lie.bracket(b, a).items():
                    rhs = rhs + V.interior_op(p, c).scale(x)
                if lhs != rhs:
                    raise NotEquivariant(
                        f"contraction {t_lie.names[a]} is not equivariant"
                        f" under {t_lie.names[b]} at degree {p}")
        # group-level instance of the equivariance for an sl2 subgroup
        if isinstance(tag.subgroup.group, SL2):
            w_here = _weyl_from_dnu(V.dnu(p, V.t_col(0)),
                                    V.dnu(p, V.t_col(2)))
            w_low = _weyl_from_dnu(V.dnu(p - 1, V.t_col(0)),
                                   V.dnu(p - 1, V.t_col(2)))
            for a in range(td):
                lhs = w_low * V.interior_op(p, a)
                rhs = SparseMatrix.zero(V.dim(p - 1), V.dim(p))
                for c in range(3):
                    x = _SL2_AD_W.get(c, a)
                    if x:
                        rhs = rhs + V.interior_op(p, c).scale(x)
                if lhs != rhs * w_here:
                    raise NotEquivariant(
                        f"contraction {t_lie.names[a]} fails the reflection"
                        f" instance of equivariance at degree {p}")


def is_akd_morphism(V: AKDModule, W: AKDModule, f: dict) -> bool:
    """f: degree -> matrix V^p -> W^p.  Chain map intertwining the algebra
    action, the group action, and any contractions."""
    _same_pair_and_tag(V, W)
    for p in sorted(set(V.degrees()) | set(W.degrees())):
        fp = f.get(p, SparseMatrix.zero(W.dim(p), V.dim(p)))
        fn = f.get(p + 1, SparseMatrix.zero(W.dim(p + 1), V.dim(p + 1)))
        if W.diff(p) * fp != fn * V.diff(p):
            return False
        if not V.dim(p):
            continue
        wpi = W.pi.get(p)
        for i in range(V.pair.g.dim):
            lhs = fp * V.pi[p][i]
            rhs = (wpi[i] * fp if wpi is not None
                   else SparseMatrix.zero(0, V.dim(p)))
            if lhs != rhs:
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


# ---------------------------------------------------------------------------
# Hom complexes between finite modules


def _same_pair_and_tag(V: AKDModule, W: AKDModule) -> None:
    if (V.pair.g.names != W.pair.g.names or V.pair.g.table != W.pair.g.table
            or V.pair.group != W.pair.group or V.pair.psi != W.pair.psi
            or V.tag != W.tag):
        raise MixedAlgebras("operands live over different pairs or tags")


class HomComplex:
    """Graded maps between two modules over one pair and tag.

    Degree n consists of the collections (f_p: V^p -> W^{p+n}) that
    intertwine the algebra and group actions and, for the contraction
    kind, satisfy the sign rule f i_V = (-1)^n i_W f.  The differential
    is df = d_W f - (-1)^n f d_V; its degree 0 cycles are the honest
    morphisms and H^0 counts their homotopy classes.
    """

    def __init__(self, V: AKDModule, W: AKDModule):
        _same_pair_and_tag(V, W)
        self.V, self.W = V, W
        self.maps: Dict[int, List[dict]] = {}
        degs = {q - p for p in V.degrees() for q in W.degrees()}
        for n in sorted(degs):
            self.maps[n] = self._solve_degree(n)
        self._complex = self._build_complex()

    def complex(self) -> FiniteComplex:
        return self._complex

    def dims(self) -> dict:
        return {n: len(b) for n, b in self.maps.items() if b}

    def basis(self, n: int) -> List[dict]:
        return self.maps.get(n, [])

    # -- constraint assembly ------------------------------------------------

    def _layout(self, n: int):
        layout = {}
        off = 0
        for p in self.V.degrees():
            if self.W.dim(p + n):
                layout[p] = (off, self.W.dim(p + n), self.V.dim(p))
                off += self.W.dim(p + n) * self.V.dim(p)
        return layout, off

    def _solve_degree(self, n: int) -> List[dict]:
        V, W = self.V, self.W
        layout, total = self._layout(n)
        if not total:
            return []
        rows: List[dict] = []

        def block_entry(p, r, c):
            off, _, ncols = layout[p]
            return off + r * ncols + c

        def add_intertwine(p, A, B):
            # rows of f_p A - B f_p = 0, linear in the entries of f_p
            _, q_dim, ncols = layout[p]
            a_cols = [A.column(c) for c in range(A.cols)]
            b_rows = B.row_dicts()
            for c in range(ncols):
                for r in range(q_dim):
                    row: dict = {}
                    for k, x in a_cols[c].items():
                        key = block_entry(p, r, k)
                        row[key] = row.get(key, ZERO) + x
                    for k, y in b_rows[r].items():
                        key = block_entry(p, k, c)
                        row[key] = row.get(key, ZERO) - y
                    if row:
                        rows.append(row)

        for p in layout:
            for i in range(V.pair.g.dim):
                add_intertwine(p, V.pi[p][i], W.pi[p + n][i])
            for A, B in zip(_nu_generators(V, p), _nu_generators(W, p + n)):
                add_intertwine(p, A, B)

        if V.tag.kind == "contraction":
            # sign rule; includes degrees whose unknown blocks are forced
            # zero but whose constraint is not
            sign = _sign(n)
            for p in V.degrees():
                tgt_rows = W.dim(p + n - 1)
                if not tgt_rows:
                    continue
                has_cur = p in layout
                has_low = (p - 1) in layout
                if not (has_cur or has_low):
                    continue
                for j in range(V.tag.t_dim()):
                    iv = V.interior_op(p, j)
                    iw = W.interior_op(p + n, j)
                    iv_cols = [iv.column(c) for c in range(V.dim(p))]
                    iw_rows = iw.row_dicts()
                    for c in range(V.dim(p)):
                        for r in range(tgt_rows):
                            row = {}
                            if has_low:
                                for k, x in iv_cols[c].items():
                                    key = block_entry(p - 1, r, k)
                                    row[key] = row.get(key, ZERO) + x
                            if has_cur:
                                for k, y in iw_rows[r].items():
                                    key = block_entry(p, k, c)
                                    row[key] = row.get(key, ZERO) - sign * y
                            if row:
                                rows.append(row)

        M = SparseMatrix(len(rows), total,
                         {(i, j): x for i, row in enumerate(rows)
                          for j, x in row.items()})
        out = []
        for v in kernel_basis(M):
            f: dict = {}
            for p, (off, q_dim, ncols) in layout.items():
                B = SparseMatrix.zero(q_dim, ncols)
                for idx, x in v.items():
                    if off <= idx < off + q_dim * ncols:
                        B.set((idx - off) // ncols, (idx - off) % ncols, x)
                if not B.is_zero():
                    f[p] = B
            out.append(f)
        return out

    # -- differential ---------------------------------------------------------

    def differential_of(self, n: int, f: dict) -> dict:
        """df = d_W f - (-1)^n f d_V as a degree n+1 collection."""
        V, W = self.V, self.W
        sign = _sign(n)
        out: dict = {}
        for p in V.degrees():
            if not W.dim(p + n + 1):
                continue
            acc = SparseMatrix.zero(W.dim(p + n + 1), V.dim(p))
            fp = f.get(p)
            if fp is not None:
                acc = acc + W.diff(p + n) * fp
            fn = f.get(p + 1)
            if fn is not None:
                acc = acc - (fn * V.diff(p)).scale(sign)
            if not acc.is_zero():
                out[p] = acc
        return out

    def coordinates(self, n: int, f: dict) -> Optional[dict]:
        """Coordinates of a degree n collection in the computed basis, or
        None when it lies outside the constrained space."""
        basis = self.maps.get(n, [])
        layout, total = self._layout(n)

        def flatten(g):
            v: dict = {}
            for p, (off, _, ncols) in layout.items():
                B = g.get(p)
                if B is None:
                    continue
                for (r, c), x in B.data.items():
                    v[off + r * ncols + c] = x
            return v

        if not basis:
            return {} if not flatten(f) else None
        cols = [flatten(b) for b in basis]
        return solve(SparseMatrix.from_columns(cols, total), flatten(f))

    def _build_complex(self) -> FiniteComplex:
        dims = {n: len(b) for n, b in self.maps.items() if b}
        d = {}
        for n, basis in self.maps.items():
            if not basis:
                continue
            nxt = self.maps.get(n + 1, [])
            M = SparseMatrix.zero(len(nxt), len(basis))
            for col, f in enumerate(basis):
                coords = self.coordinates(n + 1, self.differential_of(n, f))
                assert coords is not None, "differential left the hom space"
                for r, x in coords.items():
                    M.set(r, col, x)
            d[n] = M
        return FiniteComplex(dims, d)

    def morphisms(self) -> List[dict]:
        """Basis of the degree 0 cycles: honest structure-preserving maps."""
        basis = self.maps.get(0, [])
        if not basis:
            return []
        out = []
        for v in kernel_basis(self._complex.diff(0)):
            f: dict = {}
            for idx, x in v.items():
                for p, B in basis[idx].items():
                    cur = f.get(p, SparseMatrix.zero(B.rows, B.cols))
                    f[p] = cur + B.scale(x)
            out.append({p: B for p, B in f.items() if not B.is_zero()})
        return out


def hom_complex(V: AKDModule, W: AKDModule) -> HomComplex:
    return HomComplex(V, W)


# ---------------------------------------------------------------------------
# serialization


def akd_to_json(V: AKDModule) -> dict:
    out = {
        "kind": V.tag.kind,
        "subgroup": {"group": group_to_json(V.tag.subgroup.group),
                     "embed": matrix_to_json(V.tag.subgroup.embed)},
        "dims": {str(p): n for p, n in sorted(V.dims.items())},
        "d": {str(p): matrix_to_json(M) for p, M in sorted(V.d.items())},
        "pi": {str(p): [matrix_to_json(M) for M in mats]
               for p, mats in sorted(V.pi.items())},
        "nu": {str(p): action_to_json(a) for p, a in sorted(V.nu.items())},
        "name": V.name,
    }
    if V.tag.kind == "contraction":
        out["interior"] = {str(p): [matrix_to_json(M) for M in mats]
                           for p, mats in sorted(V.interior.items())}
    return out


def akd_from_json(data: dict, pair: HCPair) -> AKDModule:
    sub_group = group_from_json(data["subgroup"]["group"])
    embed = matrix_from_json(data["subgroup"]["embed"],
                             shape=(pair.k.dim, group_lie(sub_group).dim))
    tag = DGTag(data["kind"], SubgroupT(sub_group, embed))
    dims = {int(p): n for p, n in data["dims"].items()}

    def dim(p):
        return dims.get(p, 0)

    d = {int(p): matrix_from_json(rows, shape=(dim(int(p) + 1), dim(int(p))))
         for p, rows in data.get("d", {}).items()}
    pi = {int(p): [matrix_from_json(rows, shape=(dim(int(p)), dim(int(p))))
                   for rows in mats]
          for p, mats in data["pi"].items()}
    nu = {int(p): action_from_json(a) for p, a in data["nu"].items()}
    interior = None
    if "interior" in data:
        interior = {int(p): [matrix_from_json(rows, shape=(dim(int(p) - 1),
                                                           dim(int(p))))
                             for rows in mats]
                    for p, mats in data["interior"].items()}
    V = AKDModule(pair, tag, dims, d, pi, nu, interior,
                  name=data.get("name", ""))
    validate_akd(V)
    return V


# ---------------------------------------------------------------------------
# total models of the truncated standard complex (abelian case)


def truncated_standard_module(pair: HCPair, cutoff: int,
                              name: str = "") -> AKDModule:
    """The truncated standard complex as an honest AKDModule.

    Sound only when the group's algebra is abelian: multiplication then
    preserves the length filtration exactly, so dropping overflow terms
    is a quotient module structure, not an approximation.
    """
    k = pair.k
    if pair.g.dim != k.dim or pair.psi != SparseMatrix.identity(k.dim):
        raise UnsupportedGroup(
            "needs the pair of the group over its own algebra")
    if not (pair.g.is_abelian() and k.is_abelian()):
        raise UnsupportedGroup(
            "total truncated operators exist only over an abelian algebra")
    N = StandardComplex(k, cutoff)
    dims = {-p: N.dim(p) for p in N.basis}
    d = {-p: N.d_matrix(p) for p in N.basis if p >= 1}
    pi = {-p: [N.left_mult_matrix(i, p, truncate=True) for i in range(k.dim)]
          for p in N.basis}
    nu = {-p: N.nu_action(p, pair.phi) for p in N.basis}
    interior = {-p: [N.interior_matrix(j, p, truncate=True)
                     for j in range(k.dim)]
                for p in N.basis}
    return AKDModule(pair, DGTag.contraction(pair), dims, d, pi, nu,
                     interior, name=name or f"standard<={cutoff}")


def check_standard_complex_operators(N: StandardComplex, K,
                                     subgroup: SubgroupT) -> dict:
    """Axiom checks for the partial operators on a truncated standard
    complex, restricted to the columns whose images provably stay inside
    the truncation.  Returns slug -> bool.
    """
    k = N.k
    k_of_group = group_lie(K)
    if k.names != k_of_group.names or k.table != k_of_group.table:
        raise MixedAlgebras("complex is not over the group's algebra")
    subgroup.validate(K)
    phi = derive_phi(k, K, SparseMatrix.identity(k.dim))
    td = subgroup.lie().dim
    t_cols = [subgroup.embed.column(j) for j in range(td)]
    degrees = sorted(N.basis)

    # a column is safe for a composite when the filtration level can rise
    # by the composite's headroom without crossing the cutoff
    def safe(p, headroom):
        return {i for i, (mon, _) in enumerate(N.basis[p])
                if len(mon) <= N.cutoff - p - headroom}

    def agrees(A, B, cols):
        return not any(c in cols for (_, c) in (A - B).data)

    def pi(i, p):
        return N.left_mult_matrix(i, p, truncate=True)

    def pi_vec(v, p):
        M = SparseMatrix.zero(N.dim(p), N.dim(p))
        for i, c in v.items():
            M = M + pi(i, p).scale(c)
        return M

    def contraction(col, p):
        M = SparseMatrix.zero(N.dim(p + 1), N.dim(p))
        for b, c in col.items():
            M = M + N.interior_matrix(b, p, truncate=True).scale(c)
        return M

    checks = {}

    ok = True
    for p in degrees:
        if p >= 2:
            ok = ok and (N.d_matrix(p - 1) * N.d_matrix(p)).is_zero()
    checks["differential-squares-to-zero"] = ok

    ok = True
    for p in degrees:
        if p < 1:
            continue
        dp = N.d_matrix(p)
        for i in range(k.dim):
            ok = ok and agrees(dp * pi(i, p), pi(i, p - 1) * dp, safe(p, 1))
    checks["algebra-action-is-chain-map"] = ok

    ok = True
    for p in degrees:
        cols = safe(p, 2)
        for i in range(k.dim):
            for j in range(i + 1, k.dim):
                comm = pi(i, p) * pi(j, p) - pi(j, p) * pi(i, p)
                ok = ok and agrees(comm, pi_vec(k.bracket(i, j), p), cols)
    checks["algebra-action-is-representation"] = ok

    ok = True
    for p in degrees:
        if p >= 1:
            ok = ok and intertwines(N.nu_action(p, phi),
                                    N.nu_action(p - 1, phi), N.d_matrix(p))
    checks["group-action-is-chain-map"] = ok

    ok = True
    for p in degrees:
        cols = safe(p, 1)
        for col in t_cols:
            split = pi_vec(col, p) + N.omega_even_matrix(col, p,
                                                         truncate=True)
            ok = ok and agrees(N.ad_derivation_matrix(col, p), split, cols)
    checks["defect-operator-splits-group-action"] = ok

    ok = True
    for p in degrees:
        if p < 1:
            continue
        dp = N.d_matrix(p)
        cols = safe(p, 1)
        for col in t_cols:
            lhs = dp * N.omega_even_matrix(col, p, truncate=True)
            rhs = N.omega_even_matrix(col, p - 1, truncate=True) * dp
            ok = ok and agrees(lhs, rhs, cols)
    checks["defect-operator-is-chain-map"] = ok

    ok = True
    for p in degrees:
        cols = safe(p, 2)
        for col in t_cols:
            om = N.omega_even_matrix(col, p, truncate=True)
            for i in range(k.dim):
                ok = ok and agrees(om * pi(i, p), pi(i, p) * om, cols)
    checks["defect-commutes-with-algebra-action"] = ok

    ok = True
    for p in degrees:
        if p + 1 not in N.basis:
            continue
        cols = safe(p, 2)
        for col in t_cols:
            ic = contraction(col, p)
            for i in range(k.dim):
                ok = ok and agrees(ic * pi(i, p), pi(i, p + 1) * ic, cols)
    checks["contraction-commutes-with-algebra-action"] = ok

    ok = True
    for p in degrees:
        if p + 2 not in N.basis:
            continue
        cols = safe(p, 2)
        for a in range(td):
            for b in range(a, td):
                anti = (contraction(t_cols[a], p + 1)
                        * contraction(t_cols[b], p)
                        + contraction(t_cols[b], p + 1)
                        * contraction(t_cols[a], p))
                ok = ok and agrees(anti, SparseMatrix.zero(*anti.shape()),
                                   cols)
    checks["contractions-anticommute"] = ok

    ok = True
    for p in degrees:
        cols = safe(p, 1)
        for col in t_cols:
            acc = SparseMatrix.zero(N.dim(p), N.dim(p))
            if p + 1 in N.basis:
                acc = acc + N.d_matrix(p + 1) * contraction(col, p)
            if p >= 1:
                acc = acc + contraction(col, p - 1) * N.d_matrix(p)
            ok = ok and agrees(acc,
                               N.omega_even_matrix(col, p, truncate=True),
                               cols)
    checks["contraction-homotopy-gives-defect"] = ok

    t_lie = subgroup.lie()
    ok = True
    for p in degrees:
        if p + 1 not in N.basis:
            continue
        cols = safe(p, 1)
        for b in range(td):
            ad_here = N.ad_derivation_matrix(t_cols[b], p)
            ad_next = N.ad_derivation_matrix(t_cols[b], p + 1)
            for a in range(td):
                ia = contraction(t_cols[a], p)
                lhs = ad_next * ia - ia * ad_here
                br: dict = {}
                for c, x in t_lie.bracket(b, a).items():
                    for r, y in subgroup.embed.column(c).items():
                        br[r] = br.get(r, ZERO) + x * y
                ok = ok and agrees(lhs, contraction(br, p), cols)
    checks["contraction-is-equivariant"] = ok

    return checks


# ---------------------------------------------------------------------------
# Hom from the standard complex, through freeness


def wedge_basis(n: int, p: int) -> list:
    return list(itertools.combinations(range(n), p))


class StandardHom:
    """Graded maps out of the untruncated standard complex of Lie(K) into
    a finite module W, reduced through freeness to their values on the
    wedge generators.

    A degree m map is a collection (g_p: wedge^p -> W^(m-p)) subject to
    subgroup equivariance and a contraction sign rule; the transported
    differential evaluates the source differential on generators.  The
    reduction is exact, so no truncation is involved.
    """

    def __init__(self, pair: HCPair, subgroup: SubgroupT, W: AKDModule):
        subgroup.validate(pair.group)
        if W.tag.kind != "contraction":
            raise MixedAlgebras(
                "maps from the standard complex need contraction operators")
        if (W.pair.g.names != pair.k.names or W.pair.g.table != pair.k.table
                or W.pair.group != subgroup.group
                or W.pair.psi != subgroup.embed
                or not W.tag.subgroup.is_full(subgroup.group)):
            raise MixedAlgebras(
                "target must live over the group's algebra and the subgroup")
        self.pair = pair
        self.subgroup = subgroup
        self.W = W
        self.k = pair.k
        n = self.k.dim
        self.wedges = {p: wedge_basis(n, p) for p in range(n + 1)}
        self.windex = {p: {w: i for i, w in enumerate(ws)}
                       for p, ws in self.wedges.items()}
        self.td = subgroup.lie().dim
        self.maps: Dict[int, List[dict]] = {}
        degs = {q + p for q in W.degrees() for p in range(n + 1)}
        for m in sorted(degs):
            self.maps[m] = self._solve_degree(m)
        self._complex = self._build_complex()

    def complex(self) -> FiniteComplex:
        return self._complex

    def dims(self) -> dict:
        return {m: len(b) for m, b in self.maps.items() if b}

    def basis(self, m: int) -> List[dict]:
        return self.maps.get(m, [])

    # -- wedge-side operators -------------------------------------------------

    def _ad_on_wedge(self, eta_k: dict, w: tuple) -> dict:
        """ad(eta) as an even derivation of the wedge: index -> coeff."""
        out: dict = {}
        lam = list(w)
        p = len(lam)
        for pos in range(p):
            img = self.k.bracket_vec(eta_k, {lam[pos]: ONE})
            rest = tuple(lam[:pos] + lam[pos + 1:])
            for b, c in img.items():
                if b in rest:
                    continue
                q = sum(1 for r in rest if r < b)
                key = self.windex[p][tuple(sorted(rest + (b,)))]
                s = out.get(key, ZERO) + c * Fraction((-1) ** (pos + q))
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return out

    def _append_wedge(self, w: tuple, xi_k: dict) -> dict:
        """w wedge xi in the sorted basis: index -> coeff."""
        out: dict = {}
        p = len(w)
        for b, x in xi_k.items():
            if b in w:
                continue
            q = sum(1 for r in w if r > b)
            key = self.windex[p + 1][tuple(sorted(w + (b,)))]
            s = out.get(key, ZERO) + x * Fraction((-1) ** q)
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return out

    def _matrix_on_wedge(self, base: SparseMatrix, p: int) -> SparseMatrix:
        """p-th wedge power of a matrix acting on the algebra."""
        src = self.wedges[p]
        M = SparseMatrix.zero(len(src), len(src))
        for c, w in enumerate(src):
            terms: dict = {(): ONE}
            for i in w:
                nxt: dict = {}
                col = base.column(i)
                for part, coeff in terms.items():
                    for b, x in col.items():
                        if b in part:
                            continue
                        q = sum(1 for r in part if r > b)
                        key = tuple(sorted(part + (b,)))
                        s = nxt.get(key, ZERO) + coeff * x * Fraction(
                            (-1) ** q)
                        if s:
                            nxt[key] = s
                        else:
                            nxt.pop(key, None)
                terms = nxt
            for part, coeff in terms.items():
                M.set(self.windex[p][part], c, coeff)
        return M

    # -- constraint assembly ----------------------------------------------------

    def _layout(self, m: int):
        layout = {}
        off = 0
        for p in range(self.k.dim + 1):
            if self.W.dim(m - p):
                layout[p] = (off, self.W.dim(m - p), len(self.wedges[p]))
                off += self.W.dim(m - p) * len(self.wedges[p])
        return layout, off

    def _solve_degree(self, m: int) -> List[dict]:
        W = self.W
        layout, total = self._layout(m)
        if not total:
            return []
        rows: List[dict] = []

        def block_entry(p, r, c):
            off, _, ncols = layout[p]
            return off + r * ncols + c

        sl2_sub = isinstance(self.subgroup.group, SL2)
        if sl2_sub:
            e_k = self.subgroup.embed.column(0)
            f_k = self.subgroup.embed.column(2)
            w_on_k = _weyl_from_dnu(self.k.ad_vec(e_k), self.k.ad_vec(f_k))

        for p, (off, q_dim, ncols) in layout.items():
            # subgroup equivariance at the infinitesimal level
            for j in range(self.td):
                eta_k = self.subgroup.embed.column(j)
                B = W.dnu(m - p, {j: ONE})
                b_rows = B.row_dicts()
                for c, w in enumerate(self.wedges[p]):
                    adw = self._ad_on_wedge(eta_k, w)
                    for r in range(q_dim):
                        row: dict = {}
                        for k2, x in adw.items():
                            key = block_entry(p, r, k2)
                            row[key] = row.get(key, ZERO) + x
                        for k2, y in b_rows[r].items():
                            key = block_entry(p, k2, c)
                            row[key] = row.get(key, ZERO) - y
                        if row:
                            rows.append(row)
            # reflection instance for an sl2 subgroup
            if sl2_sub:
                wmat = self._matrix_on_wedge(w_on_k, p)
                B = W.nu[m - p].weyl()
                w_cols = [wmat.column(c) for c in range(ncols)]
                b_rows = B.row_dicts()
                for c in range(ncols):
                    for r in range(q_dim):
                        row = {}
                        for k2, x in w_cols[c].items():
                            key = block_entry(p, r, k2)
                            row[key] = row.get(key, ZERO) + x
                        for k2, y in b_rows[r].items():
                            key = block_entry(p, k2, c)
                            row[key] = row.get(key, ZERO) - y
                        if row:
                            rows.append(row)

        # contraction sign rule, including blocks forced to zero
        for p in range(self.k.dim):
            tgt_rows = W.dim(m - p - 1)
            if not tgt_rows:
                continue
            has_cur = p in layout
            sgn_up = _sign(p + 1)
            sgn_w = _sign(m)
            for j in range(self.td):
                xi_k = self.subgroup.embed.column(j)
                iw_rows = W.interior_op(m - p, j).row_dicts()
                for c, w in enumerate(self.wedges[p]):
                    appended = self._append_wedge(w, xi_k)
                    for r in range(tgt_rows):
                        row = {}
                        for k2, x in appended.items():
                            key = block_entry(p + 1, r, k2)
                            row[key] = row.get(key, ZERO) + sgn_up * x
                        if has_cur:
                            for k2, y in iw_rows[r].items():
                                key = block_entry(p, k2, c)
                                row[key] = row.get(key, ZERO) - sgn_w * y
                        if row:
                            rows.append(row)

        M = SparseMatrix(len(rows), total,
                         {(i, j): x for i, row in enumerate(rows)
                          for j, x in row.items()})
        out = []
        for v in kernel_basis(M):
            g: dict = {}
            for p, (off, q_dim, ncols) in layout.items():
                B = SparseMatrix.zero(q_dim, ncols)
                for idx, x in v.items():
                    if off <= idx < off + q_dim * ncols:
                        B.set((idx - off) // ncols, (idx - off) % ncols, x)
                if not B.is_zero():
                    g[p] = B
            out.append(g)
        return out

    # -- differential -----------------------------------------------------------

    def differential_of(self, m: int, g: dict) -> dict:
        """Hom differential: compose with the target differential, minus
        the signed evaluation of the source differential on generators."""
        W = self.W
        sign = _sign(m)
        out: dict = {}
        for p in range(self.k.dim + 1):
            tgt = W.dim(m + 1 - p)
            if not tgt:
                continue
            ncols = len(self.wedges[p])
            acc = SparseMatrix.zero(tgt, ncols)
            gp = g.get(p)
            if gp is not None:
                acc = acc + W.diff(m - p) * gp
            glow = g.get(p - 1)
            if glow is not None and p >= 1:
                corr = SparseMatrix.zero(tgt, ncols)
                for c, w in enumerate(self.wedges[p]):
                    lam = list(w)
                    for i, xi in enumerate(lam):
                        rest = tuple(lam[:i] + lam[i + 1:])
                        src = glow.column(self.windex[p - 1][rest])
                        img = W.pi[m + 1 - p][xi].apply(src)
                        s = Fraction((-1) ** i)
                        for r, x in img.items():
                            corr.set(r, c, corr.get(r, c) + s * x)
                    for i in range(len(lam)):
                        for j2 in range(i + 1, len(lam)):
                            rest = tuple(lam[:i] + lam[i + 1:j2]
                                         + lam[j2 + 1:])
                            for b, x in self.k.bracket(lam[i],
                                                       lam[j2]).items():
                                if b in rest:
                                    continue
                                q = sum(1 for r in rest if r < b)
                                key = self.windex[p - 1][
                                    tuple(sorted(rest + (b,)))]
                                s = Fraction((-1) ** (i + j2 + q))
                                for r, y in glow.column(key).items():
                                    corr.set(r, c,
                                             corr.get(r, c) + s * x * y)
                acc = acc - corr.scale(sign)
            if not acc.is_zero():
                out[p] = acc
        return out

    def coordinates(self, m: int, g: dict) -> Optional[dict]:
        basis = self.maps.get(m, [])
        layout, total = self._layout(m)

        def flatten(h):
            v: dict = {}
            for p, (off, _, ncols) in layout.items():
                B = h.get(p)
                if B is None:
                    continue
                for (r, c), x in B.data.items():
                    v[off + r * ncols + c] = x
            return v

        if not basis:
            return {} if not flatten(g) else None
        cols = [flatten(b) for b in basis]
        return solve(SparseMatrix.from_columns(cols, total), flatten(g))

    def _build_complex(self) -> FiniteComplex:
        dims = {m: len(b) for m, b in self.maps.items() if b}
        d = {}
        for m, basis in self.maps.items():
            if not basis:
                continue
            nxt = self.maps.get(m + 1, [])
            M = SparseMatrix.zero(len(nxt), len(basis))
            for col, g in enumerate(basis):
                coords = self.coordinates(m + 1, self.differential_of(m, g))
                assert coords is not None, "differential left the carrier"
                for r, x in coords.items():
                    M.set(r, col, x)
            d[m] = M
        return FiniteComplex(dims, d)


def hom_from_standard_complex(pair: HCPair, subgroup: SubgroupT,
                              W: AKDModule) -> StandardHom:
    return StandardHom(pair, subgroup, W)
