"""Named pairs and modules used by tests, demos and the command line.

Everything here is small and exact: irreducible sl2 modules, torus
characters, adjoint modules, and two families of genuinely weak (not
strict) modules whose failure-of-strictness operators are known in
closed form.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import UnsupportedGroup
from .lie import (
    HCPair,
    ProductAction,
    ProductGroup,
    SL2,
    SL2Action,
    SparseMatrix,
    Torus,
    TorusAction,
    TrivialAction,
    TrivialGroup,
    WeakHCModule,
    abelian,
    sl2_algebra,
    tensor_actions,
)
from .linalg import frac


def sl2_pair() -> HCPair:
    """(U(sl2), SL2) with the identity embedding."""
    return HCPair(sl2_algebra(), SL2(), SparseMatrix.identity(3))


def sl2_torus_pair() -> HCPair:
    """(U(sl2), T) with T the diagonal torus along h."""
    return HCPair(sl2_algebra(), Torus(1), SparseMatrix.from_rows([[0], [1], [0]]))


def gl1_pair() -> HCPair:
    return HCPair(abelian(1, prefix="h"), Torus(1), SparseMatrix.identity(1))


def abelian_pair(n: int) -> HCPair:
    return HCPair(abelian(n), Torus(n), SparseMatrix.identity(n))


def zero_action(K, dim: int):
    """The action of K on a carrier where K acts trivially."""
    if isinstance(K, TrivialGroup):
        return TrivialAction(dim)
    if isinstance(K, Torus):
        return TorusAction(K.rank, [(0,) * K.rank] * dim)
    if isinstance(K, SL2):
        z = SparseMatrix.zero(dim, dim)
        return SL2Action(z, z, z)
    if isinstance(K, ProductGroup):
        return ProductAction([zero_action(f, dim) for f in K.factors])
    raise UnsupportedGroup(repr(K))


def sl2_irreducible_matrices(m: int):
    """pi(e), pi(h), pi(f) on the (m+1)-dimensional irreducible sl2 module.

    Basis v_0..v_m with h v_s = (m - 2s) v_s, e v_s = s v_{s-1},
    f v_s = (m - s) v_{s+1}.
    """
    n = m + 1
    e = SparseMatrix.zero(n, n)
    h = SparseMatrix.zero(n, n)
    f = SparseMatrix.zero(n, n)
    for s in range(n):
        if m - 2 * s:
            h.set(s, s, Fraction(m - 2 * s))
        if s > 0:
            e.set(s - 1, s, Fraction(s))
        if s < m:
            f.set(s + 1, s, Fraction(m - s))
    return e, h, f


def sl2_module(pair: HCPair, m: int, name: str = "") -> WeakHCModule:
    """The irreducible (m+1)-dimensional module, strict over either sl2 pair."""
    e, h, f = sl2_irreducible_matrices(m)
    pi = [e, h, f]
    if isinstance(pair.group, SL2):
        nu = SL2Action(e, h, f)
    elif isinstance(pair.group, Torus) and pair.group.rank == 1:
        nu = TorusAction(1, [(m - 2 * s,) for s in range(m + 1)])
    else:
        raise UnsupportedGroup("sl2_module needs an sl2 or sl2/torus pair")
    return WeakHCModule(pair, pi, nu, name=name or f"F{m}")


def gl1_character(pi_value, nu_weight: int, name: str = "") -> WeakHCModule:
    """One-dimensional module over (U(gl1), GL1).

    pi(h) is any rational scalar; nu has integer weight.  Strict exactly
    when the two agree.
    """
    pair = gl1_pair()
    pi = [SparseMatrix.from_rows([[frac(pi_value)]])]
    nu = TorusAction(1, [(nu_weight,)])
    return WeakHCModule(pair, pi, nu, name=name or f"C{pi_value}")


def trivial_module(pair: HCPair) -> WeakHCModule:
    pi = [SparseMatrix.zero(1, 1) for _ in range(pair.g.dim)]
    return WeakHCModule(pair, pi, zero_action(pair.group, 1), name="trivial")


def adjoint_module(pair: HCPair) -> WeakHCModule:
    """g acting on itself by ad, K by phi; always strict."""
    pi = [pair.g.ad(i) for i in range(pair.g.dim)]
    return WeakHCModule(pair, pi, pair.phi, name="adjoint")


def weak_tensor_module(m_pi: int, m_nu: int) -> WeakHCModule:
    """Weak module over (U(sl2), SL2): carrier F_{m_pi} (x) F_{m_nu}.

    g acts on the first factor only, K on both diagonally; the defect
    operator is the K-action on the second factor, so the module is
    strict exactly when m_nu = 0.
    """
    pair = sl2_pair()
    e, h, f = sl2_irreducible_matrices(m_pi)
    nb = m_nu + 1

    def on_first(M):
        n = M.rows * nb
        out = SparseMatrix.zero(n, n)
        for (r, c), x in M.data.items():
            for j in range(nb):
                out.set(r * nb + j, c * nb + j, x)
        return out

    pi = [on_first(e), on_first(h), on_first(f)]
    ea, ha, fa = sl2_irreducible_matrices(m_pi)
    eb, hb, fb = sl2_irreducible_matrices(m_nu)
    nu = tensor_actions(SL2Action(ea, ha, fa), SL2Action(eb, hb, fb))
    return WeakHCModule(pair, pi, nu, name=f"F{m_pi}(x)F{m_nu}")


def weak_shifted_sum(summands) -> WeakHCModule:
    """Weak module over (U(sl2), T): direct sum of F_m with nu shifted.

    summands is a list of (m, c) pairs; on the summand for (m, c) the
    torus weight of v_s is m - 2s + c, so the defect operator is the
    scalar c there.  Strict exactly when every c is zero.
    """
    pair = sl2_torus_pair()
    dims = [m + 1 for m, _ in summands]
    n = sum(dims)
    pi = [SparseMatrix.zero(n, n) for _ in range(3)]
    weights = []
    off = 0
    for (m, c), d in zip(summands, dims):
        e, h, f = sl2_irreducible_matrices(m)
        for t, M in enumerate((e, h, f)):
            for (r, cc), x in M.data.items():
                pi[t].set(off + r, off + cc, x)
        weights.extend((m - 2 * s + c,) for s in range(d))
        off += d
    nu = TorusAction(1, weights)
    name = "+".join(f"F{m}[{c}]" for m, c in summands)
    return WeakHCModule(pair, pi, nu, name=name)


def direct_sum(V: WeakHCModule, W: WeakHCModule) -> WeakHCModule:
    assert V.pair is W.pair or (V.pair.group == W.pair.group
                                and V.pair.g.names == W.pair.g.names)
    pair = V.pair
    n = V.dim + W.dim

    def block(A, B):
        M = SparseMatrix.zero(n, n)
        for (r, c), x in A.data.items():
            M.set(r, c, x)
        for (r, c), x in B.data.items():
            M.set(V.dim + r, V.dim + c, x)
        return M

    pi = [block(a, b) for a, b in zip(V.pi, W.pi)]
    if isinstance(V.nu, TorusAction) and isinstance(W.nu, TorusAction):
        nu = TorusAction(V.nu.rank, list(V.nu.weights) + list(W.nu.weights))
    elif isinstance(V.nu, SL2Action) and isinstance(W.nu, SL2Action):
        nu = SL2Action(block(V.nu.e, W.nu.e), block(V.nu.h, W.nu.h),
                       block(V.nu.f, W.nu.f))
    elif isinstance(V.nu, TrivialAction) and isinstance(W.nu, TrivialAction):
        nu = TrivialAction(n)
    else:
        raise UnsupportedGroup("direct sum of mismatched action types")
    return WeakHCModule(pair, pi, nu, name=f"{V.name}+{W.name}")


# ---------------------------------------------------------------------------
# names accepted on the command line


def named_pair(name: str) -> HCPair:
    name = name.strip().lower()
    if name == "sl2":
        return sl2_pair()
    if name in ("sl2_torus", "sl2-torus"):
        return sl2_torus_pair()
    if name == "gl1":
        return gl1_pair()
    if name.startswith("abelian"):
        tail = name[len("abelian"):].strip("()")
        return abelian_pair(int(tail) if tail else 1)
    raise KeyError(f"unknown pair name {name!r}")


def named_module(pair: HCPair, name: str) -> WeakHCModule:
    raw = name.strip()
    low = raw.lower()
    if low == "trivial":
        return trivial_module(pair)
    if low == "adjoint":
        return adjoint_module(pair)
    if raw[:1] in ("F", "f") and raw[1:].isdigit():
        return sl2_module(pair, int(raw[1:]))
    if raw[:1] in ("C", "c") and raw[1:]:
        if not isinstance(pair.group, Torus) or pair.g.dim != 1:
            raise KeyError("character modules need the gl1 pair")
        val = frac(raw[1:])
        w = int(val) if val.denominator == 1 else 0
        return gl1_character(val, w)
    raise KeyError(f"unknown module name {name!r}")
