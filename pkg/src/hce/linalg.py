"""Exact sparse linear algebra over the rationals.

Everything downstream (normal forms, filtrations, cohomology) reduces to
rank / kernel / solve computations done here with fractions.Fraction.
No floating point anywhere; results are deterministic: elimination scans
columns in increasing order and picks pivots by the smallest-numerator
heuristic with (row, col) index as the tie break.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Optional

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ints, strings like '2/3', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


# ---------------------------------------------------------------------------
# sparse vectors: dict index -> nonzero Fraction


def vec_add(u: dict, v: dict) -> dict:
    out = dict(u)
    for i, c in v.items():
        s = out.get(i, ZERO) + c
        if s:
            out[i] = s
        else:
            out.pop(i, None)
    return out


def vec_scale(c: Fraction, v: dict) -> dict:
    if not c:
        return {}
    return {i: c * x for i, x in v.items()}


def vec_sub(u: dict, v: dict) -> dict:
    return vec_add(u, vec_scale(-ONE, v))


def vec_eq(u: dict, v: dict) -> bool:
    return vec_sub(u, v) == {}


def vec_from_list(xs) -> dict:
    return {i: frac(x) for i, x in enumerate(xs) if frac(x)}


def vec_to_list(v: dict, n: int) -> list:
    out = [ZERO] * n
    for i, c in v.items():
        out[i] = c
    return out


class SparseMatrix:
    """Matrix as dict (row, col) -> nonzero Fraction."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Optional[dict] = None):
        self.rows = rows
        self.cols = cols
        self.data = {}
        if data:
            for (r, c), x in data.items():
                x = frac(x)
                if x:
                    assert 0 <= r < rows and 0 <= c < cols, (r, c, rows, cols)
                    self.data[(r, c)] = x

    @classmethod
    def from_rows(cls, rows_list) -> "SparseMatrix":
        r = len(rows_list)
        c = len(rows_list[0]) if r else 0
        data = {}
        for i, row in enumerate(rows_list):
            assert len(row) == c
            for j, x in enumerate(row):
                x = frac(x)
                if x:
                    data[(i, j)] = x
        return cls(r, c, data)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): ONE for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    @classmethod
    def from_columns(cls, cols_list: Iterable[dict], rows: int) -> "SparseMatrix":
        cols_list = list(cols_list)
        data = {}
        for j, col in enumerate(cols_list):
            for i, x in col.items():
                if x:
                    data[(i, j)] = frac(x)
        return cls(rows, len(cols_list), data)

    def set(self, r: int, c: int, x) -> None:
        x = frac(x)
        if x:
            self.data[(r, c)] = x
        else:
            self.data.pop((r, c), None)

    def get(self, r: int, c: int) -> Fraction:
        return self.data.get((r, c), ZERO)

    def shape(self):
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseMatrix)
            and self.shape() == other.shape()
            and self.data == other.data
        )

    def __hash__(self):
        raise TypeError("SparseMatrix is mutable, not hashable")

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        assert self.shape() == other.shape()
        out = SparseMatrix(self.rows, self.cols, dict(self.data))
        for k, x in other.data.items():
            s = out.data.get(k, ZERO) + x
            if s:
                out.data[k] = s
            else:
                out.data.pop(k, None)
        return out

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + other.scale(-ONE)

    def scale(self, c) -> "SparseMatrix":
        c = frac(c)
        if not c:
            return SparseMatrix(self.rows, self.cols)
        return SparseMatrix(
            self.rows, self.cols, {k: c * x for k, x in self.data.items()}
        )

    def __mul__(self, other):
        if isinstance(other, SparseMatrix):
            return self.matmul(other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __neg__(self):
        return self.scale(-ONE)

    def matmul(self, other: "SparseMatrix") -> "SparseMatrix":
        assert self.cols == other.rows, (self.shape(), other.shape())
        # index other's rows once; walk self's entries
        by_row: dict = {}
        for (r, c), x in other.data.items():
            by_row.setdefault(r, []).append((c, x))
        acc: dict = {}
        for (r, k), x in self.data.items():
            for c, y in by_row.get(k, ()):
                key = (r, c)
                s = acc.get(key, ZERO) + x * y
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return SparseMatrix(self.rows, other.cols, acc)

    def apply(self, v: dict) -> dict:
        """Matrix times sparse column vector."""
        out: dict = {}
        for (r, c), x in self.data.items():
            y = v.get(c)
            if y:
                s = out.get(r, ZERO) + x * y
                if s:
                    out[r] = s
                else:
                    out.pop(r, None)
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.cols, self.rows, {(c, r): x for (r, c), x in self.data.items()}
        )

    def column(self, j: int) -> dict:
        return {r: x for (r, c), x in self.data.items() if c == j}

    def to_rows(self) -> list:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (r, c), x in self.data.items():
            out[r][c] = x
        return out

    def row_dicts(self) -> list:
        out = [dict() for _ in range(self.rows)]
        for (r, c), x in self.data.items():
            out[r][c] = x
        return out

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self.data)})"


# ---------------------------------------------------------------------------
# elimination


def _pivot_key(x: Fraction, row_index: int):
    return (abs(x.numerator), x.denominator, row_index)


def echelonize(rows: list, pivoting: str = "minnum"):
    """Row-reduce a list of sparse row dicts in place (copies are made).

    Returns (echelon_rows, pivot_cols).  Columns are scanned in increasing
    order; within a column the pivot row minimizes |numerator| (then
    denominator, then original row index).  pivoting='first' takes the
    lowest-index candidate row instead; used to cross-check determinism.
    """
    work = [dict(r) for r in rows]
    ech: list = []  # (pivot_col, row_dict) with pivot coefficient 1
    cols = sorted({c for r in work for c in r})
    remaining = list(range(len(work)))
    for col in cols:
        cands = [i for i in remaining if work[i].get(col)]
        if not cands:
            continue
        if pivoting == "minnum":
            best = min(cands, key=lambda i: _pivot_key(work[i][col], i))
        elif pivoting == "first":
            best = cands[0]
        else:
            raise ValueError(pivoting)
        piv = work[best]
        inv = ONE / piv[col]
        piv = {c: inv * x for c, x in piv.items()}
        remaining.remove(best)
        for i in remaining:
            x = work[i].get(col)
            if x:
                work[i] = vec_sub(work[i], vec_scale(x, piv))
        ech.append((col, piv))
    return ech, [c for c, _ in ech]


def reduce_against(ech: list, v: dict) -> dict:
    """Reduce v against echelon rows, returning the remainder."""
    v = dict(v)
    for col, row in ech:
        x = v.get(col)
        if x:
            v = vec_sub(v, vec_scale(x, row))
    return v


def rank(M: SparseMatrix, pivoting: str = "minnum") -> int:
    ech, _ = echelonize(M.row_dicts(), pivoting)
    return len(ech)


def kernel_basis(M: SparseMatrix) -> list:
    """Basis of the right kernel {v : Mv = 0} as sparse vectors.

    One basis vector per free column, taken in increasing column order,
    with coefficient 1 at the free column.
    """
    ech, pivots = echelonize(M.row_dicts())
    pivset = set(pivots)
    basis = []
    for j in range(M.cols):
        if j in pivset:
            continue
        v = {j: ONE}
        # back-substitute pivot coordinates, highest pivot first
        for col, row in reversed(ech):
            # row has 1 at col; value of the row functional on v so far
            s = ZERO
            for c, x in row.items():
                if c == col:
                    continue
                y = v.get(c)
                if y:
                    s += x * y
            if s:
                v[col] = -s
            else:
                v.pop(col, None)
        basis.append(v)
    return basis


def rank_kernel(M: SparseMatrix):
    ech, pivots = echelonize(M.row_dicts())
    return len(pivots), kernel_basis(M)


def solve(M: SparseMatrix, b: dict) -> Optional[dict]:
    """One solution of Mv = b, or None.  (Augmented-column elimination.)"""
    aug = {}
    for (r, c), x in M.data.items():
        aug[(r, c)] = x
    for r, x in b.items():
        if x:
            aug[(r, M.cols)] = x
    A = SparseMatrix(M.rows, M.cols + 1, aug)
    ech, pivots = echelonize(A.row_dicts())
    if M.cols in pivots:
        return None  # inconsistent
    v: dict = {}
    for col, row in reversed(ech):
        s = row.get(M.cols, ZERO)
        for c, x in row.items():
            if c == col or c == M.cols:
                continue
            y = v.get(c)
            if y:
                s -= x * y
        # after subtracting, row says v[col] + (stuff) = rhs
        if s:
            v[col] = s
        else:
            v.pop(col, None)
    assert vec_eq(M.apply(v), b)
    return v


class Subspace:
    """Echelonized span of sparse vectors inside an ambient space."""

    def __init__(self, dim_ambient: int, vectors: Iterable[dict] = ()):
        self.ambient = dim_ambient
        self.ech: list = []  # (pivot_col, row) rows are unit-pivot echelon
        for v in vectors:
            self.add(v)

    def add(self, v: dict) -> bool:
        """Add a vector to the span.  True if it was independent."""
        r = reduce_against(self.ech, v)
        if not r:
            return False
        col = min(r)
        row = vec_scale(ONE / r[col], r)
        # keep earlier rows reduced against the new one
        self.ech = [(c, vec_sub(e, vec_scale(e.get(col, ZERO), row)))
                    for c, e in self.ech]
        self.ech.append((col, row))
        self.ech.sort(key=lambda t: t[0])
        return True

    @property
    def dim(self) -> int:
        return len(self.ech)

    def contains(self, v: dict) -> bool:
        return not reduce_against(self.ech, v)

    def contains_space(self, other: "Subspace") -> bool:
        return all(self.contains(row) for _, row in other.ech)

    def basis(self) -> list:
        return [dict(row) for _, row in self.ech]

    def reduce(self, v: dict) -> dict:
        return reduce_against(self.ech, v)

    def coordinates(self, v: dict) -> Optional[dict]:
        """Coordinates of v in self.basis(), or None if v is outside."""
        v = dict(v)
        coords = {}
        for i, (col, row) in enumerate(self.ech):
            x = v.get(col)
            if x:
                coords[i] = x
                v = vec_sub(v, vec_scale(x, row))
        return coords if not v else None

    def complement_pivots(self) -> list:
        """Ambient coordinate indices completing the span to the whole space.

        Deterministic: lowest available indices first.
        """
        piv = {c for c, _ in self.ech}
        return [j for j in range(self.ambient) if j not in piv]


def intersect(U: Subspace, V: Subspace) -> Subspace:
    """Intersection via kernel of the stacked coordinate map."""
    bu, bv = U.basis(), V.basis()
    n = U.ambient
    assert V.ambient == n
    # columns: coefficients on bu then bv; rows: ambient coords of u - v
    data = {}
    for j, u in enumerate(bu):
        for i, x in u.items():
            data[(i, j)] = x
    for j, v in enumerate(bv):
        for i, x in v.items():
            data[(i, len(bu) + j)] = -x
    M = SparseMatrix(n, len(bu) + len(bv), data)
    out = Subspace(n)
    for k in kernel_basis(M):
        w: dict = {}
        for j, c in k.items():
            if j < len(bu):
                w = vec_add(w, vec_scale(c, bu[j]))
        out.add(w)
    return out


# ---------------------------------------------------------------------------
# bounded complexes


class FiniteComplex:
    """Bounded cochain complex of finite-dimensional rational spaces.

    dims maps degree -> dimension; d maps degree p to the matrix of
    d^p : V^p -> V^{p+1}.  Degrees outside dims are zero.  labels, when
    given, name the basis vectors of each degree (used in reports).
    """

    def __init__(self, dims: dict, d: dict, labels: Optional[dict] = None,
                 check: bool = True):
        self.dims = {p: n for p, n in dims.items() if n}
        self.d = {}
        for p, M in d.items():
            if M is not None and (self.dim(p) or self.dim(p + 1)):
                assert M.shape() == (self.dim(p + 1), self.dim(p)), (
                    p, M.shape(), self.dim(p + 1), self.dim(p))
                self.d[p] = M
        self.labels = labels or {}
        if check:
            self.validate()

    def dim(self, p: int) -> int:
        return self.dims.get(p, 0)

    def degrees(self) -> list:
        return sorted(self.dims)

    def diff(self, p: int) -> SparseMatrix:
        M = self.d.get(p)
        if M is None:
            return SparseMatrix.zero(self.dim(p + 1), self.dim(p))
        return M

    def validate(self) -> None:
        for p in self.degrees():
            if self.dim(p) and self.dim(p + 2):
                comp = self.diff(p + 1) * self.diff(p)
                assert comp.is_zero(), f"d^2 != 0 at degree {p}"

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def cohomology_data(self, p: int):
        """(cycles Subspace, boundaries Subspace, representative vectors)."""
        n = self.dim(p)
        cycles = Subspace(n)
        if n:
            if self.dim(p + 1):
                for v in kernel_basis(self.diff(p)):
                    cycles.add(v)
            else:
                for j in range(n):
                    cycles.add({j: ONE})
        bounds = Subspace(n)
        if n and self.dim(p - 1):
            dprev = self.diff(p - 1)
            for j in range(self.dim(p - 1)):
                col = dprev.column(j)
                if col:
                    bounds.add(col)
        reps = []
        grow = Subspace(n)
        for _, row in bounds.ech:
            grow.add(row)
        for v in cycles.basis():
            if grow.add(v):
                reps.append(v)
        return cycles, bounds, reps

    def cohomology_dims(self) -> dict:
        out = {}
        for p in self.degrees():
            _, _, reps = self.cohomology_data(p)
            if reps:
                out[p] = len(reps)
        return out

    def cohomology_class(self, p: int, v: dict, data=None) -> dict:
        """Coordinates of cocycle v in the chosen representative basis."""
        cycles, bounds, reps = data if data else self.cohomology_data(p)
        assert cycles.contains(v), "not a cocycle"
        M = SparseMatrix.from_columns(bounds.basis() + reps, self.dim(p))
        sol = solve(M, v)
        assert sol is not None
        nb = len(bounds.basis())
        return {i - nb: c for i, c in sol.items() if i >= nb}

    def shift_labels(self, p: int) -> list:
        lab = self.labels.get(p)
        return list(lab) if lab else [f"deg{p}[{i}]" for i in range(self.dim(p))]


def complex_cohomology(C: FiniteComplex) -> dict:
    """Per-degree cohomology dimensions (degrees with 0 omitted)."""
    return C.cohomology_dims()


def is_chain_map(f: dict, C: FiniteComplex, D: FiniteComplex, sign: int = 1) -> bool:
    """f: dict degree -> matrix V^p -> W^p; checks d_W f = sign * f d_V."""
    for p in C.degrees():
        fp = f.get(p, SparseMatrix.zero(D.dim(p), C.dim(p)))
        fn = f.get(p + 1, SparseMatrix.zero(D.dim(p + 1), C.dim(p + 1)))
        lhs = D.diff(p) * fp
        rhs = (fn * C.diff(p)).scale(sign)
        if lhs != rhs:
            return False
    return True


def induced_on_cohomology(f: dict, C: FiniteComplex, D: FiniteComplex) -> dict:
    """Matrices of H(f) w.r.t. the chosen representative bases."""
    out = {}
    for p in sorted(set(C.degrees()) | set(D.degrees())):
        cdat = C.cohomology_data(p)
        ddat = D.cohomology_data(p)
        hc, hd = len(cdat[2]), len(ddat[2])
        if not hc and not hd:
            continue
        M = SparseMatrix.zero(hd, hc)
        fp = f.get(p)
        for j, v in enumerate(cdat[2]):
            img = fp.apply(v) if fp is not None else {}
            coords = D.cohomology_class(p, img, ddat) if hd else {}
            for i, x in coords.items():
                M.set(i, j, x)
        out[p] = M
    return out


def is_quasi_iso_matrices(f: dict, C: FiniteComplex, D: FiniteComplex) -> bool:
    ind = induced_on_cohomology(f, C, D)
    for p in sorted(set(C.degrees()) | set(D.degrees())):
        hc = len(C.cohomology_data(p)[2])
        hd = len(D.cohomology_data(p)[2])
        if hc != hd:
            return False
        M = ind.get(p)
        if hc and (M is None or rank(M) != hc):
            return False
    return True
