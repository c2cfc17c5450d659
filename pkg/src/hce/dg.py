"""Differential graded Lie algebras and their enveloping algebras.

Elements of an enveloping algebra are dicts mapping PBW monomials
(tuples of basis indices) to rational coefficients.  The PBW order is
the basis order of the underlying graded Lie algebra; a monomial is a
weakly increasing index tuple in which odd indices never repeat.

The filtration degree of a monomial counts its even letters only; odd
letters are exterior and do not grow under multiplication, so this is
the filtration that multiplication and the differential respect.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    AntisymmetryViolation,
    JacobiViolation,
    NotAModule,
)
from .lie import LieAlgebra
from .linalg import ONE, ZERO, frac

Monomial = Tuple[int, ...]
Element = Dict[Monomial, Fraction]
TensorElement = Dict[Tuple[Monomial, Monomial], Fraction]


class DGLieAlgebra:
    """Graded Lie algebra with a square-zero degree +1 differential.

    Brackets are stored for index pairs i <= j; the (j, i) value is
    derived from graded antisymmetry.  A diagonal entry (i, i) is only
    allowed when basis vector i has odd degree.
    """

    def __init__(self, names: Sequence[str], degrees: Sequence[int],
                 brackets: dict, diff: Optional[dict] = None):
        self.names = list(names)
        self.degrees = list(degrees)
        self.dim = len(self.names)
        assert len(self.degrees) == self.dim
        self.table: dict = {}
        for (i, j), coeffs in brackets.items():
            coeffs = {k: frac(c) for k, c in coeffs.items() if frac(c)}
            if i == j and self.degrees[i] % 2 == 0:
                if coeffs:
                    raise AntisymmetryViolation(
                        f"[{self.names[i]},{self.names[i]}] must vanish (even)")
                continue
            if i > j:
                i, j = j, i
                sign = -(-1) ** (self.degrees[i] * self.degrees[j])
                coeffs = {k: sign * c for k, c in coeffs.items()}
            if (i, j) in self.table and self.table[(i, j)] != coeffs:
                raise AntisymmetryViolation(
                    f"conflicting brackets for ({self.names[i]},{self.names[j]})")
            if coeffs:
                self.table[(i, j)] = coeffs
        self.diff: dict = {}
        for i, v in (diff or {}).items():
            v = {k: frac(c) for k, c in v.items() if frac(c)}
            if v:
                self.diff[i] = v

    @classmethod
    def from_even(cls, k: LieAlgebra) -> "DGLieAlgebra":
        return cls(k.names, [0] * k.dim, dict(k.table))

    def parity(self, i: int) -> int:
        return self.degrees[i] % 2

    def bracket(self, i: int, j: int) -> dict:
        if i <= j:
            return dict(self.table.get((i, j), {}))
        sign = -(-1) ** (self.degrees[i] * self.degrees[j])
        return {k: sign * c for k, c in self.table.get((j, i), {}).items()}

    def d_of(self, i: int) -> dict:
        return dict(self.diff.get(i, {}))

    def validate(self) -> None:
        # degrees of brackets and of the differential
        for (i, j), coeffs in self.table.items():
            want = self.degrees[i] + self.degrees[j]
            for k in coeffs:
                if self.degrees[k] != want:
                    raise AntisymmetryViolation(
                        f"bracket ({self.names[i]},{self.names[j]}) has wrong degree")
        for i, v in self.diff.items():
            for k in v:
                if self.degrees[k] != self.degrees[i] + 1:
                    raise NotAModule(f"d({self.names[i]}) has wrong degree")
        # graded Jacobi on all index triples
        for a, b, c in itertools.product(range(self.dim), repeat=3):
            acc: dict = {}
            for (x, y, z) in ((a, b, c), (b, c, a), (c, a, b)):
                sign = (-1) ** (self.degrees[x] * self.degrees[z])
                inner = self.bracket(y, z)
                for m, u in inner.items():
                    for n, v in self.bracket(x, m).items():
                        s = acc.get(n, ZERO) + sign * u * v
                        if s:
                            acc[n] = s
                        else:
                            acc.pop(n, None)
            if acc:
                names = (self.names[a], self.names[b], self.names[c])
                raise JacobiViolation(f"graded Jacobi fails on {names}")
        # d is a derivation of the bracket and squares to zero
        for i in range(self.dim):
            for j in range(self.dim):
                lhs: dict = {}
                for m, u in self.bracket(i, j).items():
                    for n, v in self.d_of(m).items():
                        _acc(lhs, n, u * v)
                rhs: dict = {}
                for m, u in self.d_of(i).items():
                    for n, v in self.bracket(m, j).items():
                        _acc(rhs, n, u * v)
                sgn = (-1) ** self.degrees[i]
                for m, u in self.d_of(j).items():
                    for n, v in self.bracket(i, m).items():
                        _acc(rhs, n, sgn * u * v)
                if lhs != rhs:
                    raise NotAModule(
                        f"d is not a derivation on ({self.names[i]},{self.names[j]})")
        for i in range(self.dim):
            acc = {}
            for m, u in self.d_of(i).items():
                for n, v in self.d_of(m).items():
                    _acc(acc, n, u * v)
            if acc:
                raise NotAModule(f"d^2 != 0 at {self.names[i]}")

    def __repr__(self):
        return f"DGLieAlgebra({self.names}, degrees={self.degrees})"


def _acc(target: dict, key, val) -> None:
    s = target.get(key, ZERO) + val
    if s:
        target[key] = s
    else:
        target.pop(key, None)


def underline(k: LieAlgebra) -> DGLieAlgebra:
    """The cone-style extension of k: an even copy in degree 0 and an odd
    copy in degree -1, with d carrying each odd generator to its even
    partner.

    Brackets: evens as in k, [even X, odd y] = ([X, y])odd, odd-odd zero.
    """
    n = k.dim
    names = list(k.names) + [f"{nm}-" for nm in k.names]
    degrees = [0] * n + [-1] * n
    brackets: dict = {}
    for (i, j), coeffs in k.table.items():
        brackets[(i, j)] = dict(coeffs)
    for i in range(n):
        for j in range(n):
            br = k.bracket(i, j)
            if br:
                # [X_i, xi_j] lands in the odd copy
                brackets[(i, n + j)] = {n + m: c for m, c in br.items()}
    diff = {n + i: {i: ONE} for i in range(n)}
    dg = DGLieAlgebra(names, degrees, brackets, diff)
    dg.validate()
    return dg


class Envelope:
    """Enveloping algebra of a DG Lie algebra, with PBW normal forms.

    Words are straightened against the basis order: an adjacent pair
    x_a x_b with a > b rewrites to (-1)^{|a||b|} x_b x_a + [x_a, x_b],
    and a repeated odd letter rewrites to half its self-bracket.
    """

    def __init__(self, dg: DGLieAlgebra):
        self.dg = dg
        self._nf_cache: Dict[Monomial, Element] = {}
        self.even_idx = [i for i in range(dg.dim) if dg.parity(i) == 0]
        self.odd_idx = [i for i in range(dg.dim) if dg.parity(i) == 1]

    # -- elements ---------------------------------------------------------

    def one(self) -> Element:
        return {(): ONE}

    def gen(self, i: int) -> Element:
        return {(i,): ONE}

    def from_vector(self, v: dict) -> Element:
        return {(i,): frac(c) for i, c in v.items() if frac(c)}

    def monomial_degree(self, mon: Monomial) -> int:
        return sum(self.dg.degrees[i] for i in mon)

    def monomial_filtration(self, mon: Monomial) -> int:
        return sum(1 for i in mon if self.dg.parity(i) == 0)

    def element_degree(self, el: Element) -> Optional[int]:
        degs = {self.monomial_degree(m) for m in el}
        if not degs:
            return None
        assert len(degs) == 1, f"inhomogeneous element: degrees {degs}"
        return degs.pop()

    def element_filtration(self, el: Element) -> int:
        return max((self.monomial_filtration(m) for m in el), default=0)

    # -- normal form ------------------------------------------------------

    def nf(self, word: Monomial) -> Element:
        """Normal form of an arbitrary word of basis indices."""
        word = tuple(word)
        hit = self._nf_cache.get(word)
        if hit is not None:
            return dict(hit)
        out = self._straighten(word)
        self._nf_cache[word] = dict(out)
        return out

    def _straighten(self, word: Monomial) -> Element:
        dg = self.dg
        for i in range(len(word) - 1):
            a, b = word[i], word[i + 1]
            if a < b:
                continue
            if a == b:
                if dg.parity(a) == 0:
                    continue
                # odd square: x x = (1/2)[x, x]
                out: Element = {}
                for k, c in dg.bracket(a, a).items():
                    sub = self.nf(word[:i] + (k,) + word[i + 2:])
                    for m, x in sub.items():
                        _acc(out, m, Fraction(c, 2) * x)
                return out
            sign = Fraction((-1) ** (dg.degrees[a] * dg.degrees[b]))
            out = {}
            for m, x in self.nf(word[:i] + (b, a) + word[i + 2:]).items():
                _acc(out, m, sign * x)
            for k, c in dg.bracket(a, b).items():
                for m, x in self.nf(word[:i] + (k,) + word[i + 2:]).items():
                    _acc(out, m, c * x)
            return out
        return {word: ONE}

    def mul(self, a: Element, b: Element) -> Element:
        out: Element = {}
        for ma, xa in a.items():
            for mb, xb in b.items():
                for m, x in self.nf(ma + mb).items():
                    _acc(out, m, xa * xb * x)
        return out

    def mul_many(self, *els: Element) -> Element:
        out = self.one()
        for e in els:
            out = self.mul(out, e)
        return out

    # -- differential and antiautomorphism --------------------------------

    def differential(self, el: Element) -> Element:
        out: Element = {}
        for mon, coeff in el.items():
            sign = ONE
            for i, letter in enumerate(mon):
                dv = self.dg.d_of(letter)
                if dv:
                    for k, c in dv.items():
                        for m, x in self.nf(mon[:i] + (k,) + mon[i + 1:]).items():
                            _acc(out, m, coeff * sign * c * x)
                sign *= (-1) ** self.dg.degrees[letter]
        return out

    def iota(self, el: Element) -> Element:
        """Principal antiautomorphism: reverses words, negates generators."""
        out: Element = {}
        for mon, coeff in el.items():
            r = len(mon)
            cross = sum(self.dg.degrees[mon[i]] * self.dg.degrees[mon[j]]
                        for i in range(r) for j in range(i + 1, r))
            sign = Fraction((-1) ** (r + cross))
            for m, x in self.nf(tuple(reversed(mon))).items():
                _acc(out, m, coeff * sign * x)
        return out

    # -- PBW bases ---------------------------------------------------------

    def monomials(self, filt_bound: int) -> List[Monomial]:
        """All PBW monomials of filtration <= filt_bound, in a fixed order
        (sorted by filtration, then length, then lexicographically)."""
        evens = []
        for total in range(filt_bound + 1):
            evens.extend(itertools.combinations_with_replacement(self.even_idx, total))
        odds = []
        for r in range(len(self.odd_idx) + 1):
            odds.extend(itertools.combinations(self.odd_idx, r))
        out = []
        for ev in evens:
            for od in odds:
                mon = tuple(sorted(ev + od))
                out.append(mon)
        out.sort(key=lambda m: (self.monomial_filtration(m), len(m), m))
        return out

    # -- Hopf structure -----------------------------------------------------

    def comultiply(self, el: Element) -> TensorElement:
        """Coproduct into the twisted tensor square, generators primitive."""
        out: TensorElement = {}
        for mon, coeff in el.items():
            acc: TensorElement = {((), ()): coeff}
            for letter in mon:
                nxt: TensorElement = {}
                ld = self.dg.degrees[letter]
                for (m1, m2), c in acc.items():
                    # (m1 (x) m2) (letter (x) 1), Koszul sign past m2
                    sign = Fraction((-1) ** (self.monomial_degree(m2) * ld))
                    for m, x in self.nf(m1 + (letter,)).items():
                        _acc(nxt, (m, m2), c * sign * x)
                    # (m1 (x) m2) (1 (x) letter)
                    for m, x in self.nf(m2 + (letter,)).items():
                        _acc(nxt, (m1, m), c * x)
                acc = nxt
            for key, c in acc.items():
                _acc(out, key, c)
        return out

    def counit(self, el: Element) -> Fraction:
        return el.get((), ZERO)

    def tensor_mul(self, A: TensorElement, B: TensorElement) -> TensorElement:
        out: TensorElement = {}
        for (a1, a2), x in A.items():
            d2 = self.monomial_degree(a2)
            for (b1, b2), y in B.items():
                sign = Fraction((-1) ** (d2 * self.monomial_degree(b1)))
                left = self.nf(a1 + b1)
                right = self.nf(a2 + b2)
                for m1, u in left.items():
                    for m2, v in right.items():
                        _acc(out, (m1, m2), x * y * sign * u * v)
        return out

    def tensor_differential(self, A: TensorElement) -> TensorElement:
        out: TensorElement = {}
        for (m1, m2), c in A.items():
            for n1, x in self.differential({m1: ONE}).items():
                _acc(out, (n1, m2), c * x)
            sign = Fraction((-1) ** self.monomial_degree(m1))
            for n2, x in self.differential({m2: ONE}).items():
                _acc(out, (m1, n2), c * sign * x)
        return out

    def antipode_convolution(self, el: Element) -> Element:
        """m o (iota (x) id) o comultiply; equals counit times 1 when the
        antiautomorphism is the antipode."""
        out: Element = {}
        for (m1, m2), c in self.comultiply(el).items():
            for n1, x in self.iota({m1: ONE}).items():
                for m, y in self.nf(n1 + m2).items():
                    _acc(out, m, c * x * y)
        return out


# ---------------------------------------------------------------------------
# structural checks, used by tests and the verification command


def hopf_checks(env: Envelope, filt_bound: int = 2) -> dict:
    """Verify the bialgebra axioms and the antipode property on all PBW
    monomials up to the given filtration.  Returns slug -> bool."""
    mons = env.monomials(filt_bound)
    results = {}

    ok = True
    for m in mons:
        c = env.comultiply({m: ONE})
        left: dict = {}
        right: dict = {}
        for (a, b), x in c.items():
            for (a1, a2), y in env.comultiply({a: ONE}).items():
                _acc(left, (a1, a2, b), x * y)
            for (b1, b2), y in env.comultiply({b: ONE}).items():
                _acc(right, (a, b1, b2), x * y)
        if left != right:
            ok = False
            break
    results["coproduct-coassociative"] = ok

    ok = True
    for m in mons:
        c = env.comultiply({m: ONE})
        lft: Element = {}
        rgt: Element = {}
        for (a, b), x in c.items():
            if a == ():
                _acc(lft, b, x)
            if b == ():
                _acc(rgt, a, x)
        if lft != {m: ONE} or rgt != {m: ONE}:
            ok = False
            break
    results["counit-identity"] = ok

    ok = True
    pairs = [(m1, m2) for m1 in mons for m2 in mons
             if env.monomial_filtration(m1) + env.monomial_filtration(m2) <= filt_bound]
    for m1, m2 in pairs:
        prod = env.mul({m1: ONE}, {m2: ONE})
        lhs = env.comultiply(prod)
        rhs = env.tensor_mul(env.comultiply({m1: ONE}), env.comultiply({m2: ONE}))
        if lhs != rhs:
            ok = False
            break
    results["coproduct-multiplicative"] = ok

    ok = True
    for m in mons:
        lhs = env.tensor_differential(env.comultiply({m: ONE}))
        rhs = env.comultiply(env.differential({m: ONE}))
        if lhs != rhs:
            ok = False
            break
    results["coproduct-chain-map"] = ok

    ok = True
    for m in mons:
        got = env.antipode_convolution({m: ONE})
        want = {(): env.counit({m: ONE})} if env.counit({m: ONE}) else {}
        if got != want:
            ok = False
            break
    results["antipode-convolution-identity"] = ok

    ok = True
    for m1, m2 in pairs:
        d1 = env.monomial_degree(m1)
        d2 = env.monomial_degree(m2)
        lhs = env.iota(env.mul({m1: ONE}, {m2: ONE}))
        sign = Fraction((-1) ** (d1 * d2))
        rhs = env.mul(env.iota({m2: ONE}), env.iota({m1: ONE}))
        rhs = {k: sign * v for k, v in rhs.items()}
        if lhs != rhs:
            ok = False
            break
    results["antiautomorphism-reverses-products"] = ok

    ok = True
    for m in mons:
        if env.iota(env.differential({m: ONE})) != env.differential(env.iota({m: ONE})):
            ok = False
            break
    results["antiautomorphism-chain-map"] = ok

    results["differential-squares-to-zero"] = all(
        not env.differential(env.differential({m: ONE})) for m in mons)

    results["filtration-respected"] = all(
        env.element_filtration(env.mul({m1: ONE}, {m2: ONE}))
        <= env.monomial_filtration(m1) + env.monomial_filtration(m2)
        for m1, m2 in pairs)

    return results


def pbw_count(env: Envelope, filt_bound: int) -> int:
    """Number of PBW monomials of filtration <= filt_bound; must equal
    sum_j C(n_odd, j) * C(filt_bound + n_even, n_even)."""
    return len(env.monomials(filt_bound))


def expected_pbw_count(n_even: int, n_odd: int, filt_bound: int) -> int:
    from math import comb
    return (2 ** n_odd) * comb(filt_bound + n_even, n_even)
