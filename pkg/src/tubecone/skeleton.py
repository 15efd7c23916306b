"""Skeletal morphism calculus of a unitary fusion category.

Objects are words of simple labels.  The canonical basis of C(r, w) for a word
w = (l1, ..., ln) and a simple r is the set of left-parenthesised splitting
trees r -> ((l1 l2) l3 ...) ln; a tree is stored as the tuple of its internal
vertices ((e2, m2), ..., (en, mn)), where e_k is the channel after fusing the
first k letters and m_k the multiplicity index of the vertex e_{k-1} l_k -> e_k.
These trees are orthonormal, so a morphism is a family of matrices, one per
root label, and composition and dagger are blockwise.

F-move convention (multiplicity indices as in the category file):

    |a (b c)_f ; d>_{mu, nu} = sum_{e, alpha, beta} F[a,b,c,d,e,alpha,beta,f,mu,nu] |(a b)_e c ; d>_{alpha, beta}

where mu indexes b c -> f, nu indexes a f -> d, alpha indexes a b -> e and beta
indexes e c -> d.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .fusion_ring import FusionData, fp_dimensions
from .scalars import Domain, NumberField

__all__ = [
    "FSymbolTable",
    "Morphism",
    "StandardSolution",
    "SkeletonError",
    "pentagon_check",
    "tree_basis",
    "compose",
    "tensor",
    "dagger",
    "standard_solution",
    "categorical_trace",
    "tree_root",
]

Word = tuple
Tree = tuple


class SkeletonError(ValueError):
    pass


def tree_root(word: Word, tree: Tree, unit: int) -> int:
    if tree:
        return tree[-1][0]
    return word[0] if word else unit


class FSymbolTable:
    """F-symbols of a skeletal unitary fusion category, plus tree and cup caches."""

    def __init__(self, data: FusionData, entries: Mapping[tuple, object], field: NumberField | None = None,
                 name: str = "", check_gauge: bool = True):
        self.data = data
        self.name = name
        self.field = field
        self.domain = Domain(field)
        self.exact = field is not None
        self.entries = {}
        for key, v in entries.items():
            key = tuple(int(k) for k in key)
            if len(key) != 10:
                raise SkeletonError(f"F-symbol key {key} must have 10 indices")
            v = self.domain.scalar(v)
            if not self.domain.is_zero(v):
                self.entries[key] = v
        self._trees: dict = {}
        self._tree_index: dict = {}
        self._join: dict = {}
        self._std: dict = {}
        self._dims = None
        if check_gauge:
            self._check_unit_gauge()

    def __repr__(self):
        mode = self.field.name if self.exact else "float"
        return f"FSymbolTable({self.name or 'unnamed'}, rank={self.data.rank}, field={mode})"

    # -- data access ----------------------------------------------------------------------
    def get(self, a, b, c, d, e, al, be, f, mu, nu):
        return self.entries.get((a, b, c, d, e, al, be, f, mu, nu), self.domain.zero)

    def row_labels(self, a, b, c, d):
        N = self.data.N
        return [(e, al, be) for e in range(self.data.rank)
                for al in range(N[a, b, e]) for be in range(N[e, c, d])]

    def col_labels(self, a, b, c, d):
        N = self.data.N
        return [(f, mu, nu) for f in range(self.data.rank)
                for mu in range(N[b, c, f]) for nu in range(N[a, f, d])]

    def matrix(self, a, b, c, d):
        rows, cols = self.row_labels(a, b, c, d), self.col_labels(a, b, c, d)
        M = self.domain.zeros((len(rows), len(cols)))
        for i, (e, al, be) in enumerate(rows):
            for j, (f, mu, nu) in enumerate(cols):
                M[i, j] = self.get(a, b, c, d, e, al, be, f, mu, nu)
        return rows, cols, M

    def _check_unit_gauge(self):
        one, n = self.data.unit, self.data.rank
        for (a, b, c, d, e, al, be, f, mu, nu) in self.entries:
            N = self.data.N
            if not (al < N[a, b, e] and be < N[e, c, d] and mu < N[b, c, f] and nu < N[a, f, d]):
                raise SkeletonError(f"F-symbol entry {(a, b, c, d, e, al, be, f, mu, nu)} is not admissible")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if one not in (a, b, c):
                        continue
                    for d in range(n):
                        rows, cols, M = self.matrix(a, b, c, d)
                        for i, (e, al, be) in enumerate(rows):
                            for j, (f, mu, nu) in enumerate(cols):
                                if a == one:
                                    want = e == b and f == d and mu == be and nu == 0
                                elif b == one:
                                    want = e == a and f == c and be == nu and al == 0 and mu == 0
                                else:
                                    want = e == d and f == b and al == nu and be == 0 and mu == 0
                                target = self.domain.one if want else self.domain.zero
                                if not self._close(M[i, j], target):
                                    raise SkeletonError(
                                        "F-symbols violate the unit gauge at "
                                        f"{tuple(self.data.names[x] for x in (a, b, c, d))}")

    def _close(self, x, y, tol=1e-12):
        if self.exact:
            return x == y
        return abs(x - y) <= tol

    def to_float(self) -> "FSymbolTable":
        if not self.exact:
            return self
        out = FSymbolTable(self.data, {k: complex(v) for k, v in self.entries.items()}, None,
                           self.name, check_gauge=False)
        return out

    # -- tree bases -----------------------------------------------------------------------
    def trees(self, word: Sequence[int], root: int) -> list:
        word = tuple(word)
        key = (word, root)
        hit = self._trees.get(key)
        if hit is not None:
            return hit
        N = self.data.N
        if len(word) == 0:
            out = [()] if root == self.data.unit else []
        elif len(word) == 1:
            out = [()] if root == word[0] else []
        else:
            out = []
            last = word[-1]
            for e in range(self.data.rank):
                m = N[e, last, root]
                if not m:
                    continue
                for t in self.trees(word[:-1], e):
                    for mu in range(m):
                        out.append(t + ((root, mu),))
        self._trees[key] = out
        self._tree_index[key] = {t: i for i, t in enumerate(out)}
        return out

    def tree_index(self, word, root) -> dict:
        word = tuple(word)
        self.trees(word, root)
        return self._tree_index[(word, root)]

    def roots(self, word: Sequence[int]) -> list[int]:
        return [r for r in range(self.data.rank) if self.trees(word, r)]

    # -- change of basis for tensor products -------------------------------------------------
    def join(self, u: Word, v: Word, r: int):
        """Columns (a, ta, b, tb, m) and the matrix expressing (ta (x) tb) o (r -> a b)_m in trees(u+v, r)."""
        u, v = tuple(u), tuple(v)
        key = (u, v, r)
        hit = self._join.get(key)
        if hit is not None:
            return hit
        N, one, n = self.data.N, self.data.unit, self.data.rank
        rows = self.trees(u + v, r)
        rindex = self.tree_index(u + v, r)
        cols = []
        entries = []  # (row, col, value)
        if not v:
            for ta in self.trees(u, r):
                cols.append((r, ta, one, (), 0))
                entries.append((rindex[ta], len(cols) - 1, self.domain.one))
        elif not u:
            for tb in self.trees(v, r):
                cols.append((one, (), r, tb, 0))
                entries.append((rindex[tb], len(cols) - 1, self.domain.one))
        elif len(v) == 1:
            ell = v[0]
            for a in range(n):
                m = N[a, ell, r]
                if not m:
                    continue
                for ta in self.trees(u, a):
                    for mu in range(m):
                        cols.append((a, ta, ell, (), mu))
                        entries.append((rindex[ta + ((r, mu),)], len(cols) - 1, self.domain.one))
        else:
            ell = v[-1]
            vp = v[:-1]
            sub_cache = {}
            for a in range(n):
                tas = self.trees(u, a)
                if not tas:
                    continue
                for b in range(n):
                    m = N[a, b, r]
                    if not m:
                        continue
                    for tb in self.trees(v, b):
                        bp = tree_root(vp, tb[:-1], one)
                        tbp = tb[:-1]
                        mub = tb[-1][1]
                        for ta in tas:
                            for mu in range(m):
                                cols.append((a, ta, b, tb, mu))
                                j = len(cols) - 1
                                # a (bp ell)_b -> sum_e F (a bp)_e ell
                                for e in range(n):
                                    for al in range(N[a, bp, e]):
                                        for be in range(N[e, ell, r]):
                                            fv = self.get(a, bp, ell, r, e, al, be, b, mub, mu)
                                            if self.domain.is_zero(fv):
                                                continue
                                            if e not in sub_cache:
                                                sc, sm = self.join(u, vp, e)
                                                sub_cache[e] = ({c: i for i, c in enumerate(sc)}, sm)
                                            cidx, sm = sub_cache[e]
                                            k = cidx[(a, ta, bp, tbp, al)]
                                            col = sm[:, k]
                                            sub_rows = self.trees(u + vp, e)
                                            for i, rho in enumerate(sub_rows):
                                                if not self.domain.is_zero(col[i]):
                                                    entries.append((rindex[rho + ((r, be),)], j, fv * col[i]))
        M = self.domain.zeros((len(rows), len(cols)))
        for i, j, val in entries:
            M[i, j] = M[i, j] + val
        if len(rows) != len(cols):
            raise SkeletonError(f"tree count mismatch joining {u} and {v} at root {r}")
        self._join[key] = (cols, M)
        return cols, M

    # -- dimensions and cups --------------------------------------------------------------
    def dims(self):
        """Categorical dimensions d(z) = R*R from the standard solutions (exact in exact mode)."""
        if self._dims is None:
            self._dims = [standard_solution(z, self).d for z in range(self.data.rank)]
        return self._dims

    def dims_float(self) -> np.ndarray:
        return np.array([complex(d).real for d in self.dims()])


# ---------------------------------------------------------------------------------------------
class Morphism:
    """A morphism source -> target given by one matrix per root (rows: target trees, cols: source trees)."""

    __slots__ = ("F", "source", "target", "blocks")

    def __init__(self, F: FSymbolTable, source: Sequence[int], target: Sequence[int], blocks: Mapping[int, np.ndarray]):
        self.F = F
        self.source = tuple(source)
        self.target = tuple(target)
        self.blocks = dict(blocks)

    # constructors
    @classmethod
    def zero(cls, F, source, target) -> "Morphism":
        blocks = {}
        for r in F.roots(source):
            nt = len(F.trees(target, r))
            if nt:
                blocks[r] = F.domain.zeros((nt, len(F.trees(source, r))))
        return cls(F, source, target, blocks)

    @classmethod
    def identity(cls, F, word) -> "Morphism":
        return cls.identity_between(F, word, word)

    @classmethod
    def identity_between(cls, F, source, target) -> "Morphism":
        """Canonical identification of two words that agree after deleting unit letters."""
        one = F.data.unit
        if tuple(x for x in source if x != one) != tuple(x for x in target if x != one):
            raise SkeletonError(f"words {source} and {target} are not canonically isomorphic")
        blocks = {r: F.domain.eye(len(F.trees(source, r))) for r in F.roots(source)}
        return cls(F, source, target, blocks)

    @classmethod
    def basis_tree(cls, F, word, root, tree) -> "Morphism":
        """The splitting tree as an isometry (root,) -> word."""
        src = (root,)
        idx = F.tree_index(word, root)
        col = F.domain.zeros((len(F.trees(word, root)), 1))
        col[idx[tree], 0] = F.domain.one
        return cls(F, src, word, {root: col})

    @classmethod
    def matrix_unit(cls, F, source, target, root, t_index, s_index, coeff=None) -> "Morphism":
        m = cls.zero(F, source, target)
        m.blocks[root][t_index, s_index] = F.domain.one if coeff is None else coeff
        return m

    # algebra
    def __matmul__(self, other: "Morphism") -> "Morphism":
        return compose(self, other)

    def __add__(self, other: "Morphism") -> "Morphism":
        if (self.source, self.target) != (other.source, other.target):
            raise SkeletonError("adding morphisms with different source/target")
        blocks = dict(self.blocks)
        for r, b in other.blocks.items():
            blocks[r] = blocks[r] + b if r in blocks else b
        return Morphism(self.F, self.source, self.target, blocks)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s) -> "Morphism":
        return Morphism(self.F, self.source, self.target, {r: b * s for r, b in self.blocks.items()})

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    def dagger(self) -> "Morphism":
        return dagger(self)

    def max_abs(self) -> float:
        vals = [abs(complex(x)) for b in self.blocks.values() for x in np.asarray(b).reshape(-1)]
        return max(vals, default=0.0)

    def distance(self, other: "Morphism") -> float:
        return (self - other).max_abs()

    def is_zero(self) -> bool:
        if self.F.exact:
            return all(x.is_zero() for b in self.blocks.values() for x in b.reshape(-1))
        return self.max_abs() == 0.0

    def equals(self, other: "Morphism") -> bool:
        return (self - other).is_zero()

    def scalar(self):
        """Value of an endomorphism of a word whose only root is a single 1x1 block."""
        if len(self.blocks) != 1:
            raise SkeletonError("not a scalar morphism")
        (b,) = self.blocks.values()
        if b.shape != (1, 1):
            raise SkeletonError("not a scalar morphism")
        return b[0, 0]

    def __repr__(self):
        return f"Morphism({self.source} -> {self.target}, roots={sorted(self.blocks)})"


def tree_basis(word, root, F: FSymbolTable) -> list:
    return list(F.trees(tuple(word), root))


def compose(f: Morphism, g: Morphism) -> Morphism:
    """f o g."""
    if g.target != f.source:
        raise SkeletonError(f"cannot compose: target {g.target} != source {f.source}")
    blocks = {}
    for r, gb in g.blocks.items():
        fb = f.blocks.get(r)
        if fb is not None:
            blocks[r] = fb @ gb
    return Morphism(f.F, g.source, f.target, blocks)


def _ct(M):
    return np.conjugate(M).T


def dagger(f: Morphism) -> Morphism:
    return Morphism(f.F, f.target, f.source, {r: _ct(b) for r, b in f.blocks.items()})


def tensor(f: Morphism, g: Morphism, F: FSymbolTable | None = None) -> Morphism:
    F = F or f.F
    src, tgt = f.source + g.source, f.target + g.target
    blocks = {}
    for r in F.roots(src):
        if not F.trees(tgt, r):
            continue
        jt, Mt = F.join(f.target, g.target, r)
        js, Ms = F.join(f.source, g.source, r)
        by_key: dict = {}
        for j, (a, ta, b, tb, mu) in enumerate(js):
            by_key.setdefault((a, b, mu), []).append((j, ta, tb))
        D = F.domain.zeros((len(jt), len(js)))
        for i, (a, ta, b, tb, mu) in enumerate(jt):
            fa, gb = f.blocks.get(a), g.blocks.get(b)
            if fa is None or gb is None:
                continue
            ia = F.tree_index(f.target, a)[ta]
            ib = F.tree_index(g.target, b)[tb]
            for j, ta2, tb2 in by_key.get((a, b, mu), ()):
                D[i, j] = fa[ia, F.tree_index(f.source, a)[ta2]] * gb[ib, F.tree_index(g.source, b)[tb2]]
        blocks[r] = Mt @ D @ _ct(Ms)
    return Morphism(F, src, tgt, blocks)


# ---------------------------------------------------------------------------------------------
@dataclass
class StandardSolution:
    z: int
    R: Morphism      # 1 -> zbar z
    Rbar: Morphism   # 1 -> z zbar
    d: object
    phase: object    # kappa_z in R = kappa_z sqrt(d) e

    def residuals(self) -> dict:
        F = self.R.F
        z = self.z
        zb = F.data.dual[z]
        one_zb = Morphism.identity(F, (zb,))
        one_z = Morphism.identity(F, (z,))
        e1 = compose(tensor(one_zb, dagger(self.Rbar)), tensor(self.R, one_zb))
        e2 = compose(tensor(one_z, dagger(self.R)), tensor(self.Rbar, one_z))
        n1 = compose(dagger(self.R), self.R).scalar()
        n2 = compose(dagger(self.Rbar), self.Rbar).scalar()
        return {
            "conjugate_1": e1.distance(one_zb),
            "conjugate_2": e2.distance(one_z),
            "standardness": abs(complex(n1) - complex(n2)),
            "norm": abs(complex(n1) - complex(self.d)),
        }


def _cup(F, z, zb):
    """Unit-norm basis vector of C(1, z zb) as a morphism () -> (z, zb)."""
    one = F.data.unit
    (t,) = F.trees((z, zb), one)
    return Morphism(F, (), (z, zb), {one: Morphism.basis_tree(F, (z, zb), one, t).blocks[one]})


def standard_solution(z: int, F: FSymbolTable) -> StandardSolution:
    """Cups R: 1 -> zbar z and Rbar: 1 -> z zbar solving the conjugate equations, with R*R = Rbar*Rbar = d(z)."""
    hit = F._std.get(z)
    if hit is not None:
        return hit
    dom = F.domain
    zb = F.data.dual[z]
    e_r = _cup(F, zb, z)
    e_rb = _cup(F, z, zb)
    one_zb = Morphism.identity(F, (zb,))
    one_z = Morphism.identity(F, (z,))
    v1 = compose(tensor(one_zb, dagger(e_rb)), tensor(e_r, one_zb)).scalar()
    if dom.is_zero(v1, 1e-14):
        raise SkeletonError(f"conjugate equations degenerate for {F.data.names[z]}")
    if F.exact:
        d = (1 / (v1 * v1.conjugate())).sqrt()
        sd = d.sqrt()
    else:
        d = 1.0 / abs(v1) ** 2
        d = complex(np.sqrt(d))
        sd = complex(np.sqrt(d.real))
    phase = 1 / (d * v1)
    R = e_r.scale(phase * sd)
    Rbar = e_rb.scale(sd)
    sol = StandardSolution(z, R, Rbar, d, phase)
    res = sol.residuals()
    worst = max(res.values())
    if worst > 1e-10 or (F.exact and worst != 0.0 and not _exact_ok(sol)):
        raise SkeletonError(f"no standard solution for {F.data.names[z]} with the given F-symbols: {res}")
    F._std[z] = sol
    return sol


def _exact_ok(sol: StandardSolution) -> bool:
    F = sol.R.F
    z, zb = sol.z, F.data.dual[sol.z]
    one_zb, one_z = Morphism.identity(F, (zb,)), Morphism.identity(F, (z,))
    e1 = compose(tensor(one_zb, dagger(sol.Rbar)), tensor(sol.R, one_zb))
    e2 = compose(tensor(one_z, dagger(sol.R)), tensor(sol.Rbar, one_z))
    return e1.equals(one_zb) and e2.equals(one_z)


def categorical_trace(f: Morphism):
    """Tr(f) = sum over roots r of d(r) * trace(f_r)."""
    if f.source != f.target:
        raise SkeletonError("categorical trace of a non-endomorphism")
    F = f.F
    dims = F.dims()
    total = F.domain.zero
    for r, b in f.blocks.items():
        for i in range(b.shape[0]):
            total = total + dims[r] * b[i, i]
    return total


# ---------------------------------------------------------------------------------------------
def pentagon_check(F: FSymbolTable) -> float:
    """Maximum absolute deviation between the two F-move paths ((ab)c)d <- a(b(cd))."""
    N, n = F.data.N, F.data.rank
    worst = 0.0
    get = F.get
    rng = range(n)
    for a in rng:
        for b in rng:
            for c in rng:
                for d in rng:
                    for e in rng:
                        right = [(x, y, n1, n2, n3) for y in rng for x in rng
                                 for n3 in range(N[c, d, y]) for n2 in range(N[b, y, x]) for n1 in range(N[a, x, e])]
                        if not right:
                            continue
                        left = [(f, g, b1, b2, b3) for f in rng for g in rng
                                for b1 in range(N[a, b, f]) for b2 in range(N[f, c, g]) for b3 in range(N[g, d, e])]
                        for (f, g, b1, b2, b3) in left:
                            for (x, y, n1, n2, n3) in right:
                                p1 = F.domain.zero
                                for be in range(N[f, y, e]):
                                    p1 = p1 + get(a, b, y, e, f, b1, be, x, n2, n1) * get(f, c, d, e, g, b2, b3, y, n3, be)
                                p2 = F.domain.zero
                                for h in rng:
                                    for al in range(N[b, c, h]):
                                        for be in range(N[h, d, x]):
                                            t1 = get(b, c, d, x, h, al, be, y, n3, n2)
                                            if F.domain.is_zero(t1):
                                                continue
                                            for al2 in range(N[a, h, g]):
                                                p2 = p2 + t1 * get(a, h, d, e, g, al2, b3, x, be, n1) * \
                                                    get(a, b, c, g, f, b1, b2, h, al, al2)
                                diff = abs(complex(p1 - p2))
                                if diff > worst:
                                    worst = diff
    return worst


def unitarity_check(F: FSymbolTable) -> float:
    """Max deviation of every F-matrix from unitarity (non-square matrices count as 1)."""
    n = F.data.rank
    worst = 0.0
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    rows, cols, M = F.matrix(a, b, c, d)
                    if not rows and not cols:
                        continue
                    if len(rows) != len(cols):
                        return 1.0
                    Mf = F.domain.to_float(M)
                    worst = max(worst, float(np.max(np.abs(Mf.conj().T @ Mf - np.eye(len(rows))))))
    return worst


def dimension_crosscheck(F: FSymbolTable) -> float:
    """max_z |R*R - FP dimension| linking the cups to the fusion rules."""
    fp = fp_dimensions(F.data)
    return float(np.max(np.abs(F.dims_float() - fp)))
