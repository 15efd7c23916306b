"""The tube algebra A = (+)_{x,y,w} C(w x, y w) of a finite unitary fusion category.

Basis vectors of A^w_{x,y} are matrix units of the skeletal hom space: a common
root r, a tree of the word (w, x) and a tree of the word (y, w).  Both words
carry unit letters literally, so C(1 x, x 1) is the 1x1 block at root x.

Products follow the convolution rule

    (a.b)^k_{i,j} = sum_{s,m,l} sum_{V in onb(k, m l)} (1_j V*)(a^m_{s,j} 1_l)(1_m b^l_{i,s})(V 1_i),

so a.b is non-zero only when the source of a equals the target of b, and
A_{x,y} = p_y A p_x.  The star is

    (a*)^k_{i,j} = (Rbar_k* 1_j 1_k)(1_k (a^{kbar}_{j,i})* 1_k)(1_k 1_i R_k).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .fusion_ring import FusionAlgebraElement
from .scalars import scalar_from_json, scalar_to_json
from .skeleton import FSymbolTable, Morphism, compose, dagger, standard_solution, tensor

__all__ = [
    "TubeBasisVector",
    "TubeAlgebra",
    "TubeElement",
    "TubeAxiomReport",
    "STAR_CONVENTIONS",
    "tube_basis",
    "tube_multiply",
    "tube_star",
    "omega",
    "psi_map",
    "embed_fusion",
    "tube_axiom_report",
]

STAR_CONVENTIONS = ("standard", "negated")


class TubeBasisVector(NamedTuple):
    x: int      # source
    y: int      # target
    w: int      # weight
    root: int
    i: int      # tree of (w, x)
    j: int      # tree of (y, w)


def tube_basis(F: FSymbolTable, weights: Sequence[int] | None = None,
               sources: Sequence[int] | None = None, targets: Sequence[int] | None = None) -> list[TubeBasisVector]:
    n = F.data.rank
    weights = range(n) if weights is None else sorted(set(weights))
    sources = range(n) if sources is None else sorted(set(sources))
    targets = range(n) if targets is None else sorted(set(targets))
    out = []
    for x in sources:
        for y in targets:
            for w in weights:
                for r in range(n):
                    src, tgt = F.trees((w, x), r), F.trees((y, w), r)
                    for i in range(len(src)):
                        for j in range(len(tgt)):
                            out.append(TubeBasisVector(x, y, w, r, i, j))
    return out


def _basis_morphism(F: FSymbolTable, b: TubeBasisVector) -> Morphism:
    return Morphism.matrix_unit(F, (b.w, b.x), (b.y, b.w), b.root, b.j, b.i)


class TubeAlgebra:
    """Graded basis and structure constants of the tube algebra over chosen weights.

    ``mult[(a, b)]`` lists (c, value) with e_a . e_b = sum value e_c and ``star[a]``
    lists (c, value) with (e_a)* = sum value e_c; the star is antilinear.  Float
    copies ``M`` (n, n, n) and ``S`` (n, n) drive the numerical code.
    """

    def __init__(self, F: FSymbolTable, weights: Sequence[int] | None = None, convention: str = "standard",
                 structure: dict | None = None):
        if convention not in STAR_CONVENTIONS:
            raise ValueError(f"unknown star convention {convention!r}")
        self.F = F
        self.data = F.data
        self.domain = F.domain
        self.exact = F.exact
        self.convention = convention
        n = F.data.rank
        self.weights = tuple(range(n)) if weights is None else tuple(sorted(set(weights)))
        self.truncated = len(self.weights) < n
        self.basis = tube_basis(F, self.weights)
        self.index = {b: k for k, b in enumerate(self.basis)}
        self.dim = len(self.basis)
        self._by_grade: dict = {}
        for k, b in enumerate(self.basis):
            self._by_grade.setdefault((b.x, b.y, b.w), []).append(k)
        self.dims = F.dims()
        if structure is None:
            self.mult, self.dropped = self._compute_mult()
            self.star = self._compute_star()
        else:
            self.mult, self.star = structure["mult"], structure["star"]
            self.dropped = structure.get("dropped", False)
        self._build_float()

    def __repr__(self):
        return f"TubeAlgebra({self.F.name or 'category'}, dim={self.dim}, weights={len(self.weights)})"

    # -- indices ----------------------------------------------------------------------------
    def grade(self, x: int, y: int, w: int | None = None) -> list[int]:
        if w is not None:
            return list(self._by_grade.get((x, y, w), []))
        return [k for k, b in enumerate(self.basis) if b.x == x and b.y == y]

    def fusion_index(self, w: int) -> int:
        """Index of the embedded simple w, the single vector of A^w_{1,1}."""
        one = self.data.unit
        return self.index[TubeBasisVector(one, one, w, w, 0, 0)]

    def projection_index(self, m: int) -> int:
        return self.index[TubeBasisVector(m, m, self.data.unit, m, 0, 0)]

    def coordinates(self, mor: Morphism, x: int, y: int, w: int, out=None):
        """Coordinates of a morphism in C(w x, y w) in the tube basis, added into ``out``."""
        if mor.source != (w, x) or mor.target != (y, w):
            raise ValueError(f"morphism {mor} is not in C({(w, x)}, {(y, w)})")
        if out is None:
            out = self.domain.zeros(self.dim)
        for r, blk in mor.blocks.items():
            for j in range(blk.shape[0]):
                for i in range(blk.shape[1]):
                    v = blk[j, i]
                    if self.domain.is_zero(v):
                        continue
                    out[self.index[TubeBasisVector(x, y, w, r, i, j)]] += v
        return out

    def component(self, vec, x: int, y: int, w: int) -> Morphism:
        mor = Morphism.zero(self.F, (w, x), (y, w))
        for k in self._by_grade.get((x, y, w), []):
            b = self.basis[k]
            mor.blocks[b.root][b.j, b.i] = mor.blocks[b.root][b.j, b.i] + vec[k]
        return mor

    # -- structure constants ----------------------------------------------------------------
    def product_of_morphisms(self, a: Morphism, b: Morphism, xa, ya, ma, xb, yb, lb):
        """Raw convolution of a in C(m s, j m) and b in C(l i, s l), as coordinates."""
        F = self.F
        out = self.domain.zeros(self.dim)
        if xa != yb:
            return out, False
        m, l, i, j = ma, lb, xb, ya
        middle = compose(tensor(a, Morphism.identity(F, (l,))), tensor(Morphism.identity(F, (m,)), b))
        dropped = False
        for k in F.roots((m, l)):
            acc = None
            for t in F.trees((m, l), k):
                V = Morphism.basis_tree(F, (m, l), k, t)
                term = compose(tensor(Morphism.identity(F, (j,)), dagger(V)),
                               compose(middle, tensor(V, Morphism.identity(F, (i,)))))
                acc = term if acc is None else acc + term
            if acc is None:
                continue
            if k not in self.weights:
                dropped = dropped or not acc.is_zero()
                continue
            self.coordinates(acc, i, j, k, out)
        return out, dropped

    def _compute_mult(self):
        mult = {}
        dropped = False
        mors = [_basis_morphism(self.F, b) for b in self.basis]
        for p, bp in enumerate(self.basis):
            for q, bq in enumerate(self.basis):
                if bp.x != bq.y:
                    continue
                vec, dr = self.product_of_morphisms(mors[p], mors[q], bp.x, bp.y, bp.w, bq.x, bq.y, bq.w)
                dropped = dropped or dr
                entries = [(c, v) for c, v in enumerate(vec) if not self.domain.is_zero(v)]
                if entries:
                    mult[(p, q)] = entries
        return mult, dropped

    def star_of_morphism(self, a: Morphism, x: int, y: int, wbar: int) -> tuple[Morphism, int]:
        """The star of a in C(kbar x, y kbar) as a morphism in C(k y, x k)."""
        F = self.F
        k = self.data.dual[wbar]
        sol = standard_solution(k, F)
        ik, iy, ix = (Morphism.identity(F, (s,)) for s in (k, y, x))
        step1 = tensor(tensor(ik, iy), sol.R)
        step2 = tensor(tensor(ik, dagger(a)), ik)
        step3 = tensor(dagger(sol.Rbar), tensor(ix, ik))
        out = compose(step3, compose(step2, step1))
        if self.convention == "negated":
            out = out.scale(-1)
        return out, k

    def _compute_star(self):
        star = []
        for b in self.basis:
            k = self.data.dual[b.w]
            if k not in self.weights:
                raise ValueError("weight set must be closed under duality")
            mor, k = self.star_of_morphism(_basis_morphism(self.F, b), b.x, b.y, b.w)
            vec = self.coordinates(mor, b.y, b.x, k)
            star.append([(c, v) for c, v in enumerate(vec) if not self.domain.is_zero(v)])
        return star

    def _build_float(self):
        n = self.dim
        M = np.zeros((n, n, n), dtype=complex)
        for (p, q), entries in self.mult.items():
            for c, v in entries:
                M[p, q, c] = complex(v)
        S = np.zeros((n, n), dtype=complex)
        for a, entries in enumerate(self.star):
            for c, v in entries:
                S[c, a] = complex(v)
        self.M, self.S = M, S
        om = np.zeros(n)
        one = self.data.unit
        dims = self.F.dims_float()
        for k, b in enumerate(self.basis):
            if b.w == one and b.x == b.y:
                om[k] = dims[b.x]
        self.omega_vector = om
        self.is_real = not (np.any(np.abs(M.imag) > 0) or np.any(np.abs(S.imag) > 0))

    # -- element-level operations -------------------------------------------------------------
    def zero(self) -> "TubeElement":
        return TubeElement(self, self.domain.zeros(self.dim))

    def element(self, coeffs) -> "TubeElement":
        vec = self.domain.zeros(self.dim)
        if isinstance(coeffs, dict):
            for k, v in coeffs.items():
                vec[k] = self.domain.scalar(v)
        else:
            for k, v in enumerate(coeffs):
                vec[k] = self.domain.scalar(v)
        return TubeElement(self, vec)

    def basis_element(self, k: int) -> "TubeElement":
        return self.element({k: 1})

    def unit_projection(self, m: int) -> "TubeElement":
        return self.basis_element(self.projection_index(m))

    def multiply_vectors(self, u, v):
        if not self.exact:
            return np.einsum("a,b,abc->c", np.asarray(u, complex), np.asarray(v, complex), self.M)
        out = self.domain.zeros(self.dim)
        nu = [(p, x) for p, x in enumerate(u) if not x.is_zero()]
        nv = [(q, y) for q, y in enumerate(v) if not y.is_zero()]
        for p, x in nu:
            for q, y in nv:
                entries = self.mult.get((p, q))
                if entries is None:
                    continue
                xy = x * y
                for c, val in entries:
                    out[c] = out[c] + xy * val
        return out

    def star_vector(self, u):
        if not self.exact:
            return self.S @ np.conjugate(np.asarray(u, complex))
        out = self.domain.zeros(self.dim)
        for a, x in enumerate(u):
            if x.is_zero():
                continue
            xc = x.conjugate()
            for c, val in self.star[a]:
                out[c] = out[c] + xc * val
        return out

    def omega_of_vector(self, u):
        if not self.exact:
            return complex(np.dot(self.omega_vector, np.asarray(u, complex)))
        dims = self.dims
        one = self.data.unit
        total = self.domain.zero
        for k, b in enumerate(self.basis):
            if b.w == one and b.x == b.y and not u[k].is_zero():
                total = total + dims[b.x] * u[k]
        return total

    def to_fusion(self, u) -> FusionAlgebraElement:
        """Read an element of A_{1,1} back as a fusion-algebra element."""
        one = self.data.unit
        coeffs = {}
        for k, b in enumerate(self.basis):
            v = u[k]
            if self.domain.is_zero(v):
                continue
            if b.x != one or b.y != one:
                raise ValueError("element is not in A_{1,1}")
            coeffs[b.w] = v
        return FusionAlgebraElement(coeffs)

    def to_float(self) -> "TubeAlgebra":
        if not self.exact:
            return self
        Ff = self.F.to_float()
        mult = {key: [(c, complex(v)) for c, v in entries] for key, entries in self.mult.items()}
        star = [[(c, complex(v)) for c, v in entries] for entries in self.star]
        return TubeAlgebra(Ff, self.weights, self.convention,
                           structure={"mult": mult, "star": star, "dropped": self.dropped})

    # -- persistence --------------------------------------------------------------------------
    def dump(self, path, category_hash: str = "") -> None:
        obj = {
            "category_hash": category_hash,
            "field": self.F.field.name if self.exact else "float",
            "convention": self.convention,
            "weights": list(self.weights),
            "basis": [list(b) for b in self.basis],
            "mult": [[p, q, c, scalar_to_json(v)] for (p, q), es in sorted(self.mult.items()) for c, v in es],
            "star": [[a, c, scalar_to_json(v)] for a, es in enumerate(self.star) for c, v in es],
        }
        Path(path).write_text(json.dumps(obj) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, F: FSymbolTable, path, category_hash: str = "") -> "TubeAlgebra":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        if category_hash and obj.get("category_hash") != category_hash:
            raise ValueError("structure constants were computed for a different category")
        field = F.field if F.exact else None
        mult: dict = {}
        for p, q, c, v in obj["mult"]:
            mult.setdefault((p, q), []).append((c, scalar_from_json(v, field)))
        star: list = [[] for _ in obj["basis"]]
        for a, c, v in obj["star"]:
            star[a].append((c, scalar_from_json(v, field)))
        alg = cls(F, obj["weights"], obj["convention"], structure={"mult": mult, "star": star})
        if [list(b) for b in alg.basis] != obj["basis"]:
            raise ValueError("basis in structure-constant file does not match the category")
        return alg


class TubeElement:
    """A coefficient vector over the basis of a :class:`TubeAlgebra`."""

    __slots__ = ("algebra", "vec")

    def __init__(self, algebra: TubeAlgebra, vec):
        self.algebra = algebra
        self.vec = vec

    def __add__(self, other):
        return TubeElement(self.algebra, self.vec + other.vec)

    def __sub__(self, other):
        return TubeElement(self.algebra, self.vec - other.vec)

    def __neg__(self):
        return TubeElement(self.algebra, -self.vec)

    def scale(self, s):
        return TubeElement(self.algebra, self.vec * s)

    def __rmul__(self, s):
        return self.scale(s)

    def __mul__(self, other):
        if isinstance(other, TubeElement):
            return tube_multiply(self, other)
        return self.scale(other)

    def star(self):
        return tube_star(self)

    def omega(self):
        return omega(self)

    def component(self, x, y, w) -> Morphism:
        return self.algebra.component(self.vec, x, y, w)

    def support(self) -> list[tuple[int, int, int]]:
        dom = self.algebra.domain
        return sorted({self.algebra.basis[k][:3] for k, v in enumerate(self.vec) if not dom.is_zero(v)})

    def to_fusion(self) -> FusionAlgebraElement:
        return self.algebra.to_fusion(self.vec)

    def max_abs(self) -> float:
        return max((abs(complex(v)) for v in self.vec), default=0.0)

    def distance(self, other) -> float:
        return (self - other).max_abs()

    def is_zero(self) -> bool:
        dom = self.algebra.domain
        return all(dom.is_zero(v) for v in self.vec)

    def equals(self, other) -> bool:
        return (self - other).is_zero()

    def __repr__(self):
        return f"TubeElement(support={self.support()})"


def tube_multiply(a: TubeElement, b: TubeElement) -> TubeElement:
    if a.algebra is not b.algebra:
        raise ValueError("elements of different tube algebras")
    return TubeElement(a.algebra, a.algebra.multiply_vectors(a.vec, b.vec))


def tube_star(a: TubeElement) -> TubeElement:
    return TubeElement(a.algebra, a.algebra.star_vector(a.vec))


def omega(a: TubeElement):
    """Weight-1 diagonal categorical trace."""
    return a.algebra.omega_of_vector(a.vec)


def psi_map(algebra: TubeAlgebra, z: Sequence[int], x: int, y: int, gamma: Morphism) -> TubeElement:
    """Psi^z_{x,y}(gamma) = (sum over alpha in onb C(w, z) of (1_y alpha*) gamma (alpha 1_x))_w."""
    F = algebra.F
    z = tuple(z)
    if gamma.source != z + (x,) or gamma.target != (y,) + z:
        raise ValueError(f"gamma must lie in C({z + (x,)}, {(y,) + z}), got {gamma}")
    out = algebra.domain.zeros(algebra.dim)
    ix, iy = Morphism.identity(F, (x,)), Morphism.identity(F, (y,))
    for w in algebra.weights:
        for t in F.trees(z, w):
            al = Morphism.basis_tree(F, z, w, t)
            term = compose(tensor(iy, dagger(al)), compose(gamma, tensor(al, ix)))
            algebra.coordinates(term, x, y, w, out)
    return TubeElement(algebra, out)


def embed_fusion(algebra: TubeAlgebra, x: FusionAlgebraElement) -> TubeElement:
    vec = algebra.domain.zeros(algebra.dim)
    for w, c in x.items():
        vec[algebra.fusion_index(w)] = algebra.domain.scalar(c)
    return TubeElement(algebra, vec)


# ---------------------------------------------------------------------------------------------
@dataclass
class TubeAxiomReport:
    dim: int
    associativity: float
    star_antimultiplicative: float
    star_involution: float
    omega_gram_min_eig: float
    omega_tracial: float
    projections: float
    trials: int
    extra: dict = field(default_factory=dict)

    def ok(self, tol: float = 1e-10) -> bool:
        return (max(self.associativity, self.star_antimultiplicative, self.star_involution,
                    self.omega_tracial, self.projections) < tol and self.omega_gram_min_eig > 0)

    def lines(self) -> list[str]:
        return [
            f"tube algebra dimension  {self.dim}",
            f"associativity           {self.associativity:.3e}",
            f"(ab)* - b*a*            {self.star_antimultiplicative:.3e}",
            f"(a*)* - a               {self.star_involution:.3e}",
            f"Omega Gram min eig      {self.omega_gram_min_eig:.6f}",
            f"Omega traciality        {self.omega_tracial:.3e}",
            f"p_m relations           {self.projections:.3e}",
        ]


def _random_vector(alg: TubeAlgebra, rng: np.random.Generator):
    if alg.exact:
        return alg.domain.asarray([int(v) for v in rng.integers(-3, 4, alg.dim)])
    return rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)


def omega_gram(alg: TubeAlgebra) -> np.ndarray:
    """G[i, j] = Omega(e_j* e_i), the inner product of the basis under <a, b> = Omega(b* a)."""
    Sf = alg.S
    # Omega(e_j* e_i) = sum_c conj-star coefficients; star(e_j) = S[:, j]
    G = np.einsum("cj,cid,d->ij", Sf, alg.M, alg.omega_vector)
    return G


def tube_axiom_report(alg: TubeAlgebra, trials: int = 100, seed: int = 0) -> TubeAxiomReport:
    rng = np.random.default_rng(seed)
    assoc = anti = invol = 0.0
    mul, st = alg.multiply_vectors, alg.star_vector

    def diff(u, v):
        return max((abs(complex(p - q)) for p, q in zip(u, v)), default=0.0)

    for _ in range(trials):
        a, b, c = (_random_vector(alg, rng) for _ in range(3))
        ab = mul(a, b)
        assoc = max(assoc, diff(mul(ab, c), mul(a, mul(b, c))))
        anti = max(anti, diff(st(ab), mul(st(b), st(a))))
        invol = max(invol, diff(st(st(a)), a))
    G = omega_gram(alg)
    Gh = (G + G.conj().T) / 2
    herm = float(np.max(np.abs(G - G.conj().T))) if alg.dim else 0.0
    min_eig = float(np.linalg.eigvalsh(Gh).min()) if alg.dim else 0.0
    one = alg.data.unit
    corner = alg.grade(one, one)
    trace = 0.0
    for p in corner:
        for q in corner:
            e_p, e_q = alg.domain.zeros(alg.dim), alg.domain.zeros(alg.dim)
            e_p[p], e_q[q] = alg.domain.one, alg.domain.one
            trace = max(trace, abs(complex(alg.omega_of_vector(mul(e_p, e_q)) - alg.omega_of_vector(mul(e_q, e_p)))))
    proj = 0.0
    n = alg.data.rank
    for m in range(n):
        pm = alg.domain.zeros(alg.dim)
        pm[alg.projection_index(m)] = alg.domain.one
        proj = max(proj, diff(mul(pm, pm), pm), diff(st(pm), pm))
        for m2 in range(n):
            if m2 != m:
                pm2 = alg.domain.zeros(alg.dim)
                pm2[alg.projection_index(m2)] = alg.domain.one
                proj = max(proj, max(abs(complex(v)) for v in mul(pm, pm2)))
    return TubeAxiomReport(alg.dim, assoc, anti, invol, min_eig, trace, proj, trials,
                           {"gram_hermitian": herm, "truncated": alg.truncated})
