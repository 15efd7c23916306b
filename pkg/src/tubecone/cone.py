"""The tube cone: Gram-matrix assembly, constructive certificates and exact verification.

An element of the cone is sum_x sum_{p,q} Q_x[p, q] b_p b_q* where b_p runs over
the tube basis of A_{x,1} = (+)_w C(w x, 1 w) and Q_x is positive semidefinite;
a vector v with Q = v v* contributes a a* for a = sum_p v_p b_p.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .fusion_ring import FusionAlgebraElement, LaplacianSpec, build_laplacian, fa_multiply
from .scalars import ExactScalar, format_rational, parse_rational, scalar_from_json, scalar_to_json
from .skeleton import Morphism, compose, dagger, tensor
from .tube import TubeAlgebra, embed_fusion, psi_map

__all__ = [
    "ConeSupport",
    "GramDecomposition",
    "SOSMap",
    "Certificate",
    "Verdict",
    "CertificateError",
    "assemble_sos_map",
    "word_cups",
    "order_unit_certificate",
    "laplacian_positivity_certificate",
    "l1_absorption",
    "ldl_psd",
    "verify_certificate",
    "laplacian_target",
    "rational_upper_bound",
    "VERIFIER_VERSION",
]

VERIFIER_VERSION = "tubecone-verify-1"


class CertificateError(ValueError):
    pass


# ---------------------------------------------------------------------------------------------
class ConeSupport:
    """Source labels X and weights W of a truncated cone, with the basis of each column A_{x,1}."""

    def __init__(self, algebra: TubeAlgebra, X: Sequence[int] | None = None, W: Sequence[int] | None = None):
        n = algebra.data.rank
        one = algebra.data.unit
        X = tuple(range(n)) if X is None else tuple(sorted(set(X)))
        W = tuple(range(n)) if W is None else tuple(sorted(set(W)))
        if one not in X or one not in W:
            raise ValueError("cone support must contain the unit in both X and W")
        missing = [w for w in W if w not in algebra.weights]
        if missing:
            raise ValueError(f"weights {missing} are not in the tube algebra")
        self.algebra = algebra
        self.X_requested = X
        self.W = W
        self.basis: dict[int, list[int]] = {}
        for x in X:
            idx = [k for w in W for k in algebra.grade(x, one, w)]
            if idx:
                self.basis[x] = idx
        self.X = tuple(self.basis)

    @classmethod
    def ball(cls, algebra: TubeAlgebra, S: Sequence[int], radius: int) -> "ConeSupport":
        """X = W = labels reachable from 1 in at most ``radius`` steps along S."""
        N = algebra.data.N
        ball = {algebra.data.unit}
        frontier = set(ball)
        for _ in range(radius):
            nxt = {c for a in frontier for s in S for c in range(algebra.data.rank) if N[a, s, c]}
            frontier = nxt - ball
            ball |= nxt
        closed = ball | {algebra.data.dual[a] for a in ball}
        return cls(algebra, closed, closed)

    def block_sizes(self) -> dict[int, int]:
        return {x: len(v) for x, v in self.basis.items()}

    def names(self) -> dict:
        nm = self.algebra.data.names
        return {"X": [nm[x] for x in self.X_requested], "W": [nm[w] for w in self.W]}

    def index_in_block(self, x: int) -> dict[int, int]:
        return {k: p for p, k in enumerate(self.basis[x])}

    def __repr__(self):
        return f"ConeSupport(blocks={self.block_sizes()})"


class SOSMap:
    """Lambda(Q) = sum_x sum_{p,q} Q_x[p, q] b_p b_q*, read in the simple-object basis."""

    def __init__(self, support: ConeSupport):
        self.support = support
        alg = support.algebra
        self.algebra = alg
        self.labels = tuple(range(alg.data.rank))
        dom = alg.domain
        one = alg.data.unit
        self.tensors: dict[int, np.ndarray] = {}
        self.float_tensors: dict[int, np.ndarray] = {}
        for x, idx in support.basis.items():
            n = len(idx)
            T = dom.zeros((len(self.labels), n, n))
            stars = []
            for q in idx:
                e = dom.zeros(alg.dim)
                e[q] = dom.one
                stars.append(alg.star_vector(e))
            for pi, p in enumerate(idx):
                e = dom.zeros(alg.dim)
                e[p] = dom.one
                for qi in range(n):
                    prod = alg.multiply_vectors(e, stars[qi])
                    for k, v in enumerate(prod):
                        if dom.is_zero(v):
                            continue
                        b = alg.basis[k]
                        if b.x != one or b.y != one:
                            raise CertificateError("cone product left A_{1,1}; star convention is inconsistent")
                        T[b.w, pi, qi] = v
            self.tensors[x] = T
            self.float_tensors[x] = dom.to_float(T)

    def apply(self, gram: "GramDecomposition | Mapping[int, np.ndarray]") -> FusionAlgebraElement:
        blocks = gram.blocks if isinstance(gram, GramDecomposition) else gram
        dom = self.algebra.domain
        exact = self.algebra.exact and all(
            np.asarray(B).dtype == object for B in blocks.values())
        coeffs: dict = {}
        for x, B in blocks.items():
            if x not in self.tensors:
                if _all_zero(B):
                    continue
                raise CertificateError(f"Gram block for {self.algebra.data.names[x]} outside the support")
            T = self.tensors[x] if exact else self.float_tensors[x]
            B = np.asarray(B) if exact else np.asarray(dom.to_float(B) if np.asarray(B).dtype == object else B, complex)
            if B.shape != T.shape[1:]:
                raise CertificateError(f"Gram block for {self.algebra.data.names[x]} has shape {B.shape}, expected {T.shape[1:]}")
            for w in self.labels:
                if exact:
                    s = dom.zero
                    Tw = T[w]
                    for p in range(B.shape[0]):
                        for q in range(B.shape[1]):
                            if not B[p, q].is_zero() and not Tw[p, q].is_zero():
                                s = s + B[p, q] * Tw[p, q]
                else:
                    s = complex(np.sum(T[w] * B))
                coeffs[w] = coeffs[w] + s if w in coeffs else s
        return FusionAlgebraElement(coeffs)

    def apply_float(self, blocks: Mapping[int, np.ndarray]) -> np.ndarray:
        out = np.zeros(len(self.labels), dtype=complex)
        for x, B in blocks.items():
            out += np.einsum("wpq,pq->w", self.float_tensors[x], np.asarray(B, complex))
        return out


def _all_zero(B) -> bool:
    return all(complex(v) == 0 for v in np.asarray(B).reshape(-1))


def assemble_sos_map(support: ConeSupport) -> SOSMap:
    return SOSMap(support)


# ---------------------------------------------------------------------------------------------
class GramDecomposition:
    """One Hermitian matrix per source label x over the support basis of A_{x,1}."""

    def __init__(self, support: ConeSupport, blocks: Mapping[int, np.ndarray] | None = None):
        self.support = support
        self.domain = support.algebra.domain
        self.blocks: dict[int, np.ndarray] = {}
        for x, n in support.block_sizes().items():
            self.blocks[x] = self.domain.zeros((n, n))
        if blocks:
            for x, B in blocks.items():
                self.blocks[x] = np.asarray(B, dtype=object if self.domain.exact else complex)

    def copy(self) -> "GramDecomposition":
        return GramDecomposition(self.support, {x: B.copy() for x, B in self.blocks.items()})

    def add_outer(self, x: int, v, coef=1) -> None:
        """Q_x += coef * v v*."""
        B = self.blocks[x]
        n = len(v)
        for p in range(n):
            if self.domain.is_zero(v[p]):
                continue
            for q in range(n):
                if self.domain.is_zero(v[q]):
                    continue
                B[p, q] = B[p, q] + coef * v[p] * v[q].conjugate()

    def add_unit(self, coef) -> None:
        """Add coef * p_1 p_1*, i.e. coef times the unit."""
        alg = self.support.algebra
        x = alg.data.unit
        p = self.support.index_in_block(x)[alg.projection_index(x)]
        self.blocks[x][p, p] = self.blocks[x][p, p] + coef

    def __add__(self, other: "GramDecomposition") -> "GramDecomposition":
        out = self.copy()
        for x, B in other.blocks.items():
            out.blocks[x] = out.blocks[x] + B
        return out

    def scale(self, s) -> "GramDecomposition":
        return GramDecomposition(self.support, {x: B * s for x, B in self.blocks.items()})

    def min_eigenvalues(self) -> dict[int, float]:
        out = {}
        for x, B in self.blocks.items():
            Bf = self.domain.to_float(B)
            out[x] = float(np.linalg.eigvalsh((Bf + Bf.conj().T) / 2).min()) if Bf.size else 0.0
        return out

    def to_json(self) -> dict:
        nm = self.support.algebra.data.names
        return {nm[x]: [[scalar_to_json(v) for v in row] for row in B] for x, B in self.blocks.items()}

    @classmethod
    def from_json(cls, support: ConeSupport, obj: Mapping) -> "GramDecomposition":
        data = support.algebra.data
        field_ = support.algebra.F.field
        blocks = {}
        for name, rows in obj.items():
            x = data.index(name)
            blocks[x] = np.array([[scalar_from_json(v, field_) for v in row] for row in rows] or
                                 np.empty((0, 0)), dtype=object)
        return cls(support, blocks)


# ---------------------------------------------------------------------------------------------
def word_cups(F, z: Sequence[int]):
    """Nested standard solutions for a word z: (zbar, R: () -> zbar z, Rbar: () -> z zbar)."""
    from .skeleton import standard_solution

    z = tuple(z)
    one = F.data.unit
    if not z:
        e = Morphism(F, (), (), {one: F.domain.eye(1)})
        return (), e, e
    zbar1, R1, Rb1 = word_cups(F, z[:-1])
    last = z[-1]
    sol = standard_solution(last, F)
    lb = F.data.dual[last]
    if not z[:-1]:
        return (lb,), sol.R, sol.Rbar
    # R_z = (1_{lbar} R_{z'} 1_{last}) R_{last};  Rbar_z = (1_{z'} Rbar_{last} 1_{zbar'}) Rbar_{z'}
    R = compose(tensor(tensor(Morphism.identity(F, (lb,)), R1), Morphism.identity(F, (last,))), sol.R)
    Rb = compose(tensor(tensor(Morphism.identity(F, z[:-1]), sol.Rbar), Morphism.identity(F, zbar1)), Rb1)
    return (lb,) + zbar1, R, Rb


@dataclass
class OrderUnitResult:
    R: object
    gram: GramDecomposition
    b: object           # the tube element b in A_{1,x}
    sigma_norm: object


def order_unit_certificate(support: ConeSupport, z: Sequence[int], x: int, gamma: Morphism | None = None) -> OrderUnitResult:
    """R and a Gram decomposition with Lambda(gram) = R 1 - b* b, where b = Psi^z_{1,x}(gamma).

    gamma lies in C(z, x z) (or C(z 1, x z)); gamma = None means 1_z with x = 1.
    With G = (1_x Rbar_z*)(gamma 1_zbar) and sigma = G* G, the scalar s = G G* equals
    the norm of sigma and P = sigma / s is a projection, so tau = sqrt(s) (1 - P) and
    R = s d(z).  All square roots cancel in the Gram matrices.
    """
    alg = support.algebra
    F, dom = alg.F, alg.domain
    one = F.data.unit
    z = tuple(z)
    if gamma is None:
        if x != one:
            raise ValueError("gamma = identity requires x = 1")
        gamma = Morphism.identity_between(F, z, (one,) + z)
    if gamma.source == z + (one,):
        gamma = compose(gamma, Morphism.identity_between(F, z, z + (one,)))
    if gamma.source != z or gamma.target != (x,) + z:
        raise ValueError(f"gamma must lie in C({z}, {(x,) + z})")
    zbar, Rz, Rbz = word_cups(F, z)
    gamma1 = compose(gamma, Morphism.identity_between(F, z + (one,), z))
    b = psi_map(alg, z, one, x, gamma1)
    dz = compose(dagger(Rz), Rz).scalar()
    G = compose(tensor(Morphism.identity(F, (x,)), dagger(Rbz)), tensor(gamma, Morphism.identity(F, zbar)))
    gram = GramDecomposition(support)
    GG = compose(G, dagger(G))
    s = GG.blocks[x][0, 0] if x in GG.blocks else dom.zero
    if dom.is_zero(s, 1e-300):
        return OrderUnitResult(dom.zero, gram, b, dom.zero)
    sigma = compose(dagger(G), G)
    zz = z + zbar
    tau1 = Morphism.identity(F, zz) - sigma.scale(1 / s)
    cup = compose(tensor(Morphism.identity(F, z), Rz), Morphism.identity_between(F, z + (one,), z))
    for y in F.roots(zz):
        for t in F.trees(zz, y):
            al = Morphism.basis_tree(F, zz, y, t)
            g = compose(tensor(compose(dagger(al), tau1), Morphism.identity(F, z)), cup)
            c = psi_map(alg, z, one, y, g)
            a = alg.star_vector(c.vec)
            if all(dom.is_zero(v, 1e-15) for v in a):
                continue
            if y not in support.basis:
                raise CertificateError(f"order-unit certificate needs source {F.data.names[y]} outside the support")
            pos = support.index_in_block(y)
            v = dom.zeros(len(support.basis[y]))
            for k, val in enumerate(a):
                if dom.is_zero(val, 1e-15):
                    continue
                if k not in pos:
                    raise CertificateError("order-unit certificate needs weights outside the support")
                v[pos[k]] = val
            gram.add_outer(y, v, s)
    return OrderUnitResult(s * dz, gram, b, s)


def laplacian_positivity_certificate(support: ConeSupport, spec: LaplacianSpec) -> GramDecomposition:
    """Gram data for Delta = sum_a nu(a) d(a) / (2 kappa) [(1 - a/d)*(1 - a/d) + (d^2 - abar a) / d^2]."""
    alg = support.algebra
    data, dom = alg.data, alg.domain
    one = data.unit
    dims = alg.dims
    kappa = dom.scalar(spec.kappa)
    out = GramDecomposition(support)
    pos = support.index_in_block(one)
    for a in spec.S:
        d = dims[a]
        w = dom.scalar(spec.nu[a]) * d / (2 * kappa)
        abar = data.dual[a]
        v = dom.zeros(len(support.basis[one]))
        v[pos[alg.fusion_index(one)]] = dom.one
        ia = pos[alg.fusion_index(abar)]
        v[ia] = v[ia] - 1 / d
        out.add_outer(one, v, w)
        ou = order_unit_certificate(support, (a,), one)
        out = out + ou.gram.scale(w / (d * d))
    return out


# ---------------------------------------------------------------------------------------------
def rational_upper_bound(x, rel: float = 1e-15) -> Fraction:
    """Smallest-denominator-ish rational q >= x for a real field element x."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, ExactScalar):
        if x.is_rational():
            return x.to_fraction()
        f = float(x)
        pad = max(abs(f), 1.0) * rel
        while True:
            q = Fraction(f + pad).limit_denominator(1 << 60)
            if q >= x:
                return q
            pad *= 4
    f = float(x.real) if isinstance(x, complex) else float(x)
    return Fraction(f) + Fraction(abs(f) + 1) * Fraction(1, 10**12)


@dataclass
class AbsorptionResult:
    eta: object
    gram: GramDecomposition
    terms: list = field(default_factory=list)


def l1_absorption(support: ConeSupport, r: FusionAlgebraElement, rational_eta: bool = True) -> AbsorptionResult:
    """eta and Gram data E with Lambda(E) = eta 1 + r, for self-adjoint r.

    A self-dual z with real coefficient c costs |c| d(z):
        |c| d 1 + c z = (s/2)(1 + (c/s) z)*(1 + (c/s) z) + (c^2 / (2 s))(d^2 - z z),   s = |c| d.
    A pair z != zbar with c, conj(c) costs about 2 |c| d(z):
        e 1 + c z + conj(c) zbar = s (1 + (c/s) z)*(1 + (c/s) z) + (|c|^2 / s)(d^2 - zbar z),
    with e = s + |c|^2 d^2 / s, which is 2 |c| d at s = |c| d; when |c| is not in the field
    s = t d for a rational t close to |c|, which costs a relative excess of order (t - |c|)^2.
    """
    alg = support.algebra
    data, dom = alg.data, alg.domain
    one = data.unit
    dims = alg.dims
    c = {z: dom.scalar(v) for z, v in r.items()}
    for z, v in c.items():
        cz = c.get(data.dual[z], dom.zero)
        if not _close(v.conjugate() if dom.exact else np.conj(v), cz, dom):
            raise CertificateError(f"residual is not self-adjoint at {data.names[z]}")
    gram = GramDecomposition(support)
    pos = support.index_in_block(one)
    nblk = len(support.basis[one])
    eta = dom.zero
    terms = []
    done = set()
    for z in sorted(c):
        if z == one or z in done or dom.is_zero(c[z], 0.0):
            continue
        zb = data.dual[z]
        done |= {z, zb}
        cz = c[z]
        d = dims[z]
        if zb == z:
            cabs = _abs_real(cz, dom)
            s = cabs * d
            u = cz / s
            e = s
            weight, rest = s / 2, cz * cz / (2 * s)
        else:
            cabs2 = cz * cz.conjugate() if dom.exact else abs(cz) ** 2
            t = _sqrt_or_rational(cabs2, dom)
            s = t * d
            u = cz / s
            e = s + cabs2 * d * d / s
            weight, rest = s, cabs2 / s
        # a = (1 + u z)* = 1 + conj(u) zbar
        v = dom.zeros(nblk)
        v[pos[alg.fusion_index(one)]] = dom.one
        v[pos[alg.fusion_index(zb)]] = u.conjugate() if dom.exact else np.conj(u)
        gram.add_outer(one, v, weight)
        ou = order_unit_certificate(support, (z,), one)
        gram = gram + ou.gram.scale(rest)
        eta = eta + e
        terms.append((z, e))
    c1 = c.get(one, dom.zero)
    c1r = c1.real if dom.exact else complex(c1).real
    if _negative(c1r, dom):
        eta = eta - c1r
    else:
        gram.add_unit(c1r)
    if rational_eta and dom.exact:
        q = rational_upper_bound(eta)
        slack = dom.scalar(q) - eta
        if not slack.is_zero():
            gram.add_unit(slack)
        eta = dom.scalar(q)
    return AbsorptionResult(eta, gram, terms)


def _close(a, b, dom) -> bool:
    if dom.exact:
        return a == b
    return abs(complex(a) - complex(b)) <= 1e-12 * (1 + abs(complex(a)))


def _negative(x, dom) -> bool:
    return x.sign() < 0 if dom.exact else x < 0


def _abs_real(x, dom):
    if dom.exact:
        if not x.is_real():
            raise CertificateError("self-dual coefficient of a self-adjoint element must be real")
        return x if x.sign() >= 0 else -x
    return abs(complex(x).real)


def _sqrt_or_rational(x2, dom):
    if not dom.exact:
        return math.sqrt(abs(complex(x2)))
    try:
        return x2.sqrt()
    except ValueError:
        t = Fraction(math.sqrt(float(x2))).limit_denominator(1 << 40)
        return dom.scalar(t)


# ---------------------------------------------------------------------------------------------
@dataclass
class LDLResult:
    psd: bool
    pivots: list
    failure: str = ""


def ldl_psd(B) -> LDLResult:
    """Exact LDL* of a Hermitian matrix in fixed pivot order; PSD iff pivots are >= 0 and
    every zero pivot has a zero column below it."""
    A = np.array(B, dtype=object, copy=True)
    n = A.shape[0]
    pivots = []
    for i in range(n):
        for j in range(n):
            if A[i, j] != A[j, i].conjugate():
                return LDLResult(False, pivots, f"Q not Hermitian at ({i},{j})")
    for k in range(n):
        dk = A[k, k]
        if not dk.is_real():
            return LDLResult(False, pivots, f"Q not Hermitian: complex pivot {k}")
        sgn = dk.sign()
        pivots.append(dk)
        if sgn < 0:
            return LDLResult(False, pivots, f"Q not PSD: negative pivot {k} ({float(dk):.3e})")
        if sgn == 0:
            for i in range(k + 1, n):
                if not A[i, k].is_zero():
                    return LDLResult(False, pivots, f"Q not PSD: zero pivot {k} with non-zero column")
            continue
        inv = 1 / dk
        for i in range(k + 1, n):
            if A[i, k].is_zero():
                continue
            lik = A[i, k] * inv
            for j in range(k + 1, n):
                if not A[k, j].is_zero():
                    A[i, j] = A[i, j] - lik * A[k, j]
    return LDLResult(True, pivots)


# ---------------------------------------------------------------------------------------------
def laplacian_target(algebra: TubeAlgebra, delta: FusionAlgebraElement, k, eps) -> FusionAlgebraElement:
    """Delta^2 - k Delta + eps 1 over the algebra's scalar domain."""
    dom = algebra.domain
    delta = delta.map(dom.scalar)
    sq = fa_multiply(delta, delta, algebra.data)
    return sq - delta.scale(dom.scalar(k)) + FusionAlgebraElement({algebra.data.unit: dom.scalar(eps)})


@dataclass
class Certificate:
    """Exact data proving Delta^2 - k Delta + eps 1 in the truncated tube cone."""

    category: dict
    category_hash: str
    S: list
    nu: dict
    k: Fraction
    eps: Fraction
    eps0: Fraction
    eta: Fraction
    X: list
    W: list
    gram: dict          # name -> matrix of JSON scalars
    residual: dict      # name -> JSON scalar
    eta_gram: dict
    version: str = VERIFIER_VERSION
    notes: dict = field(default_factory=dict)

    @property
    def eps_proved(self) -> Fraction:
        return self.eps0 + self.eta

    def to_json(self) -> dict:
        return {
            "verifier_version": self.version,
            "category_hash": self.category_hash,
            "target": {"form": "Delta^2 - k Delta + eps 1", "k": format_rational(self.k),
                       "eps": format_rational(self.eps)},
            "laplacian": {"S": list(self.S), "nu": {k: format_rational(Fraction(v)) for k, v in self.nu.items()}},
            "support": {"X": list(self.X), "W": list(self.W)},
            "eps0": format_rational(self.eps0),
            "eta": format_rational(self.eta),
            "gram": self.gram,
            "residual": self.residual,
            "eta_gram": self.eta_gram,
            "notes": self.notes,
            "category": self.category,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def save(self, path) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def from_json(cls, obj: dict) -> "Certificate":
        try:
            return cls(
                category=obj["category"],
                category_hash=obj["category_hash"],
                S=list(obj["laplacian"]["S"]),
                nu={k: parse_rational(v) for k, v in obj["laplacian"]["nu"].items()},
                k=parse_rational(obj["target"]["k"]),
                eps=parse_rational(obj["target"]["eps"]),
                eps0=parse_rational(obj["eps0"]),
                eta=parse_rational(obj["eta"]),
                X=list(obj["support"]["X"]),
                W=list(obj["support"]["W"]),
                gram=obj["gram"],
                residual=obj["residual"],
                eta_gram=obj["eta_gram"],
                version=obj.get("verifier_version", VERIFIER_VERSION),
                notes=obj.get("notes", {}),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise CertificateError(f"malformed certificate: {exc}") from exc

    @classmethod
    def load(cls, path) -> "Certificate":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CertificateError(f"{path}: not valid JSON ({exc})") from exc
        return cls.from_json(obj)


@dataclass
class Verdict:
    accepted: bool
    messages: list
    margins: dict

    def __bool__(self):
        return self.accepted

    def summary(self) -> str:
        head = "accepted" if self.accepted else "rejected"
        return "\n".join([head] + [f"  {m}" for m in self.messages])


def verify_certificate(cert: Certificate, algebra: TubeAlgebra | None = None) -> Verdict:
    """Exact re-verification of every identity in a certificate."""
    from .categories import category_from_dict, category_hash

    msgs: list[str] = []
    margins: dict = {}

    def reject(msg):
        msgs.append(msg)
        return Verdict(False, msgs, margins)

    if cert.version != VERIFIER_VERSION:
        return reject(f"unknown verifier version {cert.version!r}")
    try:
        cat = category_from_dict(cert.category)
    except Exception as exc:  # malformed embedded category
        return reject(f"category data invalid: {exc}")
    if category_hash(cat) != cert.category_hash:
        return reject("category hash mismatch")
    if not cat.F.exact:
        return reject("certificate category is not in an exact field")
    if algebra is None or algebra.F.name != cat.F.name or not algebra.exact or algebra.data.names != cat.data.names:
        algebra = TubeAlgebra(cat.F)
    data, dom = algebra.data, algebra.domain
    try:
        X = [data.index(s) for s in cert.X]
        W = [data.index(s) for s in cert.W]
        support = ConeSupport(algebra, X, W)
        spec = LaplacianSpec.create(data, cert.S, algebra.dims, {data.index(k): v for k, v in cert.nu.items()})
        delta = build_laplacian(spec, data)
        gram = GramDecomposition.from_json(support, cert.gram)
        eta_gram = GramDecomposition.from_json(support, cert.eta_gram)
        residual = FusionAlgebraElement({data.index(k): scalar_from_json(v, cat.F.field)
                                         for k, v in cert.residual.items()})
    except Exception as exc:
        return reject(f"certificate data invalid: {exc}")
    for nm, G in (("gram", gram), ("eta_gram", eta_gram)):
        for x, B in G.blocks.items():
            if B.shape != (len(support.basis.get(x, [])),) * 2:
                return reject(f"{nm} block {data.names[x]} has wrong shape {B.shape}")
            res = ldl_psd(B)
            if not res.psd:
                return reject(f"{nm}[{data.names[x]}]: {res.failure}")
            margins[f"{nm}[{data.names[x]}] min pivot"] = float(min(res.pivots, default=0))
    msgs.append("Gram matrices are PSD (exact LDL*)")
    if cert.eps0 < 0 or cert.eta < 0 or cert.k < 0 or cert.eps <= 0:
        return reject("k, eps0 and eta must be non-negative and eps positive")
    L = SOSMap(support)
    lam = L.apply(gram)
    target0 = laplacian_target(algebra, delta, cert.k, cert.eps0)
    if not (lam + residual - target0).is_zero():
        return reject("identity Lambda(gram) + residual = Delta^2 - k Delta + eps0 1 fails")
    msgs.append("Lambda(gram) + residual = Delta^2 - k Delta + eps0 1 holds exactly")
    lam_eta = L.apply(eta_gram)
    eta_unit = FusionAlgebraElement({data.unit: dom.scalar(cert.eta)})
    if not (lam_eta - eta_unit - residual).is_zero():
        return reject("absorption identity Lambda(eta_gram) = eta 1 + residual fails")
    msgs.append("Lambda(eta_gram) = eta 1 + residual holds exactly")
    proved = cert.eps0 + cert.eta
    margins["eps_proved"] = proved
    margins["eps_slack"] = cert.eps - proved
    if proved > cert.eps:
        return reject(f"proved eps {format_rational(proved)} exceeds claimed eps {format_rational(cert.eps)}")
    msgs.append(f"Delta^2 - ({format_rational(cert.k)}) Delta + ({format_rational(cert.eps)}) 1 lies in the tube cone")
    return Verdict(True, msgs, margins)
