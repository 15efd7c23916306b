"""Numerical search for tube-cone certificates and refutations.

Every problem here has the shape

    maximize u  subject to  Lambda(Q) + u g = h,  Q >= 0 (blockwise),

with one equality per simple label.  Three instances are used:

* k-search:       g = Delta,      h = Delta^2 + eps 1        (u is the best k)
* margin at k:    g = Lambda(I),  h = Delta^2 - k Delta + eps 1  (u is the smallest Gram eigenvalue)
* refutation:     g = 1,          h = Delta^2 - k Delta       (u < 0 refutes k)

The Lagrange dual is: minimize phi(h) over functionals phi with phi(g) = 1 and
phi(b_p b_q*) positive semidefinite, which for the refutation problem is
exactly a weight-1 annular state on the truncated cone.

The solver is a primal-dual interior-point method with Nesterov-Todd scaling and
Mehrotra's predictor-corrector on real symmetric blocks.  Complex Hermitian
blocks are handled by the real doubling [[Re, -Im], [Im, Re]].
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .cone import (Certificate, ConeSupport, CertificateError, GramDecomposition, SOSMap, l1_absorption,
                   laplacian_target, verify_certificate)
from .fusion_ring import FusionAlgebraElement, LaplacianSpec, fa_multiply
from .scalars import format_rational, scalar_to_json

__all__ = [
    "SDPProblem",
    "SDPSolution",
    "SolverOptions",
    "SDPError",
    "SupportTooSmall",
    "AnnularStateWitness",
    "build_problem",
    "build_margin_problem",
    "build_refutation_problem",
    "solve",
    "round_to_exact",
    "extract_refutation",
    "certify",
    "CertifyResult",
    "simplest_rational_between",
]


ACCEPTED_STATUS = ("optimal", "inaccurate", "stalled-fallback")


class SDPError(RuntimeError):
    pass


class SupportTooSmall(SDPError):
    pass


@dataclass
class SolverOptions:
    tol: float = 1e-9
    max_iter: int = 100
    seed: int = 0
    max_dim: int = 2000
    fallback: bool = True
    denominator: int = 1 << 48
    bisect: bool = False     # k-search by bisection on the margin problem (debugging aid)


# ---------------------------------------------------------------------------------------------
@dataclass
class SDPProblem:
    """maximize u s.t. sum_b <A[b][c], X_b> + u g[c] = h[c] for every row c, X_b >= 0."""

    kind: str
    rows: list              # row labels: simple index, or ("re"|"im", index) when doubled
    blocks: list            # source labels x, one per block
    sizes: list             # real block dimension (doubled when complex)
    A: list                 # per block: array (m, n_b, n_b), symmetric slices
    g: np.ndarray
    h: np.ndarray
    complex_blocks: bool
    support: ConeSupport
    sosmap: SOSMap
    meta: dict = field(default_factory=dict)

    @property
    def m(self) -> int:
        return len(self.rows)

    def row_names(self) -> list[str]:
        nm = self.support.algebra.data.names
        return [nm[r] if isinstance(r, int) else f"{r[0]}({nm[r[1]]})" for r in self.rows]

    def constraint_residual(self, blocks: list, u: float) -> np.ndarray:
        val = sum(np.einsum("cij,ij->c", A, X) for A, X in zip(self.A, blocks)) + u * self.g
        return val - self.h

    def dump_text(self) -> str:
        """SDPA sparse format: maximize u is written as minimize -u with u split into two
        diagonal entries of an extra 2x2 block would obscure things, so u is kept explicit
        in a header comment and the blocks follow the usual SDPA layout."""
        lines = [f'"tubecone {self.kind} problem: max u s.t. sum <A_c,X> + u g_c = h_c"',
                 f'"rows {" ".join(self.row_names())}"',
                 f'"g {" ".join(repr(float(v)) for v in self.g)}"',
                 str(self.m), str(len(self.blocks)), " ".join(str(s) for s in self.sizes),
                 " ".join(repr(float(v)) for v in self.h)]
        for c in range(self.m):
            for b, A in enumerate(self.A):
                n = A.shape[1]
                for i in range(n):
                    for j in range(i, n):
                        if A[c, i, j] != 0:
                            lines.append(f"{c + 1} {b + 1} {i + 1} {j + 1} {float(A[c, i, j])!r}")
        return "\n".join(lines) + "\n"


def _label_vector(elem: FusionAlgebraElement, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    for w, c in elem.items():
        v[w] = complex(c)
    return v


def _make_problem(kind: str, sosmap: SOSMap, g: np.ndarray, h: np.ndarray, meta: dict,
                  options: SolverOptions | None = None) -> SDPProblem:
    support = sosmap.support
    names = support.algebra.data.names
    n_labels = len(sosmap.labels)
    cplx = (not support.algebra.is_real) or np.any(np.abs(g.imag) > 0) or np.any(np.abs(h.imag) > 0)
    blocks, sizes, A_list = [], [], []
    for x, T in sosmap.float_tensors.items():
        n = T.shape[1]
        if cplx:
            Tr, Ti = T.real, T.imag
            Ar = np.zeros((2 * n_labels, 2 * n, 2 * n))
            # Q = Qr + i Qi;  Y = [[Qr, -Qi], [Qi, Qr]];  <T, Q> = sum T_pq Q_pq
            for w in range(n_labels):
                re_r = np.block([[Tr[w] / 2, Ti[w] / 2], [-Ti[w] / 2, Tr[w] / 2]])
                im_r = np.block([[Ti[w] / 2, -Tr[w] / 2], [Tr[w] / 2, Ti[w] / 2]])
                Ar[2 * w] = (re_r + re_r.T) / 2
                Ar[2 * w + 1] = (im_r + im_r.T) / 2
            A_list.append(Ar)
            sizes.append(2 * n)
        else:
            Ar = np.array([(T[w].real + T[w].real.T) / 2 for w in range(n_labels)])
            A_list.append(Ar)
            sizes.append(n)
        blocks.append(x)
    if cplx:
        rows = [(part, w) for w in range(n_labels) for part in ("re", "im")]
        gg = np.array([[v.real, v.imag] for v in g]).reshape(-1)
        hh = np.array([[v.real, v.imag] for v in h]).reshape(-1)
    else:
        rows = list(range(n_labels))
        gg, hh = g.real.copy(), h.real.copy()
    keep = []
    for c in range(len(rows)):
        a_zero = all(np.all(A[c] == 0) for A in A_list)
        if a_zero and abs(hh[c]) > 1e-14:
            lab = rows[c] if isinstance(rows[c], int) else rows[c][1]
            raise SupportTooSmall(f"support too small: label {names[lab]} appears in the target "
                                  "but not in any cone product at this support")
        if a_zero and gg[c] == 0:
            continue
        keep.append(c)
    prob = SDPProblem(kind, [rows[c] for c in keep], blocks, sizes, [A[keep] for A in A_list],
                      gg[keep], hh[keep], bool(cplx), support, sosmap, meta)
    if sum(prob.sizes) > (options or SolverOptions()).max_dim:
        raise SDPError(f"total Gram dimension {sum(prob.sizes)} exceeds the configured limit")
    return prob


def build_problem(sosmap: SOSMap, delta: FusionAlgebraElement, eps, options: SolverOptions | None = None) -> SDPProblem:
    """maximize k subject to Lambda(Q) + k Delta = Delta^2 + eps 1."""
    data = sosmap.algebra.data
    n = data.rank
    df = delta.map(complex)
    h = _label_vector(fa_multiply(df, df, data), n)
    h[data.unit] += float(eps)
    return _make_problem("k-search", sosmap, _label_vector(df, n), h, {"eps": eps}, options)


def build_margin_problem(sosmap: SOSMap, delta: FusionAlgebraElement, k, eps,
                         options: SolverOptions | None = None) -> SDPProblem:
    """maximize t subject to Lambda(Q) + t Lambda(I) = Delta^2 - k Delta + eps 1."""
    data = sosmap.algebra.data
    n = data.rank
    df = delta.map(complex)
    h = _label_vector(fa_multiply(df, df, data) - df.scale(float(k)), n)
    h[data.unit] += float(eps)
    g = sosmap.apply_float({x: np.eye(T.shape[1]) for x, T in sosmap.float_tensors.items()})
    return _make_problem("margin", sosmap, g, h, {"k": k, "eps": eps}, options)


def build_refutation_problem(sosmap: SOSMap, delta: FusionAlgebraElement, k,
                             options: SolverOptions | None = None) -> SDPProblem:
    """maximize u subject to Lambda(Q) + u 1 = Delta^2 - k Delta."""
    data = sosmap.algebra.data
    n = data.rank
    df = delta.map(complex)
    h = _label_vector(fa_multiply(df, df, data) - df.scale(float(k)), n)
    g = np.zeros(n, dtype=complex)
    g[data.unit] = 1
    return _make_problem("refutation", sosmap, g, h, {"k": k}, options)


# ---------------------------------------------------------------------------------------------
@dataclass
class SDPSolution:
    status: str
    u: float
    blocks: list            # real symmetric solver blocks X_b
    gram: dict              # x -> Hermitian Gram matrix (complex when doubled)
    dual: np.ndarray        # phi over problem rows
    primal_residual: float
    dual_residual: float    # max(0, -min eig of sum phi_c A_c)
    gap: float
    min_eigenvalues: dict
    iterations: int
    trace: list = field(default_factory=list)

    @property
    def k(self) -> float:
        return self.u


def _sym(M):
    return (M + M.T) / 2


class _Ops:
    """Block operators for the standard-form problem min <C,X> s.t. <A_i,X> = b_i."""

    def __init__(self, C: list, A: list, b: np.ndarray):
        self.C, self.A, self.b = C, A, b
        self.m = len(b)

    def apply(self, X):
        out = np.zeros(self.m)
        for A, Xb in zip(self.A, X):
            out += np.einsum("cij,ij->c", A, Xb)
        return out

    def adjoint(self, y):
        return [np.einsum("c,cij->ij", y, A) for A in self.A]


def _inner(X, Y):
    return float(sum(np.sum(a * b) for a, b in zip(X, Y)))


def _reduce_rows(prob: SDPProblem, tol: float = 1e-10):
    """Pick the pivot row for u and a maximal independent set of the remaining rows."""
    g = prob.g
    r = int(np.argmax(np.abs(g)))
    if abs(g[r]) < 1e-14:
        raise SDPError("objective row g vanishes")
    vecs = np.concatenate([A.reshape(prob.m, -1) for A in prob.A], axis=1)
    full = np.concatenate([vecs, g[:, None]], axis=1)
    order = [r] + [c for c in range(prob.m) if c != r]
    kept, basis = [], []
    for c in order:
        v = full[c]
        if basis:
            Bm = np.array(basis)
            coef, *_ = np.linalg.lstsq(Bm.T, v, rcond=None)
            resid = v - Bm.T @ coef
        else:
            resid = v
        if np.linalg.norm(resid) > tol * (1 + np.linalg.norm(v)):
            kept.append(c)
            basis.append(v)
        else:
            hb = prob.h[kept]
            if abs(prob.h[c] - coef @ hb) > 1e-9 * (1 + abs(prob.h[c])):
                raise SDPError("equality constraints are inconsistent at this support")
    return r, kept


def _standard_form(prob: SDPProblem):
    r, kept = _reduce_rows(prob)
    others = [c for c in kept if c != r]
    gr = prob.g[r]
    C = [A[r] / gr for A in prob.A]
    Ap = [np.array([A[c] - (prob.g[c] / gr) * A[r] for c in others]).reshape(len(others), *A.shape[1:])
          for A in prob.A]
    b = np.array([prob.h[c] - (prob.g[c] / gr) * prob.h[r] for c in others])
    return r, others, _Ops(C, Ap, b)


def _ipm(ops: _Ops, sizes: list, options: SolverOptions):
    rng = np.random.default_rng(options.seed)
    m = ops.m
    scale = 1.0 + max(float(np.max(np.abs(ops.b), initial=0.0)),
                      max(float(np.max(np.abs(C), initial=0.0)) for C in ops.C))
    X, S = [], []
    for n in sizes:
        P = rng.standard_normal((n, n)) * 0.01
        X.append(scale * (np.eye(n) + _sym(P)))
        S.append(scale * np.eye(n))
    y = np.zeros(m)
    ntot = sum(sizes)
    trace = []
    status = "stalled"
    normb = 1 + np.linalg.norm(ops.b)
    normC = 1 + math.sqrt(_inner(ops.C, ops.C))
    it = 0
    for it in range(1, options.max_iter + 1):
        rp = ops.b - ops.apply(X)
        Rd = [C - Sb - Ay for C, Sb, Ay in zip(ops.C, S, ops.adjoint(y))]
        mu = _inner(X, S) / ntot
        pobj, dobj = _inner(ops.C, X), float(ops.b @ y)
        pinf = np.linalg.norm(rp) / normb
        dinf = math.sqrt(_inner(Rd, Rd)) / normC
        relgap = abs(pobj - dobj) / (1 + abs(pobj) + abs(dobj))
        trace.append((it, pobj, dobj, pinf, dinf, relgap))
        if pinf < options.tol and dinf < options.tol and relgap < options.tol:
            status = "optimal"
            break
        # NT scaling per block
        Gs, Ginv, D = [], [], []
        try:
            for Xb, Sb in zip(X, S):
                LX = np.linalg.cholesky(_sym(Xb))
                LS = np.linalg.cholesky(_sym(Sb))
                U, d, Vt = np.linalg.svd(LS.T @ LX)
                G = LX @ Vt.T @ np.diag(d ** -0.5)
                Gs.append(G)
                Ginv.append(np.diag(d ** 0.5) @ Vt @ np.linalg.inv(LX))
                D.append(d)
        except np.linalg.LinAlgError:
            status = "breakdown"
            break
        At = [np.einsum("ji,cjk,kl->cil", G, A, G) for G, A in zip(Gs, ops.A)]
        Rdt = [G.T @ R @ G for G, R in zip(Gs, Rd)]
        M = sum(np.einsum("cij,dij->cd", a, a) for a in At) if m else np.zeros((0, 0))
        try:
            cho = np.linalg.cholesky(M + 1e-14 * np.eye(m) * (1 + np.trace(M) / max(m, 1))) if m else None
        except np.linalg.LinAlgError:
            status = "breakdown"
            break

        def solve_dir(Rc):
            H = [2 * R / (d[:, None] + d[None, :]) for R, d in zip(Rc, D)]
            rhs = rp - np.array([sum(np.sum(a[c] * (Hb - Rb)) for a, Hb, Rb in zip(At, H, Rdt)) for c in range(m)])
            dy = np.linalg.solve(cho.T, np.linalg.solve(cho, rhs)) if m else np.zeros(0)
            dSt = [Rb - np.einsum("c,cij->ij", dy, a) for Rb, a in zip(Rdt, At)]
            dXt = [Hb - s for Hb, s in zip(H, dSt)]
            return dXt, dy, dSt

        def step_len(d, dt):
            a = 1.0
            for db, Zb in zip(d, dt):
                s = 1 / np.sqrt(db)
                ev = np.linalg.eigvalsh(_sym(s[:, None] * Zb * s[None, :]))
                if ev.min() < 0:
                    a = min(a, -1 / ev.min())
            return a

        Rc_aff = [-np.diag(d ** 2) for d in D]
        dXa, dya, dSa = solve_dir(Rc_aff)
        ap = step_len(D, dXa)
        ad = step_len(D, dSa)
        mu_aff = sum(np.sum((np.diag(d) + ap * a) * (np.diag(d) + ad * s)) for d, a, s in zip(D, dXa, dSa)) / ntot
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0
        Rc = []
        for d, a, s in zip(D, dXa, dSa):
            prod = (a @ s + s @ a) / 2
            Rc.append(sigma * mu * np.eye(len(d)) - np.diag(d ** 2) - prod)
        dXt, dy, dSt = solve_dir(Rc)
        ap = min(1.0, 0.98 * step_len(D, dXt))
        ad = min(1.0, 0.98 * step_len(D, dSt))
        X = [Xb + ap * G @ dx @ G.T for Xb, G, dx in zip(X, Gs, dXt)]
        S = [Sb + ad * Gi.T @ ds @ Gi for Sb, Gi, ds in zip(S, Ginv, dSt)]
        y = y + ad * dy
        X = [_sym(a) for a in X]
        S = [_sym(a) for a in S]
    return X, y, S, status, it, trace


def _altproj(ops: _Ops, sizes: list, X0: list, iters: int = 5000, tol: float = 1e-10):
    """Alternating projections between the PSD cone and the affine set <A_i, X> = b_i."""
    vecs = np.concatenate([A.reshape(ops.m, -1) for A in ops.A], axis=1) if ops.m else np.zeros((0, sum(n * n for n in sizes)))
    pinv = np.linalg.pinv(vecs) if ops.m else None
    X = [x.copy() for x in X0]
    for _ in range(iters):
        flat = np.concatenate([x.reshape(-1) for x in X])
        if ops.m:
            flat = flat + pinv @ (ops.b - vecs @ flat)
        out, pos = [], 0
        for n in sizes:
            out.append(_sym(flat[pos:pos + n * n].reshape(n, n)))
            pos += n * n
        X = []
        worst = 0.0
        for Y in out:
            w, V = np.linalg.eigh(Y)
            worst = max(worst, -float(w.min()))
            X.append((V * np.maximum(w, 0)) @ V.T)
        if worst < tol:
            return X, True
    return X, False


def _polish(ops: _Ops, sizes: list, X: list) -> list:
    """Least-squares step back onto the affine constraints.

    Kept unless it costs more in PSD violation than it gains in affine residual.
    """
    if not ops.m:
        return X
    vecs = np.concatenate([A.reshape(ops.m, -1) for A in ops.A], axis=1)
    flat = np.concatenate([x.reshape(-1) for x in X])
    before = np.linalg.norm(ops.b - vecs @ flat)
    new = flat + np.linalg.lstsq(vecs, ops.b - vecs @ flat, rcond=None)[0]
    if np.linalg.norm(ops.b - vecs @ new) >= before:
        return X
    out, pos = [], 0
    for n in sizes:
        out.append(_sym(new[pos:pos + n * n].reshape(n, n)))
        pos += n * n
    old_min = min((np.linalg.eigvalsh(x).min() for x in X if x.size), default=0.0)
    new_min = min((np.linalg.eigvalsh(x).min() for x in out if x.size), default=0.0)
    return out if new_min >= min(0.0, old_min) - before else X


def solve(prob: SDPProblem, options: SolverOptions | None = None) -> SDPSolution:
    options = options or SolverOptions()
    r, others, ops = _standard_form(prob)
    X, yp, S, status, iters, trace = _ipm(ops, prob.sizes, options)
    X = _polish(ops, prob.sizes, X)
    if status != "optimal" and trace and max(trace[-1][3:]) < 1e-7:
        status = "inaccurate"
    elif status != "optimal" and options.fallback:
        Xf, ok = _altproj(ops, prob.sizes, X)
        if ok:
            X = _polish(ops, prob.sizes, Xf)
            status = "stalled-fallback"
    gr = prob.g[r]
    phi = np.zeros(prob.m)
    for c, yc in zip(others, yp):
        phi[c] = -yc
    phi[r] = (1 + sum(yc * prob.g[c] for c, yc in zip(others, yp))) / gr
    u = float((prob.h[r] - sum(np.sum(A[r] * Xb) for A, Xb in zip(prob.A, X))) / gr)
    res = prob.constraint_residual(X, u)
    moment = [np.einsum("c,cij->ij", phi, A) for A in prob.A]
    dual_res = max([0.0] + [-float(np.linalg.eigvalsh(_sym(Mb)).min()) for Mb in moment if Mb.size])
    gap = float(phi @ prob.h) - u
    gram, mins = {}, {}
    for x, Xb, n in zip(prob.blocks, X, prob.sizes):
        if prob.complex_blocks:
            k = n // 2
            Qr = (Xb[:k, :k] + Xb[k:, k:]) / 2
            Qi = (Xb[k:, :k] - Xb[:k, k:]) / 2
            Q = Qr + 1j * Qi
        else:
            Q = Xb
        gram[x] = Q
        mins[x] = float(np.linalg.eigvalsh(Q).min()) if Q.size else 0.0
    return SDPSolution(status, u, X, gram, phi, float(np.max(np.abs(res), initial=0.0)), dual_res, gap, mins,
                       iters, trace)


# ---------------------------------------------------------------------------------------------
def simplest_rational_between(lo, hi) -> Fraction:
    """Rational with the smallest denominator in [lo, hi] (continued-fraction descent)."""
    lo_q, hi_q = Fraction(lo), Fraction(hi)
    if lo_q > hi_q:
        raise ValueError("empty interval")
    return _simplest(lo_q, hi_q)


def _simplest(lo: Fraction, hi: Fraction) -> Fraction:
    if lo <= 0 <= hi:
        return Fraction(0)
    if hi < 0:
        return -_simplest(-hi, -lo)
    fl = math.floor(lo)
    if fl == lo or fl + 1 <= hi:
        return Fraction(fl if fl == lo else fl + 1)
    return fl + 1 / _simplest(1 / (hi - fl), 1 / (lo - fl))


def _rationalize(M: np.ndarray, den: int, field_) -> np.ndarray:
    n = M.shape[0]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(i, n):
            v = complex(M[i, j] + np.conj(M[j, i])) / 2
            re = Fraction(round(v.real * den), den)
            im = Fraction(round(v.imag * den), den) if i != j else Fraction(0)
            out[i, j] = field_.from_rational(re) + field_.from_rational(im) * field_.i
            out[j, i] = out[i, j].conjugate()
    return out


def round_to_exact(solution: SDPSolution, sosmap: SOSMap, delta: FusionAlgebraElement, spec: LaplacianSpec,
                   k: Fraction, eps: Fraction, eps0: Fraction, category, options: SolverOptions | None = None
                   ) -> tuple[Certificate, object]:
    """Rationalize the Gram matrices, shift to PSD, absorb the exact residual and verify."""
    from .categories import category_hash

    options = options or SolverOptions()
    support = sosmap.support
    alg = support.algebra
    if not alg.exact:
        raise CertificateError("rounding needs an exact tube algebra")
    field_ = alg.F.field
    data = alg.data
    blocks = {}
    shifts = {}
    for x, Q in solution.gram.items():
        Qe = _rationalize(np.asarray(Q), options.denominator, field_)
        n = Q.shape[0]
        Qf = np.array([[complex(v) for v in row] for row in Qe])
        lam = float(np.linalg.eigvalsh((Qf + Qf.conj().T) / 2).min()) if n else 0.0
        # float eigenvalue error: backward error of eigvalsh plus a Gershgorin-style bound
        err = n * np.finfo(float).eps * (1 + float(np.max(np.sum(np.abs(Qf), axis=1), initial=0.0)))
        shift = max(0.0, -lam + 2 * err)
        if shift > 0:
            s = Fraction(math.ceil(shift * options.denominator), options.denominator)
            for i in range(n):
                Qe[i, i] = Qe[i, i] + field_.from_rational(s)
            shifts[data.names[x]] = format_rational(s)
        blocks[x] = Qe
    gram = GramDecomposition(support, blocks)
    target0 = laplacian_target(alg, delta, k, eps0)
    residual = target0 - sosmap.apply(gram)
    absorbed = l1_absorption(support, residual)
    eta = absorbed.eta.to_fraction()
    if eps0 + eta > eps:
        raise CertificateError(f"rounding residual too large: eta = {float(eta):.3e} pushes eps past "
                               f"{format_rational(eps)}; try a smaller k or a larger eps")
    nm = data.names
    cert = Certificate(
        category=category.to_dict(),
        category_hash=category_hash(category),
        S=[nm[s] for s in spec.S],
        nu={nm[s]: Fraction(spec.nu[s]) for s in spec.S},
        k=Fraction(k), eps=Fraction(eps), eps0=Fraction(eps0), eta=eta,
        X=[nm[x] for x in support.X_requested], W=[nm[w] for w in support.W],
        gram=gram.to_json(),
        residual={nm[w]: scalar_to_json(v) for w, v in sorted(residual.items())},
        eta_gram=absorbed.gram.to_json(),
        notes={"psd_shifts": shifts, "solver_status": solution.status,
               "truncated": support.X_requested != tuple(range(data.rank)) or support.W != tuple(range(data.rank))},
    )
    verdict = verify_certificate(cert, alg)
    if not verdict.accepted:
        raise CertificateError("rounded certificate failed exact verification: " + "; ".join(verdict.messages))
    return cert, verdict


# ---------------------------------------------------------------------------------------------
@dataclass
class AnnularStateWitness:
    """Functional phi on the simples with phi(1) = 1, non-negative on the truncated cone
    up to ``margin``, and phi(Delta^2 - k Delta) = ``value``."""

    k: float
    values: dict            # simple name -> complex
    margin: float
    value: float
    support: dict
    truncated: bool
    moment_min_eigs: dict

    def to_json(self) -> dict:
        return {
            "kind": "annular state witness",
            "k": self.k,
            "phi": {k: [v.real, v.imag] if v.imag else v.real for k, v in self.values.items()},
            "phi_of_target": self.value,
            "cone_margin": self.margin,
            "moment_min_eigenvalues": self.moment_min_eigs,
            "support": self.support,
            "relative_to_truncation": self.truncated,
        }

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n", encoding="utf-8")


def extract_refutation(prob: SDPProblem, solution: SDPSolution, delta: FusionAlgebraElement, k) -> AnnularStateWitness:
    if prob.kind != "refutation":
        raise SDPError("refutation needs the problem built by build_refutation_problem")
    alg = prob.support.algebra
    data = alg.data
    n = data.rank
    phi = np.zeros(n, dtype=complex)
    for c, r in enumerate(prob.rows):
        if isinstance(r, int):
            phi[r] += solution.dual[c]
        else:
            phi[r[1]] += solution.dual[c] * (1 if r[0] == "re" else 1j)
    if not prob.complex_blocks:
        # conjugate labels have identical rows; spread the weight so phi(w) = phi(wbar)
        sym = phi.copy()
        for w in range(n):
            sym[w] = (phi[w] + phi[data.dual[w]]) / 2
        phi = sym
    if abs(phi[data.unit]) <= 1e-12:
        raise SDPError("dual vector cannot be normalized (phi(1) vanishes)")
    phi = phi / phi[data.unit]
    mins = {}
    for x, T in prob.sosmap.float_tensors.items():
        Mx = np.einsum("w,wpq->pq", phi, T)
        mins[data.names[x]] = float(np.linalg.eigvalsh((Mx + Mx.conj().T) / 2).min())
    df = delta.map(complex)
    tgt = fa_multiply(df, df, data) - df.scale(float(k))
    value = complex(sum(phi[w] * c for w, c in tgt.items()))
    sup = prob.support
    return AnnularStateWitness(float(k), {data.names[w]: complex(phi[w]) for w in range(n)},
                               min(mins.values()), value.real, sup.names(),
                               sup.X_requested != tuple(range(n)) or sup.W != tuple(range(n)), mins)


# ---------------------------------------------------------------------------------------------
@dataclass
class CertifyResult:
    ok: bool
    k_float: float | None
    k: Fraction | None
    certificate: Certificate | None
    verdict: object
    margin: float | None
    witness: AnnularStateWitness | None
    messages: list


def _bisect_k(sosmap: SOSMap, delta: FusionAlgebraElement, eps0: Fraction, options: SolverOptions,
              steps: int = 40) -> float:
    """Largest k with a positive margin, found by bisection; spec(Delta) lies in [0, 2]."""
    lo, hi = 0.0, 2.0 + 2.0 * float(eps0) ** 0.5
    for _ in range(steps):
        mid = (lo + hi) / 2
        sol = solve(build_margin_problem(sosmap, delta, Fraction(mid), eps0, options), options)
        if sol.status in ACCEPTED_STATUS and sol.u > 0:
            lo = mid
        else:
            hi = mid
    return lo


def certify(category, spec: LaplacianSpec, delta: FusionAlgebraElement, eps: Fraction,
            k: Fraction | None = None, support: ConeSupport | None = None, sosmap: SOSMap | None = None,
            options: SolverOptions | None = None, backoff: float = 1e-6) -> CertifyResult:
    """Search, round and exactly verify a certificate for Delta^2 - k Delta + eps 1."""
    from .tube import TubeAlgebra

    options = options or SolverOptions(tol=1e-12)
    if sosmap is None:
        if support is None:
            support = ConeSupport(TubeAlgebra(category.F))
        sosmap = SOSMap(support)
    support = sosmap.support
    eps = Fraction(eps)
    eps0 = eps * Fraction(999, 1000)
    msgs = []
    k_float = None
    if k is None:
        if options.bisect:
            k_float = _bisect_k(sosmap, delta, eps0, options)
            msgs.append(f"k-search by bisection: k* = {k_float:.12f}")
        else:
            sol = solve(build_problem(sosmap, delta, eps0, options), options)
            msgs.append(f"k-search: status {sol.status}, k* = {sol.u:.12f}")
            if sol.status not in ACCEPTED_STATUS:
                return CertifyResult(False, sol.u, None, None, None, None, None, msgs + ["SDP stalled during k-search"])
            k_float = sol.u
        hi = k_float - backoff * (1 + abs(k_float))
        lo = hi - backoff * (1 + abs(k_float))
        k = simplest_rational_between(lo, hi)
        if k < 0:
            k = Fraction(0)
    k = Fraction(k)
    mprob = build_margin_problem(sosmap, delta, k, eps0, options)
    msol = solve(mprob, options)
    msgs.append(f"margin at k = {format_rational(k)}: status {msol.status}, t = {msol.u:.3e}")
    if msol.u <= 0:
        rprob = build_refutation_problem(sosmap, delta, k, options)
        rsol = solve(rprob, options)
        witness = None
        if rsol.u < 0:
            witness = extract_refutation(rprob, rsol, delta, k)
            msgs.append(f"refuted at this support: phi(Delta^2 - k Delta) = {witness.value:.6e}")
        return CertifyResult(False, k_float, k, None, None, msol.u, witness, msgs)
    gram = {x: Q + msol.u * np.eye(Q.shape[0]) for x, Q in msol.gram.items()}
    msol.gram = gram
    cert, verdict = round_to_exact(msol, sosmap, delta, spec, k, eps, eps0, category, options)
    msgs.append(f"certificate verified: eta = {float(cert.eta):.3e}, eps proved = {float(cert.eps_proved):.6e}")
    return CertifyResult(True, k_float, k, cert, verdict, msol.u, None, msgs)
