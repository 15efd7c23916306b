"""Brute-force spectral oracle for finite categories.

The tube algebra acts on itself from the right, a . c, and is a Hilbert space
under <a, b> = Omega(b* a).  Weight-1 admissible representations are the
summands of the corner A p_1 = (+)_y A_{1,y}, on which A_{1,1} = C[C] acts by
right multiplication; the spectrum of Delta there is the oracle's answer.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .fusion_ring import FusionAlgebraElement
from .tube import TubeAlgebra, embed_fusion, omega_gram

__all__ = ["GnsModel", "SpectralReport", "AdmissibilityReport", "OracleError",
           "build_gns", "admissible_spectrum", "crosscheck_admissibility"]


class OracleError(RuntimeError):
    pass


@dataclass
class GnsModel:
    algebra: TubeAlgebra           # float copy
    H: np.ndarray                  # <u, v> = v^H H u
    L: np.ndarray                  # H = L L^H
    corner: list                   # basis indices with source 1

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def corner_dim(self) -> int:
        return len(self.corner)

    def right_matrix(self, c) -> np.ndarray:
        """Matrix of a -> a . c in the tube basis (columns are images of basis vectors)."""
        return np.einsum("iqk,q->ki", self.algebra.M, np.asarray(c, complex))

    def orthonormal(self, R: np.ndarray, idx=None) -> np.ndarray:
        """R in an orthonormal basis: L^H R L^{-H}, optionally restricted to the index set."""
        if idx is None:
            L, Rr = self.L, R
        else:
            L = np.linalg.cholesky(self.H[np.ix_(idx, idx)])
            Rr = R[np.ix_(idx, idx)]
        return L.conj().T @ Rr @ np.linalg.inv(L.conj().T)

    def corner_operator(self, c) -> np.ndarray:
        return self.orthonormal(self.right_matrix(c), self.corner)


def build_gns(algebra: TubeAlgebra) -> GnsModel:
    alg = algebra.to_float()
    G = omega_gram(alg)
    H = G.T
    if np.max(np.abs(H - H.conj().T), initial=0.0) > 1e-9 * (1 + np.max(np.abs(H), initial=0.0)):
        raise OracleError("Omega Gram matrix is not Hermitian")
    H = (H + H.conj().T) / 2
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError as exc:
        raise OracleError("Omega Gram matrix is not positive definite") from exc
    one = alg.data.unit
    corner = [k for k, b in enumerate(alg.basis) if b.x == one]
    return GnsModel(alg, H, L, corner)


@dataclass
class SpectralReport:
    eigenvalues: np.ndarray
    gap: float | None
    zero_multiplicity: int
    tolerance: float
    hermitian_defect: float

    def lines(self, digits: int = 12) -> list[str]:
        vals = ", ".join(f"{v:.{digits}f}" if abs(v) >= 0.5 * 10.0**-digits else f"{0.0:.{digits}f}"
                         for v in self.eigenvalues)
        gap = "none" if self.gap is None else f"{self.gap:.{digits}f}"
        return [f"spectrum [{vals}]", f"zero multiplicity {self.zero_multiplicity}", f"gap {gap}"]


def admissible_spectrum(model: GnsModel, delta: FusionAlgebraElement, tol: float = 1e-9) -> SpectralReport:
    alg = model.algebra
    c = embed_fusion(alg, delta.map(complex)).vec
    T = model.corner_operator(c)
    defect = float(np.max(np.abs(T - T.conj().T), initial=0.0))
    if defect > 1e-8 * (1 + np.max(np.abs(T), initial=0.0)):
        raise OracleError(f"action of Delta on the corner is not Hermitian (defect {defect:.2e})")
    ev = np.sort(sla.eigvalsh((T + T.conj().T) / 2))
    thresh = tol * (1 + float(np.max(np.abs(ev), initial=0.0)))
    zero = int(np.sum(np.abs(ev) < thresh))
    nonzero = ev[np.abs(ev) >= thresh]
    gap = float(nonzero.min()) if nonzero.size else None
    return SpectralReport(ev, gap, zero, thresh, defect)


@dataclass
class AdmissibilityReport:
    samples: int
    worst: float
    passed: bool
    values: list = field(default_factory=list)


def crosscheck_admissibility(model: GnsModel, sosmap, samples: int = 100, seed: int = 0,
                             threshold: float = -1e-8) -> AdmissibilityReport:
    """Minimum vector-state value of random cone elements Lambda(Q), Q >= 0 of unit trace.

    ``sosmap`` may come from a different tube algebra over the same basis (for example
    one with a deliberately wrong star), which is how convention errors show up.
    """
    rng = np.random.default_rng(seed)
    alg = model.algebra
    worst = np.inf
    vals = []
    for _ in range(samples):
        blocks = {}
        for x, T in sosmap.float_tensors.items():
            n = T.shape[1]
            Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            if alg.is_real and sosmap.algebra.is_real:
                Z = Z.real
            Q = Z @ Z.conj().T
            blocks[x] = Q / np.trace(Q).real
        coeffs = sosmap.apply_float(blocks)
        elem = FusionAlgebraElement({w: v for w, v in enumerate(coeffs)})
        T = model.corner_operator(embed_fusion(alg, elem).vec)
        m = float(np.linalg.eigvalsh((T + T.conj().T) / 2).min())
        vals.append(m)
        worst = min(worst, m)
    return AdmissibilityReport(samples, float(worst), bool(worst >= threshold), vals)
