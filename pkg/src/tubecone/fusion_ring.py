"""Fusion rules, Frobenius-Perron dimensions, the fusion algebra and its Laplacian."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "SimpleLabel",
    "FusionData",
    "ValidationReport",
    "FusionAlgebraElement",
    "LaplacianSpec",
    "validate_fusion_data",
    "fp_dimensions",
    "fa_multiply",
    "fa_star",
    "build_laplacian",
    "is_generating",
    "FusionDataError",
]


class FusionDataError(ValueError):
    pass


@dataclass(frozen=True)
class SimpleLabel:
    id: int
    name: str

    def __str__(self):
        return self.name


class FusionData:
    """Simples 0..n-1, a unit, a duality involution and fusion multiplicities N[a, b, c]."""

    def __init__(self, names: Sequence[str], unit: int | str, dual: Mapping | Sequence,
                 fusion: Mapping[tuple, int] | Iterable[tuple]):
        self.names = tuple(str(s) for s in names)
        if len(set(self.names)) != len(self.names):
            raise FusionDataError("duplicate simple names")
        n = len(self.names)
        self._index = {s: i for i, s in enumerate(self.names)}
        self.unit = self._id(unit)
        if isinstance(dual, Mapping):
            d = [None] * n
            for k, v in dual.items():
                d[self._id(k)] = self._id(v)
            if any(x is None for x in d):
                raise FusionDataError("dual map must cover every simple")
            self.dual = tuple(d)
        else:
            self.dual = tuple(self._id(v) for v in dual)
        N = np.zeros((n, n, n), dtype=np.int64)
        items = fusion.items() if isinstance(fusion, Mapping) else ((t[:3], t[3]) for t in fusion)
        for (a, b, c), m in items:
            m = int(m)
            if m < 0:
                raise FusionDataError(f"negative fusion coefficient at {(a, b, c)}")
            N[self._id(a), self._id(b), self._id(c)] = m
        N.setflags(write=False)
        self.N = N

    def _id(self, x) -> int:
        if isinstance(x, SimpleLabel):
            return x.id
        if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
            if not 0 <= int(x) < len(self.names):
                raise FusionDataError(f"label id {x} out of range")
            return int(x)
        try:
            return self._index[str(x)]
        except KeyError:
            raise FusionDataError(f"unknown simple {x!r}") from None

    def index(self, x) -> int:
        return self._id(x)

    def label(self, i) -> SimpleLabel:
        i = self._id(i)
        return SimpleLabel(i, self.names[i])

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def labels(self) -> list[SimpleLabel]:
        return [SimpleLabel(i, s) for i, s in enumerate(self.names)]

    def channels(self, a: int, b: int) -> list[int]:
        return [int(c) for c in np.nonzero(self.N[a, b])[0]]

    def coefficients(self) -> dict[tuple[int, int, int], int]:
        return {tuple(int(i) for i in idx): int(self.N[idx]) for idx in zip(*np.nonzero(self.N))}

    def fusion_matrix(self, a) -> np.ndarray:
        """Left multiplication by a: (N_a)[b, c] = N[a, b, c]."""
        return np.array(self.N[self._id(a)])

    def __repr__(self):
        return f"FusionData({list(self.names)}, unit={self.names[self.unit]!r})"


@dataclass
class ValidationReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "pass"
        return "fail:\n  " + "\n  ".join(self.violations)


def validate_fusion_data(data: FusionData, max_reported: int = 20) -> ValidationReport:
    """Check unit, duality, associativity and Frobenius reciprocity of the fusion rules."""
    N, n, one, dual = data.N, data.rank, data.unit, data.dual
    bad: list[str] = []
    nm = data.names

    def report(msg):
        if len(bad) < max_reported:
            bad.append(msg)

    for a in range(n):
        if dual[dual[a]] != a:
            report(f"dual is not an involution at {nm[a]}")
    if dual[one] != one:
        report("dual of the unit is not the unit")
    eye = np.eye(n, dtype=np.int64)
    for b in range(n):
        if not np.array_equal(N[one, b], eye[b]):
            report(f"unit law: N[1,{nm[b]},.] != delta")
        if not np.array_equal(N[b, one], eye[b]):
            report(f"unit law: N[{nm[b]},1,.] != delta")
    for a in range(n):
        for b in range(n):
            want = int(b == dual[a])
            if N[a, b, one] != want:
                report(f"duality violation: N[{nm[a]},{nm[b]},1] = {N[a, b, one]}, expected {want}")
    lhs = np.einsum("abe,ecd->abcd", N, N)
    rhs = np.einsum("bcf,afd->abcd", N, N)
    for idx in zip(*np.nonzero(lhs != rhs)):
        a, b, c, d = idx
        report(f"associativity violation at (a,b,c,d)=({nm[a]},{nm[b]},{nm[c]},{nm[d]})")
    for a in range(n):
        for b in range(n):
            for c in range(n):
                v = N[a, b, c]
                if v != N[c, dual[b], a] or v != N[dual[a], c, b]:
                    report(f"Frobenius reciprocity violation at ({nm[a]},{nm[b]},{nm[c]})")
    return ValidationReport(not bad, bad)


def fp_dimensions(data: FusionData, tol: float = 1e-14, max_iter: int = 100_000) -> np.ndarray:
    """Frobenius-Perron dimensions by power iteration on I + sum_a N_a, normalised d(1) = 1."""
    N = data.N.astype(float)
    n = data.rank
    # (sum_a N_a) d = (sum_a d(a)) d; the identity shift removes periodicity
    T = N.sum(axis=0) + np.eye(n)
    v = np.ones(n) / np.sqrt(n)
    for it in range(max_iter):
        w = T @ v
        w /= np.linalg.norm(w)
        if np.max(np.abs(w - v)) < tol:
            v = w
            break
        v = w
    else:
        raise FusionDataError(f"power iteration did not converge in {max_iter} iterations")
    if v[data.unit] <= 0:
        raise FusionDataError("Perron vector has non-positive unit entry (malformed data)")
    d = v / v[data.unit]
    for _ in range(3):
        lam = float(np.sum(d))
        d = (T @ d - d) / lam
        d /= d[data.unit]
    if np.any(d <= 0):
        raise FusionDataError("non-positive Frobenius-Perron dimension")
    return d


def _conj(x):
    return x.conjugate()


class FusionAlgebraElement:
    """Finitely supported linear combination of simples; zero coefficients are dropped."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, object] | None = None):
        c = {}
        for k, v in (coeffs or {}).items():
            if not _is_zero(v):
                c[int(k)] = v
        self._coeffs = c

    @classmethod
    def basis(cls, label: int, coeff=1) -> "FusionAlgebraElement":
        return cls({label: coeff})

    @property
    def coeffs(self) -> dict[int, object]:
        return dict(self._coeffs)

    def __getitem__(self, label: int):
        return self._coeffs.get(int(label), 0)

    def support(self) -> list[int]:
        return sorted(self._coeffs)

    def items(self):
        return sorted(self._coeffs.items())

    def __add__(self, other: "FusionAlgebraElement"):
        out = dict(self._coeffs)
        for k, v in other._coeffs.items():
            out[k] = out[k] + v if k in out else v
        return FusionAlgebraElement(out)

    def __neg__(self):
        return FusionAlgebraElement({k: -v for k, v in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "FusionAlgebraElement":
        return FusionAlgebraElement({k: s * v for k, v in self._coeffs.items()})

    def __rmul__(self, s):
        return self.scale(s)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __eq__(self, other):
        if not isinstance(other, FusionAlgebraElement):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(self.items()))

    def map(self, fn) -> "FusionAlgebraElement":
        return FusionAlgebraElement({k: fn(v) for k, v in self._coeffs.items()})

    def to_vector(self, n: int) -> np.ndarray:
        v = np.zeros(n, dtype=complex)
        for k, c in self._coeffs.items():
            v[k] = complex(c)
        return v

    def max_abs_diff(self, other: "FusionAlgebraElement") -> float:
        diff = self - other
        return max((abs(complex(v)) for v in diff._coeffs.values()), default=0.0)

    def format(self, names: Sequence[str] | None = None) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for k, v in self.items():
            lab = names[k] if names else str(k)
            parts.append(f"({v})*{lab}" if not isinstance(v, (int, Fraction)) else f"{v}*{lab}")
        return " + ".join(parts)

    def __repr__(self):
        return f"FusionAlgebraElement({self.format()})"


def _is_zero(v) -> bool:
    if hasattr(v, "is_zero") and not isinstance(v, (complex, float, int)):
        return v.is_zero()
    return v == 0


def fa_multiply(x: FusionAlgebraElement, y: FusionAlgebraElement, data: FusionData) -> FusionAlgebraElement:
    out: dict[int, object] = {}
    for a, ca in x.items():
        for b, cb in y.items():
            prod = ca * cb
            for c in data.channels(a, b):
                term = prod * int(data.N[a, b, c])
                out[c] = out[c] + term if c in out else term
    return FusionAlgebraElement(out)


def fa_star(x: FusionAlgebraElement, data: FusionData) -> FusionAlgebraElement:
    return FusionAlgebraElement({data.dual[a]: _conj(c) for a, c in x.items()})


def is_generating(data: FusionData, S: Iterable[int]) -> bool:
    """Breadth-first search on the fusion graph from the unit (depth capped at 4 * rank)."""
    S = [data.index(s) for s in S]
    seen = {data.unit}
    frontier = deque([(data.unit, 0)])
    cap = 4 * data.rank
    while frontier:
        a, depth = frontier.popleft()
        if depth >= cap:
            continue
        for s in S:
            for c in data.channels(a, s):
                if c not in seen:
                    seen.add(c)
                    frontier.append((c, depth + 1))
    return len(seen) == data.rank


@dataclass(frozen=True)
class LaplacianSpec:
    """Generating set S, symmetric weights nu on S and kappa = sum nu(a) d(a)."""

    S: tuple[int, ...]
    nu: Mapping[int, object]
    kappa: object

    @classmethod
    def create(cls, data: FusionData, S: Iterable, dims, nu: Mapping | None = None) -> "LaplacianSpec":
        S = tuple(sorted({data.index(s) for s in S}))
        if nu is None:
            nu = {s: 1 for s in S}
        else:
            nu = {data.index(k): v for k, v in nu.items()}
        kappa = 0
        for s in S:
            kappa = kappa + nu[s] * dims[s]
        spec = cls(S, nu, kappa)
        spec.check(data)
        return spec

    def check(self, data: FusionData) -> None:
        Sset = set(self.S)
        if not Sset:
            raise FusionDataError("generating set S is empty")
        for s in self.S:
            if data.dual[s] not in Sset:
                raise FusionDataError(f"S is not symmetric: {data.names[s]} in S but its dual is not")
            if s not in self.nu:
                raise FusionDataError(f"missing weight for {data.names[s]}")
            if not self.nu[s] > 0:
                raise FusionDataError(f"weight of {data.names[s]} must be positive")
            if self.nu[s] != self.nu[data.dual[s]]:
                raise FusionDataError(f"nu is not symmetric at {data.names[s]}")
        if not is_generating(data, self.S):
            raise FusionDataError("S does not generate the fusion ring")


def build_laplacian(spec: LaplacianSpec, data: FusionData) -> FusionAlgebraElement:
    """Delta = 1 - (1/kappa) sum_{a in S} nu(a) a."""
    spec.check(data)
    coeffs: dict[int, object] = {data.unit: 1}
    kappa = Fraction(spec.kappa) if isinstance(spec.kappa, int) else spec.kappa
    inv = 1 / kappa
    for s in spec.S:
        term = -(spec.nu[s] * inv)
        coeffs[s] = coeffs[s] + term if s in coeffs else term
    return FusionAlgebraElement(coeffs)
