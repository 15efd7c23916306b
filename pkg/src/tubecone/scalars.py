"""Exact scalars: elements of K(i) for a real number field K = Q(theta).

Every exact scalar is stored as a pair (re, im) of coefficient tuples in the
power basis 1, theta, ..., theta^(n-1).  ``theta`` is a fixed real root of a
monic irreducible polynomial, pinned down by a rational isolating interval, so
signs of real elements are decided exactly (interval bisection terminates
because a nonzero algebraic number is bounded away from zero).
"""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "NumberField",
    "ExactScalar",
    "get_field",
    "FIELD_TAGS",
    "parse_rational",
    "format_rational",
    "to_complex",
    "is_exact",
    "scalar_to_json",
    "scalar_from_json",
]


def parse_rational(text) -> Fraction:
    """Parse ``"num/den"``, an int, or a decimal string into a Fraction."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are refused where an exact rational is required")
    return Fraction(str(text).strip())


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _interval_mul(a, b):
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return min(ps), max(ps)


class NumberField:
    """Q(theta) with theta a chosen real root of ``minpoly`` (low-to-high coefficients)."""

    def __init__(self, name: str, minpoly: Sequence, root: float):
        coeffs = [Fraction(c) for c in minpoly]
        if coeffs[-1] != 1:
            lead = coeffs[-1]
            coeffs = [c / lead for c in coeffs]
        self.name = name
        self.minpoly = tuple(coeffs)
        self.degree = len(coeffs) - 1
        if self.degree < 1:
            raise ValueError("minimal polynomial must have degree >= 1")
        n = self.degree
        # theta^k for k = n .. 2n-2 expressed in the power basis
        self._reduce = []
        cur = [-c for c in self.minpoly[:-1]]
        for _ in range(n - 1):
            self._reduce.append(tuple(cur))
            top = cur[-1]
            cur = [Fraction(0)] + cur[:-1]
            cur = [cur[i] - top * self.minpoly[i] for i in range(n)]
        self._isolate(root)
        self.theta_float = float(root) if n > 1 else float(-self.minpoly[0])
        if n > 1:
            # polish the float value of theta by a few Newton steps
            t = self.theta_float
            for _ in range(5):
                p = sum(float(c) * t**i for i, c in enumerate(self.minpoly))
                dp = sum(i * float(c) * t ** (i - 1) for i, c in enumerate(self.minpoly) if i)
                if dp == 0:
                    break
                t -= p / dp
            self.theta_float = t
        self._powers = np.array([self.theta_float**i for i in range(n)])
        self.zero = ExactScalar(self, (Fraction(0),) * n, (Fraction(0),) * n)
        self.one = self.from_rational(1)
        self.i = ExactScalar(self, self.zero.re, self.one.re)

    def __repr__(self):
        return f"NumberField({self.name!r}, degree={self.degree})"

    def __reduce__(self):
        return (get_field, (self.name,)) if self.name in _FIELD_SPECS else (
            NumberField, (self.name, self.minpoly, self.theta_float))

    # -- root isolation ---------------------------------------------------------
    def _isolate(self, root: float) -> None:
        if self.degree == 1:
            r = -self.minpoly[0]
            self._lo = self._hi = r
            return
        import sympy

        t = sympy.Symbol("t")
        poly = sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * t**i
                              for i, c in enumerate(self.minpoly)), t)
        if not poly.is_irreducible:
            raise ValueError(f"minimal polynomial of field {self.name!r} is reducible")
        best = None
        for (lo, hi), _mult in poly.intervals():
            lo, hi = Fraction(int(lo.p), int(lo.q)), Fraction(int(hi.p), int(hi.q))
            mid = (lo + hi) / 2
            dist = abs(float(mid) - root)
            if lo <= Fraction(root) <= hi:
                dist = -1.0
            if best is None or dist < best[0]:
                best = (dist, lo, hi)
        if best is None:
            raise ValueError(f"minimal polynomial of field {self.name!r} has no real root")
        self._lo, self._hi = best[1], best[2]
        while self._hi - self._lo > Fraction(1, 10**6):
            self._refine()

    def _peval(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.minpoly):
            acc = acc * x + c
        return acc

    def _refine(self) -> None:
        mid = (self._lo + self._hi) / 2
        plo, pmid = self._peval(self._lo), self._peval(mid)
        if pmid == 0:  # only possible for degree 1
            self._lo = self._hi = mid
        elif (plo < 0) == (pmid < 0):
            self._lo = mid
        else:
            self._hi = mid

    def sign_of(self, coeffs: Sequence[Fraction]) -> int:
        if all(c == 0 for c in coeffs):
            return 0
        if self.degree == 1:
            return 1 if coeffs[0] > 0 else -1
        while True:
            iv = (Fraction(0), Fraction(0))
            th = (self._lo, self._hi)
            for c in reversed(coeffs):
                iv = _interval_mul(iv, th)
                iv = (iv[0] + c, iv[1] + c)
            if iv[0] > 0:
                return 1
            if iv[1] < 0:
                return -1
            for _ in range(8):
                self._refine()

    # -- construction -------------------------------------------------------------
    def from_rational(self, q) -> "ExactScalar":
        z = (Fraction(0),) * self.degree
        return ExactScalar(self, (Fraction(q),) + z[1:], z)

    def from_coeffs(self, re: Iterable, im: Iterable = ()) -> "ExactScalar":
        n = self.degree
        re = [Fraction(c) for c in re]
        im = [Fraction(c) for c in im]
        if len(re) > n or len(im) > n:
            raise ValueError(f"too many coefficients for field {self.name!r} of degree {n}")
        re += [Fraction(0)] * (n - len(re))
        im += [Fraction(0)] * (n - len(im))
        return ExactScalar(self, tuple(re), tuple(im))

    def theta(self) -> "ExactScalar":
        if self.degree == 1:
            return self.from_rational(-self.minpoly[0])
        return self.from_coeffs([0, 1])

    def coerce(self, value) -> "ExactScalar":
        if isinstance(value, ExactScalar):
            if value.field is not self:
                raise ValueError(f"scalar from field {value.field.name!r} used in {self.name!r}")
            return value
        if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
            return self.from_rational(value)
        if isinstance(value, Rational):
            return self.from_rational(Fraction(value.numerator, value.denominator))
        raise TypeError(f"cannot coerce {type(value).__name__} into exact field {self.name!r}")

    # -- arithmetic on real coefficient tuples -------------------------------------
    def _mul(self, a, b):
        n = self.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = prod[:n]
        for k in range(n, 2 * n - 1):
            c = prod[k]
            if c:
                red = self._reduce[k - n]
                out = [out[i] + c * red[i] for i in range(n)]
        return tuple(out)

    def _inv(self, a):
        n = self.degree
        if n == 1:
            return (1 / a[0],)
        # columns: a * theta^j
        cols = []
        basis = [Fraction(0)] * n
        for j in range(n):
            e = list(basis)
            e[j] = Fraction(1)
            cols.append(self._mul(a, e))
        m = [[cols[j][i] for j in range(n)] + [Fraction(int(i == 0))] for i in range(n)]
        for c in range(n):
            piv = next(r for r in range(c, n) if m[r][c] != 0)
            m[c], m[piv] = m[piv], m[c]
            inv = 1 / m[c][c]
            m[c] = [v * inv for v in m[c]]
            for r in range(n):
                if r != c and m[r][c] != 0:
                    f = m[r][c]
                    m[r] = [vr - f * vc for vr, vc in zip(m[r], m[c])]
        return tuple(m[i][n] for i in range(n))

    def _float(self, a) -> float:
        return float(np.dot([float(c) for c in a], self._powers))

    # -- square roots ---------------------------------------------------------------
    def sqrt(self, x: "ExactScalar") -> "ExactScalar":
        """Positive square root of a positive real element, if it lies in the field."""
        if not x.is_real():
            raise ValueError("sqrt is only defined here for real elements")
        if x.sign() < 0:
            raise ValueError("sqrt of a negative element")
        if x.is_zero():
            return self.zero
        return self._sqrt_cached(x.re)

    @functools.lru_cache(maxsize=None)
    def _sqrt_cached(self, re):
        n = self.degree
        if all(c == 0 for c in re[1:]):
            q = re[0]
            num, den = math.isqrt(q.numerator), math.isqrt(q.denominator)
            if num * num == q.numerator and den * den == q.denominator:
                return self.from_rational(Fraction(num, den))
            if n == 1:
                raise ValueError(f"sqrt({q}) is not rational")
        import sympy
        from sympy.polys.numberfields import to_number_field

        gen = self._sympy_generator()
        expr = sum(sympy.Rational(c.numerator, c.denominator) * gen**i for i, c in enumerate(re))
        try:
            alg = to_number_field(sympy.sqrt(expr), gen)
        except Exception as exc:  # sympy raises IsomorphismFailed
            raise ValueError(f"square root not contained in field {self.name!r}") from exc
        coeffs = [Fraction(int(c.numerator), int(c.denominator)) for c in reversed(alg.rep.to_list())]
        y = self.from_coeffs(coeffs)
        if y.sign() < 0:
            y = -y
        if y * y != self.from_coeffs(re):
            raise ValueError("square root recognition failed")
        return y

    def _sympy_generator(self):
        import sympy

        t = sympy.Symbol("t")
        poly = sum(sympy.Rational(c.numerator, c.denominator) * t**i for i, c in enumerate(self.minpoly))
        roots = sympy.Poly(poly, t).real_roots()
        return min(roots, key=lambda r: abs(float(r) - self.theta_float))


class ExactScalar:
    """Element re + i*im of K(i); supports +, -, *, /, conjugate, exact sign."""

    __slots__ = ("field", "re", "im")

    def __init__(self, field: NumberField, re: tuple, im: tuple):
        self.field = field
        self.re = re
        self.im = im

    # -- coercion helpers
    def _other(self, other):
        if isinstance(other, ExactScalar):
            if other.field is not self.field:
                raise ValueError("mixing scalars from different fields")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.field.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return ExactScalar(self.field, tuple(a + b for a, b in zip(self.re, o.re)),
                           tuple(a + b for a, b in zip(self.im, o.im)))

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(self.field, tuple(-a for a in self.re), tuple(-a for a in self.im))

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            q = Fraction(other)
            return ExactScalar(self.field, tuple(a * q for a in self.re), tuple(a * q for a in self.im))
        o = self._other(other)
        if o is NotImplemented:
            return o
        K = self.field
        if not any(self.im) and not any(o.im):
            return ExactScalar(K, K._mul(self.re, o.re), K.zero.im)
        ac = K._mul(self.re, o.re)
        bd = K._mul(self.im, o.im)
        ad = K._mul(self.re, o.im)
        bc = K._mul(self.im, o.re)
        return ExactScalar(K, tuple(x - y for x, y in zip(ac, bd)), tuple(x + y for x, y in zip(ad, bc)))

    __rmul__ = __mul__

    def inverse(self) -> "ExactScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of exact zero")
        K = self.field
        norm = K._mul(self.re, self.re)
        if any(self.im):
            b2 = K._mul(self.im, self.im)
            norm = tuple(x + y for x, y in zip(norm, b2))
        ninv = K._inv(norm)
        return ExactScalar(K, K._mul(self.re, ninv), tuple(-x for x in K._mul(self.im, ninv)))

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = self.field.one, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "ExactScalar":
        return ExactScalar(self.field, self.re, tuple(-a for a in self.im))

    @property
    def real(self) -> "ExactScalar":
        return ExactScalar(self.field, self.re, self.field.zero.im)

    @property
    def imag(self) -> "ExactScalar":
        return ExactScalar(self.field, self.im, self.field.zero.im)

    def abs2(self) -> "ExactScalar":
        return (self * self.conjugate()).real

    def is_zero(self) -> bool:
        return not any(self.re) and not any(self.im)

    def is_real(self) -> bool:
        return not any(self.im)

    def sign(self) -> int:
        if not self.is_real():
            raise ValueError("sign of a non-real scalar")
        return self.field.sign_of(self.re)

    def is_rational(self) -> bool:
        return self.is_real() and not any(self.re[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("scalar is not rational")
        return self.re[0]

    def abs(self) -> "ExactScalar":
        """|x| for real x; for complex x the square root must lie in the field."""
        if self.is_real():
            return -self if self.sign() < 0 else self
        return self.field.sqrt(self.abs2())

    def sqrt(self) -> "ExactScalar":
        return self.field.sqrt(self)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)) and not isinstance(other, bool):
            o = self._other(other)
            return self.re == o.re and self.im == o.im
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field.name, self.re, self.im))

    def _cmp(self, other) -> int:
        o = self._other(other)
        if o is NotImplemented:
            raise TypeError("unsupported comparison")
        return (self - o).sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __complex__(self):
        K = self.field
        return complex(K._float(self.re), K._float(self.im))

    def __float__(self):
        if not self.is_real():
            raise TypeError("float() of a non-real exact scalar")
        return self.field._float(self.re)

    def __bool__(self):
        return not self.is_zero()

    def to_sympy(self):
        """Closed form as a simplified sympy expression."""
        import sympy

        gen = self.field._sympy_generator()
        t = sympy.Symbol("t")
        radicals = [r for r in sympy.roots(sympy.Poly(list(reversed(self.field.minpoly)), t)) if r.is_real]
        if radicals:
            gen = min(radicals, key=lambda r: abs(float(r) - self.field.theta_float))

        def poly(cs):
            return sum(sympy.Rational(c.numerator, c.denominator) * gen**i for i, c in enumerate(cs))

        return sympy.radsimp(sympy.simplify(poly(self.re) + sympy.I * poly(self.im)))

    def __repr__(self):
        def fmt(cs):
            terms = []
            for i, c in enumerate(cs):
                if c:
                    s = format_rational(c)
                    terms.append(s if i == 0 else f"{s}*t^{i}" if i > 1 else f"{s}*t")
            return " + ".join(terms) or "0"

        if self.is_real():
            return f"<{fmt(self.re)} in {self.field.name}>"
        return f"<({fmt(self.re)}) + i({fmt(self.im)}) in {self.field.name}>"


# -- registry of named fields ---------------------------------------------------------
_FIELD_SPECS = {
    "rational": ([-1, 1], 1.0),
    "sqrt2": ([-2, 0, 1], math.sqrt(2)),
    "sqrt5": ([-5, 0, 1], math.sqrt(5)),
    # Q(sqrt(phi)): t^4 - t^2 - 1, theta = sqrt((1+sqrt5)/2); holds unitary Fibonacci data
    "sqrt_phi": ([-1, 0, -1, 0, 1], math.sqrt((1 + math.sqrt(5)) / 2)),
    # Q(2^(1/4)): t^4 - 2; holds unitary Ising data and sqrt(d(sigma))
    "fourth_root2": ([-2, 0, 0, 0, 1], 2**0.25),
}
FIELD_TAGS = tuple(_FIELD_SPECS) + ("float",)


@functools.lru_cache(maxsize=None)
def get_field(tag: str) -> NumberField:
    if tag not in _FIELD_SPECS:
        raise KeyError(f"unknown exact field tag {tag!r}; known: {sorted(_FIELD_SPECS)}")
    poly, root = _FIELD_SPECS[tag]
    return NumberField(tag, poly, root)


def is_exact(x) -> bool:
    return isinstance(x, (ExactScalar, Fraction, int)) and not isinstance(x, bool)


def to_complex(x) -> complex:
    return complex(x)


def scalar_to_json(x):
    """Encode a scalar for JSON: rationals as "p/q", field elements as coefficient lists."""
    if isinstance(x, ExactScalar):
        if x.is_rational():
            return format_rational(x.re[0])
        out = {"re": [format_rational(c) for c in x.re]}
        if any(x.im):
            out["im"] = [format_rational(c) for c in x.im]
        return out
    if isinstance(x, (int, Fraction)):
        return format_rational(Fraction(x))
    z = complex(x)
    return [z.real, z.imag] if z.imag else z.real


def scalar_from_json(obj, field: NumberField | None):
    """Inverse of :func:`scalar_to_json`; ``field=None`` decodes to complex floats."""
    if field is None:
        if isinstance(obj, list):
            return complex(obj[0], obj[1])
        if isinstance(obj, dict):
            raise ValueError("exact field element given but no exact field selected")
        if isinstance(obj, str):
            return complex(float(Fraction(obj)))
        return complex(obj)
    if isinstance(obj, dict):
        return field.from_coeffs([parse_rational(c) for c in obj.get("re", [])],
                                 [parse_rational(c) for c in obj.get("im", [])])
    if isinstance(obj, list):
        return field.from_coeffs([parse_rational(c) for c in obj])
    if isinstance(obj, float):
        raise ValueError(f"float {obj!r} cannot be used in exact field {field.name!r}")
    return field.from_rational(parse_rational(obj))


class Domain:
    """Array helper for one scalar mode: exact (object arrays over ``field``) or float."""

    def __init__(self, field: NumberField | None):
        self.field = field
        self.exact = field is not None

    def __repr__(self):
        return f"Domain({self.field.name if self.exact else 'float'})"

    @property
    def zero(self):
        return self.field.zero if self.exact else 0j

    @property
    def one(self):
        return self.field.one if self.exact else 1 + 0j

    def scalar(self, value):
        if self.exact:
            return self.field.coerce(value)
        return complex(value)

    def zeros(self, shape):
        if self.exact:
            out = np.empty(shape, dtype=object)
            out.fill(self.field.zero)
            return out
        return np.zeros(shape, dtype=complex)

    def eye(self, n: int):
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.one
        return out

    def asarray(self, values):
        arr = np.asarray(values, dtype=object if self.exact else complex)
        if self.exact:
            flat = arr.reshape(-1)
            for i, v in enumerate(flat):
                flat[i] = self.field.coerce(v)
        return arr

    def is_zero(self, x, tol: float = 0.0) -> bool:
        if self.exact:
            return x.is_zero()
        return abs(x) <= tol

    def to_float(self, arr):
        if not self.exact:
            return np.asarray(arr, dtype=complex)
        arr = np.asarray(arr, dtype=object)
        out = np.empty(arr.shape, dtype=complex)
        flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
        for i, v in enumerate(flat_in):
            flat_out[i] = complex(v)
        return out
