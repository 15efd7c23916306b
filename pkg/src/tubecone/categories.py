"""Built-in categories and the JSON category file format."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .fusion_ring import FusionData, FusionDataError
from .scalars import Domain, get_field, scalar_from_json, scalar_to_json
from .skeleton import FSymbolTable

__all__ = [
    "Category",
    "BUILTINS",
    "builtin",
    "vec_zn",
    "fibonacci",
    "ising",
    "load_category",
    "category_from_dict",
    "category_to_dict",
    "category_hash",
]


class Category:
    """Fusion data plus F-symbols, with the exact field tag they were read in."""

    def __init__(self, name: str, F: FSymbolTable, field_tag: str):
        self.name = name
        self.F = F
        self.data = F.data
        self.field_tag = field_tag

    def __repr__(self):
        return f"Category({self.name!r}, simples={list(self.data.names)}, field={self.field_tag})"

    def to_float(self) -> "Category":
        return Category(self.name, self.F.to_float(), "float")

    def to_dict(self) -> dict:
        return category_to_dict(self)

    def hash(self) -> str:
        return category_hash(self)


def _admissible(N, a, b, c, d, e, f):
    return N[a, b, e] and N[e, c, d] and N[b, c, f] and N[a, f, d]


def _multiplicity_free_table(data: FusionData, special: dict, field_tag: str, name: str) -> Category:
    """All admissible multiplicity-free F-symbols equal 1 except the listed ones."""
    field = None if field_tag == "float" else get_field(field_tag)
    dom = Domain(field)
    N, n = data.N, data.rank
    entries = {}
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for d in range(n):
                    for e in range(n):
                        for f in range(n):
                            if _admissible(N, a, b, c, d, e, f):
                                entries[(a, b, c, d, e, 0, 0, f, 0, 0)] = dom.one
    for (a, b, c, d, e, f), v in special.items():
        key = (a, b, c, d, e, 0, 0, f, 0, 0)
        if key not in entries:
            raise FusionDataError(f"special F-symbol {key} is not admissible")
        entries[key] = dom.scalar(v)
    return Category(name, FSymbolTable(data, entries, field, name), field_tag)


def vec_zn(n: int, exact: bool = True) -> Category:
    """Vec(Z/n) with trivial associator; simples 1, g, g2, ..."""
    if n < 1:
        raise ValueError("n must be positive")
    names = ["1"] + ["g" if k == 1 else f"g{k}" for k in range(1, n)]
    dual = [(-k) % n for k in range(n)]
    fusion = [(a, b, (a + b) % n, 1) for a in range(n) for b in range(n)]
    data = FusionData(names, 0, dual, fusion)
    return _multiplicity_free_table(data, {}, "rational" if exact else "float", f"vec_z{n}")


def fibonacci(exact: bool = True) -> Category:
    data = FusionData(["1", "tau"], 0, [0, 1],
                      [(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 0, 1), (1, 1, 1, 1)])
    if exact:
        K = get_field("sqrt_phi")
        th = K.theta()
        inv_phi, inv_sqrt_phi = 1 / (th * th), 1 / th
    else:
        phi = (1 + 5 ** 0.5) / 2
        inv_phi, inv_sqrt_phi = 1 / phi, phi ** -0.5
    t = 1
    special = {
        (t, t, t, t, 0, 0): inv_phi,
        (t, t, t, t, 0, t): inv_sqrt_phi,
        (t, t, t, t, t, 0): inv_sqrt_phi,
        (t, t, t, t, t, t): -inv_phi,
    }
    return _multiplicity_free_table(data, special, "sqrt_phi" if exact else "float", "fib")


def ising(exact: bool = True) -> Category:
    one, eps, sig = 0, 1, 2
    fusion = [(0, a, a, 1) for a in range(3)] + [(a, 0, a, 1) for a in (1, 2)] + [
        (eps, eps, one, 1), (eps, sig, sig, 1), (sig, eps, sig, 1), (sig, sig, one, 1), (sig, sig, eps, 1)]
    data = FusionData(["1", "eps", "sigma"], 0, [0, 1, 2], fusion)
    if exact:
        K = get_field("fourth_root2")
        th = K.theta()
        h = 1 / (th * th)
    else:
        h = 2 ** -0.5
    special = {
        (sig, sig, sig, sig, one, one): h,
        (sig, sig, sig, sig, one, eps): h,
        (sig, sig, sig, sig, eps, one): h,
        (sig, sig, sig, sig, eps, eps): -h,
        (eps, sig, eps, sig, sig, sig): -1,
        (sig, eps, sig, eps, sig, sig): -1,
    }
    return _multiplicity_free_table(data, special, "fourth_root2" if exact else "float", "ising")


BUILTINS = {
    "vec_z2": lambda exact=True: vec_zn(2, exact),
    "vec_z3": lambda exact=True: vec_zn(3, exact),
    "fib": fibonacci,
    "ising": ising,
}


def builtin(name: str, exact: bool = True) -> Category:
    if name in BUILTINS:
        return BUILTINS[name](exact)
    if name.startswith("vec_z") and name[5:].isdigit():
        return vec_zn(int(name[5:]), exact)
    raise KeyError(f"unknown built-in category {name!r}; known: {sorted(BUILTINS)} or vec_zN")


# -- file format ------------------------------------------------------------------------------
def category_to_dict(cat: Category) -> dict:
    data, F = cat.data, cat.F
    names = data.names
    fusion = [[names[a], names[b], names[c], int(m)] for (a, b, c), m in sorted(data.coefficients().items())]
    fs = []
    for key in sorted(F.entries):
        v = F.entries[key]
        a, b, c, d, e, al, be, f, mu, nu = key
        if F.exact:
            re, im = scalar_to_json(v.real), scalar_to_json(v.imag) if not v.is_real() else "0"
        else:
            re, im = float(v.real), float(v.imag)
        fs.append([names[a], names[b], names[c], names[d], names[e], al, be, names[f], mu, nu, re, im])
    return {
        "name": cat.name,
        "simples": list(names),
        "unit": names[data.unit],
        "dual": {names[a]: names[data.dual[a]] for a in range(data.rank)},
        "fusion": fusion,
        "fsymbols": fs,
        "field": cat.field_tag,
    }


def category_from_dict(obj: dict) -> Category:
    try:
        names = obj["simples"]
        data = FusionData(names, obj["unit"], obj["dual"], [tuple(r) for r in obj["fusion"]])
        tag = obj.get("field", "float")
        field = None if tag == "float" else get_field(tag)
        entries = {}
        for row in obj["fsymbols"]:
            if len(row) != 12:
                raise FusionDataError(f"F-symbol row must have 12 fields, got {row!r}")
            a, b, c, d, e, al, be, f, mu, nu, re, im = row
            key = (data.index(a), data.index(b), data.index(c), data.index(d), data.index(e), int(al), int(be),
                   data.index(f), int(mu), int(nu))
            val = scalar_from_json(re, field)
            imv = scalar_from_json(im, field)
            val = val + imv * (field.i if field is not None else 1j)
            if key in entries:
                raise FusionDataError(f"duplicate F-symbol entry {row[:10]!r}")
            entries[key] = val
    except KeyError as exc:
        raise FusionDataError(f"category file is missing field {exc}") from exc
    name = str(obj.get("name", ""))
    return Category(name, FSymbolTable(data, entries, field, name), tag)


def load_category(path) -> Category:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FusionDataError(f"{path}: not valid JSON ({exc})") from exc
    return category_from_dict(obj)


def dump_category(cat: Category, path) -> None:
    Path(path).write_text(json.dumps(category_to_dict(cat), indent=1) + "\n", encoding="utf-8")


def category_hash(cat: Category) -> str:
    blob = json.dumps(category_to_dict(cat), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
