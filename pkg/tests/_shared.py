"""Cached built-in categories and tube algebras shared by the test modules."""

from functools import lru_cache

import numpy as np

from tubecone.categories import builtin
from tubecone.fusion_ring import LaplacianSpec, build_laplacian
from tubecone.skeleton import Morphism
from tubecone.tube import TubeAlgebra

NAMES = ("vec_z2", "vec_z3", "fib", "ising")
GAP_S = {"vec_z2": ["g"], "vec_z3": ["g", "g2"], "fib": ["tau"], "ising": ["sigma"]}
PHI = (1 + 5 ** 0.5) / 2


@lru_cache(maxsize=None)
def category(name, exact=True):
    return builtin(name, exact)


@lru_cache(maxsize=None)
def algebra(name, exact=True):
    return TubeAlgebra(category(name, exact).F)


@lru_cache(maxsize=None)
def float_algebra(name):
    return algebra(name, True).to_float()


def laplacian(name, S=None, exact=True):
    cat = category(name, exact)
    alg = algebra(name, exact)
    names = S if S is not None else [n for i, n in enumerate(cat.data.names) if i != cat.data.unit]
    spec = LaplacianSpec.create(cat.data, names, alg.dims)
    return spec, build_laplacian(spec, cat.data)


def random_morphism(F, source, target, rng):
    blocks = {}
    for r in F.roots(tuple(source)):
        rows, cols = len(F.trees(tuple(target), r)), len(F.trees(tuple(source), r))
        if rows and cols:
            blocks[r] = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    return Morphism(F, tuple(source), tuple(target), blocks)
