import numpy as np
import pytest

from tubecone.cone import word_cups
from tubecone.skeleton import (FSymbolTable, Morphism, categorical_trace, compose, dagger,
                               dimension_crosscheck, pentagon_check, standard_solution, tensor, tree_basis,
                               unitarity_check)

from _shared import NAMES, PHI, category, random_morphism


@pytest.mark.parametrize("name", NAMES)
def test_pentagon_exact_builtins(name):
    assert pentagon_check(category(name).F) == 0.0


@pytest.mark.parametrize("name", NAMES)
def test_pentagon_float_builtins(name):
    assert pentagon_check(category(name, False).F) < 1e-12


def test_unitarity_and_dimensions():
    for name in NAMES:
        F = category(name).F
        assert unitarity_check(F) < 1e-12
        assert dimension_crosscheck(F) < 1e-12


def test_perturbed_fibonacci_rejected():
    F = category("fib", False).F
    entries = dict(F.entries)
    key = (1, 1, 1, 1, 0, 0, 0, 0, 0, 0)
    entries[key] = entries[key] + 0.01
    bad = FSymbolTable(F.data, entries, None, "fib-perturbed")
    assert pentagon_check(bad) > 1e-3


def test_missing_f_symbol_rejected():
    F = category("fib", False).F
    entries = dict(F.entries)
    del entries[(1, 1, 1, 1, 1, 0, 0, 1, 0, 0)]
    bad = FSymbolTable(F.data, entries, None, "fib-missing")
    assert unitarity_check(bad) > 0.1
    assert pentagon_check(bad) > 1e-3


def test_tree_basis_counts():
    F = category("fib").F
    assert len(tree_basis((1, 1), 0, F)) == 1
    assert len(tree_basis((1, 1, 1), 1, F)) == 2
    assert len(tree_basis((), 0, F)) == 1
    assert len(tree_basis((1, 1, 1, 1), 0, F)) == 2


def test_compose_identity_and_orthonormality():
    F = category("fib").F
    g = Morphism.matrix_unit(F, (1, 1), (1, 1), 1, 0, 0)
    assert compose(Morphism.identity(F, (1, 1)), g).equals(g)
    trees = F.trees((1, 1, 1), 1)
    V = Morphism.basis_tree(F, (1, 1, 1), 1, trees[0])
    W = Morphism.basis_tree(F, (1, 1, 1), 1, trees[1])
    assert compose(dagger(V), W).is_zero()
    assert compose(dagger(V), V).equals(Morphism.identity(F, (1,)))


def test_tensor_of_identities():
    F = category("ising").F
    assert tensor(Morphism.identity(F, (2,)), Morphism.identity(F, (2, 1))).equals(Morphism.identity(F, (2, 2, 1)))


@pytest.mark.parametrize("name", ["fib", "ising"])
def test_dagger_tensor_and_interchange(name):
    F = category(name, False).F
    rng = np.random.default_rng(7)
    n = F.data.rank - 1
    a, b = (n, n), (n,)
    for _ in range(5):
        f = random_morphism(F, a, a, rng)
        g = random_morphism(F, b, (n, n, n), rng)
        assert dagger(tensor(f, g)).distance(tensor(dagger(f), dagger(g))) < 1e-12
        f1, f2 = random_morphism(F, a, a, rng), random_morphism(F, a, a, rng)
        g1, g2 = random_morphism(F, b, b, rng), random_morphism(F, b, b, rng)
        lhs = compose(tensor(f1, g1), tensor(f2, g2))
        rhs = tensor(compose(f1, f2), compose(g1, g2))
        assert lhs.distance(rhs) < 1e-10


def test_dagger_laws():
    F = category("fib", False).F
    rng = np.random.default_rng(1)
    f = random_morphism(F, (1, 1), (1,), rng)
    g = random_morphism(F, (1,), (1, 1), rng)
    assert dagger(dagger(f)).distance(f) == 0
    idm = Morphism.identity(F, (1, 1))
    assert dagger(idm).equals(idm)
    assert dagger(compose(f, g)).distance(compose(dagger(g), dagger(f))) < 1e-14


def test_standard_solution_examples():
    F = category("fib").F
    one = standard_solution(0, F)
    assert one.d == 1
    tau = standard_solution(1, F)
    assert abs(float(compose(dagger(tau.R), tau.R).scalar()) - PHI) < 1e-10
    assert compose(dagger(tau.R), tau.R).scalar() == F.dims()[1]
    z2 = standard_solution(1, category("vec_z2").F)
    assert compose(dagger(z2.R), z2.R).scalar() == 1


@pytest.mark.parametrize("name", NAMES)
def test_conjugate_equations_exact(name):
    F = category(name).F
    for z in range(F.data.rank):
        assert max(standard_solution(z, F).residuals().values()) == 0.0


def test_categorical_trace_of_identity_is_dimension():
    F = category("fib").F
    assert categorical_trace(Morphism.identity(F, (1,))) == F.dims()[1]


def test_trace_of_channel_projection():
    F = category("fib").F
    dims = F.dims()
    for c in (0, 1):
        (t,) = F.trees((1, 1), c)
        V = Morphism.basis_tree(F, (1, 1), c, t)
        assert categorical_trace(compose(V, dagger(V))) == dims[c]


def test_trace_matches_cups():
    F = category("ising", False).F
    rng = np.random.default_rng(3)
    word = (2, 2)
    zbar, R, _ = word_cups(F, word)
    f = random_morphism(F, word, word, rng)
    via_cups = compose(dagger(R), compose(tensor(Morphism.identity(F, zbar), f), R)).scalar()
    assert abs(complex(via_cups) - complex(categorical_trace(f))) < 1e-12


def test_trace_is_tracial():
    F = category("fib", False).F
    rng = np.random.default_rng(5)
    f = random_morphism(F, (1, 1), (1,), rng)
    g = random_morphism(F, (1,), (1, 1), rng)
    assert abs(complex(categorical_trace(compose(f, g))) - complex(categorical_trace(compose(g, f)))) < 1e-10
