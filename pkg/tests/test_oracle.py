import numpy as np
import pytest

from tubecone.cone import ConeSupport, SOSMap
from tubecone.oracle import admissible_spectrum, build_gns, crosscheck_admissibility
from tubecone.tube import TubeAlgebra, embed_fusion

from _shared import GAP_S, NAMES, PHI, algebra, category, float_algebra, laplacian


def model(name):
    return build_gns(algebra(name))


def test_gns_dimensions():
    assert model("vec_z2").dim == 4
    m = model("fib")
    assert m.dim == algebra("fib").dim
    assert {n: model(n).corner_dim for n in NAMES} == {"vec_z2": 2, "vec_z3": 3, "fib": 3, "ising": 4}


def test_spectra_frozen():
    spectra = {}
    for name in NAMES:
        _, d = laplacian(name, GAP_S[name])
        spectra[name] = admissible_spectrum(model(name), d).eigenvalues
    assert np.allclose(spectra["vec_z2"], [0, 2], atol=1e-12)
    assert np.allclose(spectra["vec_z3"], [0, 1.5, 1.5], atol=1e-12)
    assert np.allclose(spectra["fib"], [0, 1 + PHI ** -2, 1 + PHI ** -2], atol=1e-12)
    assert np.allclose(spectra["ising"], [0, 1, 1, 2], atol=1e-12)


def test_gaps():
    _, d = laplacian("vec_z2", ["g"])
    assert admissible_spectrum(model("vec_z2"), d).gap == pytest.approx(2, abs=1e-12)
    _, d = laplacian("fib", ["tau"])
    rep = admissible_spectrum(model("fib"), d)
    assert abs(rep.gap - (1 + PHI ** -2)) < 1e-9
    assert rep.zero_multiplicity == 1
    _, d = laplacian("ising", ["sigma"])
    assert admissible_spectrum(model("ising"), d).gap == pytest.approx(1, abs=1e-12)


def test_ising_spectrum_within_characters():
    _, d = laplacian("ising", ["sigma"])
    ev = admissible_spectrum(model("ising"), d).eigenvalues
    assert all(min(abs(v - c) for c in (0, 1, 2)) < 1e-9 for v in ev)


def test_report_lines():
    _, d = laplacian("fib", ["tau"])
    lines = admissible_spectrum(model("fib"), d).lines()
    assert lines[-1] == "gap 1.381966011250"


@pytest.mark.parametrize("name", NAMES)
def test_right_action_is_antihomomorphism_and_star_preserving(name):
    m = model(name)
    alg = m.algebra
    rng = np.random.default_rng(0)
    for _ in range(10):
        a = rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
        b = rng.standard_normal(alg.dim) + 1j * rng.standard_normal(alg.dim)
        ab = alg.multiply_vectors(a, b)
        assert np.abs(m.right_matrix(ab) - m.right_matrix(b) @ m.right_matrix(a)).max() < 1e-10
        Ra = m.orthonormal(m.right_matrix(a))
        Ras = m.orthonormal(m.right_matrix(alg.star_vector(a)))
        assert np.abs(Ras - Ra.conj().T).max() < 1e-10


@pytest.mark.parametrize("name,floor", [("vec_z2", -1e-12), ("fib", -1e-10), ("vec_z3", -1e-10),
                                        ("ising", -1e-10)])
def test_crosscheck_passes(name, floor):
    rep = crosscheck_admissibility(model(name), SOSMap(ConeSupport(float_algebra(name))), samples=100, seed=1)
    assert rep.passed
    assert rep.worst >= floor
    assert rep.samples == 100


@pytest.mark.parametrize("name", ["fib", "ising", "vec_z3"])
def test_negated_star_detected(name):
    wrong = TubeAlgebra(category(name).F, convention="negated").to_float()
    rep = crosscheck_admissibility(model(name), SOSMap(ConeSupport(wrong)), samples=100, seed=1)
    assert not rep.passed
    assert rep.worst < -0.1


def test_corner_operator_of_unit_is_identity():
    m = model("fib")
    one = embed_fusion(m.algebra, laplacian("fib", ["tau"])[1].map(complex)).vec * 0
    one[m.algebra.projection_index(0)] = 1
    assert np.allclose(m.corner_operator(one), np.eye(m.corner_dim))
