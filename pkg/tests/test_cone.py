from fractions import Fraction

import numpy as np
import pytest

from tubecone.cone import (Certificate, CertificateError, ConeSupport, GramDecomposition, SOSMap, l1_absorption,
                           laplacian_positivity_certificate, ldl_psd, order_unit_certificate, verify_certificate)
from tubecone.categories import category_hash
from tubecone.fusion_ring import FusionAlgebraElement, fa_multiply
from tubecone.scalars import get_field
from tubecone.skeleton import Morphism

from _shared import NAMES, algebra, category, laplacian


def b_star_b(alg, b):
    return alg.to_fusion(alg.multiply_vectors(alg.star_vector(b.vec), b.vec))


def unit_elem(alg, c):
    return FusionAlgebraElement({alg.data.unit: alg.domain.scalar(c)})


def test_block_sizes_frozen():
    sizes = {name: ConeSupport(algebra(name)).block_sizes() for name in NAMES}
    assert sizes == {"vec_z2": {0: 2}, "vec_z3": {0: 3}, "fib": {0: 2, 1: 1}, "ising": {0: 3, 1: 1}}


def test_support_requires_unit():
    with pytest.raises(ValueError):
        ConeSupport(algebra("fib"), [1], [0, 1])


def test_ball_support():
    alg = algebra("fib")
    assert ConeSupport.ball(alg, [1], 0).block_sizes() == {0: 1}
    assert ConeSupport.ball(alg, [1], 1).block_sizes() == {0: 2, 1: 1}


def test_lambda_of_p1_is_unit():
    alg = algebra("fib")
    sup = ConeSupport(alg)
    G = GramDecomposition(sup)
    G.add_unit(1)
    assert (SOSMap(sup).apply(G) - unit_elem(alg, 1)).is_zero()


def test_lambda_of_identity_on_fibonacci_unit_column():
    alg = algebra("fib")
    sup = ConeSupport(alg)
    dom = alg.domain
    out = SOSMap(sup).apply({0: dom.eye(2)})
    assert out.coeffs[0] == 2 and out.coeffs[1] == 1


@pytest.mark.parametrize("name", NAMES)
def test_lambda_of_psd_has_nonnegative_omega(name):
    alg = algebra(name)
    L = SOSMap(ConeSupport(alg))
    rng = np.random.default_rng(11)
    for _ in range(20):
        blocks = {}
        for x, T in L.float_tensors.items():
            n = T.shape[1]
            Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            blocks[x] = Z @ Z.conj().T
        assert L.apply_float(blocks)[alg.data.unit].real >= 0


@pytest.mark.parametrize("name", NAMES)
def test_order_unit_norm_is_dimension_squared(name):
    alg = algebra(name)
    sup = ConeSupport(alg)
    L = SOSMap(sup)
    for z in range(alg.data.rank):
        res = order_unit_certificate(sup, (z,), alg.data.unit)
        d = alg.dims[z]
        assert res.R == d * d
        assert res.sigma_norm == d
        zbar_z = fa_multiply(FusionAlgebraElement({alg.data.dual[z]: 1}), FusionAlgebraElement({z: 1}), alg.data)
        assert (L.apply(res.gram) + zbar_z.map(alg.domain.scalar) - unit_elem(alg, d * d)).is_zero()
        assert all(v >= -1e-12 for v in res.gram.min_eigenvalues().values())


def test_order_unit_for_unit_is_trivial():
    alg = algebra("ising")
    res = order_unit_certificate(ConeSupport(alg), (0,), 0)
    assert res.R == 1
    assert all(np.all(B == 0) for B in res.gram.blocks.values())


def test_order_unit_fibonacci_tau():
    alg = algebra("fib")
    sup = ConeSupport(alg)
    res = order_unit_certificate(sup, (1,), 0)
    phi = alg.dims[1]
    lam = SOSMap(sup).apply(res.gram)
    # phi^2 1 - tau tau = phi 1 - tau
    assert (lam + FusionAlgebraElement({1: alg.domain.one}) - unit_elem(alg, phi)).is_zero()


def test_order_unit_general_gamma_and_word():
    alg = algebra("fib")
    sup = ConeSupport(alg)
    L = SOSMap(sup)
    F = alg.F
    (t,) = F.trees((1, 1), 1)
    res = order_unit_certificate(sup, (1,), 1, Morphism.basis_tree(F, (1, 1), 1, t))
    assert (L.apply(res.gram) + b_star_b(alg, res.b) - unit_elem(alg, res.R)).is_zero()
    res = order_unit_certificate(sup, (1, 1), 0)
    phi = alg.dims[1]
    assert res.R == phi ** 4
    assert (L.apply(res.gram) + b_star_b(alg, res.b) - unit_elem(alg, res.R)).is_zero()


@pytest.mark.parametrize("name", NAMES)
def test_laplacian_certificate_is_exact(name):
    alg = algebra(name)
    sup = ConeSupport(alg)
    spec, delta = laplacian(name)
    G = laplacian_positivity_certificate(sup, spec)
    assert (SOSMap(sup).apply(G) - delta.map(alg.domain.scalar)).is_zero()
    for B in G.blocks.values():
        assert ldl_psd(B).psd


def test_laplacian_certificate_z2_closed_form():
    alg = algebra("vec_z2")
    sup = ConeSupport(alg)
    spec, _ = laplacian("vec_z2", ["g"])
    G = laplacian_positivity_certificate(sup, spec)
    half = Fraction(1, 2)
    B = G.blocks[0]
    assert [[B[0, 0], B[0, 1]], [B[1, 0], B[1, 1]]] == [[half, -half], [-half, half]]


def test_l1_absorption_zero():
    alg = algebra("fib")
    res = l1_absorption(ConeSupport(alg), FusionAlgebraElement({}))
    assert res.eta == 0
    assert all(np.all(B == 0) for B in res.gram.blocks.values())


def test_l1_absorption_self_dual():
    alg = algebra("fib")
    sup = ConeSupport(alg)
    r = FusionAlgebraElement({1: alg.domain.scalar(-1)})
    exact = l1_absorption(sup, r, rational_eta=False)
    phi = alg.dims[1]
    assert exact.eta == phi
    assert (SOSMap(sup).apply(exact.gram) - unit_elem(alg, phi) - r).is_zero()
    rounded = l1_absorption(sup, r)
    assert rounded.eta >= phi
    assert float(rounded.eta - phi) < 1e-14
    assert rounded.eta.is_rational()
    assert (SOSMap(sup).apply(rounded.gram) - unit_elem(alg, rounded.eta) - r).is_zero()


def test_l1_absorption_conjugate_pair():
    alg = algebra("vec_z3")
    sup = ConeSupport(alg)
    K = alg.F.field
    r = FusionAlgebraElement({1: K.i, 2: -K.i})
    res = l1_absorption(sup, r)
    assert res.eta == 2
    assert (SOSMap(sup).apply(res.gram) - unit_elem(alg, 2) - r).is_zero()


def test_l1_absorption_rejects_non_self_adjoint():
    alg = algebra("vec_z3")
    with pytest.raises(CertificateError):
        l1_absorption(ConeSupport(alg), FusionAlgebraElement({1: alg.domain.one}))


def test_ldl_psd():
    K = get_field("rational")
    F = K.from_rational
    good = np.array([[F(2), F(1)], [F(1), F(2)]], dtype=object)
    assert ldl_psd(good).psd
    singular = np.array([[F(1), F(1)], [F(1), F(1)]], dtype=object)
    assert ldl_psd(singular).psd
    bad = np.array([[F(1), F(2)], [F(2), F(1)]], dtype=object)
    res = ldl_psd(bad)
    assert not res.psd and res.failure
    zero_pivot = np.array([[F(0), F(1)], [F(1), F(0)]], dtype=object)
    assert not ldl_psd(zero_pivot).psd


def hand_built_z2(k, eps=Fraction(1, 100)):
    """Delta = 1 - g satisfies Delta^2 = 2 Delta, so Delta^2 - 2 Delta + eps 1 = eps p1 p1*."""
    cat = category("vec_z2")
    alg = algebra("vec_z2")
    sup = ConeSupport(alg)
    G = GramDecomposition(sup)
    G.add_unit(eps)
    zero = GramDecomposition(sup)
    return Certificate(category=cat.to_dict(), category_hash=category_hash(cat), S=["g"], nu={"g": Fraction(1)},
                       k=Fraction(k), eps=eps, eps0=eps, eta=Fraction(0), X=["1", "g"], W=["1", "g"],
                       gram=G.to_json(), residual={}, eta_gram=zero.to_json())


def test_hand_built_certificate_accepted():
    v = verify_certificate(hand_built_z2(2))
    assert v.accepted, v.messages


def test_hand_built_certificate_wrong_k_rejected():
    v = verify_certificate(hand_built_z2(Fraction(21, 10)))
    assert not v.accepted
    assert "identity" in v.messages[-1]


def test_negative_pivot_rejected():
    cert = hand_built_z2(2)
    cert.gram["1"][1][1] = "-1/100"
    v = verify_certificate(cert)
    assert not v.accepted
    assert "not PSD" in v.messages[-1]


def test_corrupted_hash_and_version_rejected():
    cert = hand_built_z2(2)
    cert.category_hash = "0" * 64
    assert not verify_certificate(cert).accepted
    cert = hand_built_z2(2)
    cert.version = "999"
    assert not verify_certificate(cert).accepted


def test_eps_budget_enforced():
    cert = hand_built_z2(2)
    cert.eps = Fraction(1, 200)
    v = verify_certificate(cert)
    assert not v.accepted


def test_certificate_json_roundtrip(tmp_path):
    cert = hand_built_z2(2)
    path = tmp_path / "c.json"
    cert.save(path)
    back = Certificate.load(path)
    assert back.dumps() == cert.dumps()
    assert verify_certificate(back).accepted
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(CertificateError):
        Certificate.load(path)
