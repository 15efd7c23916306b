from fractions import Fraction

import numpy as np
import pytest

from tubecone.fusion_ring import (FusionAlgebraElement, FusionData, FusionDataError, LaplacianSpec, build_laplacian,
                                  fa_multiply, fa_star, fp_dimensions, is_generating, validate_fusion_data)

from _shared import PHI, category

Z2 = FusionData(["1", "g"], "1", {"1": "1", "g": "g"},
                [("1", "1", "1", 1), ("1", "g", "g", 1), ("g", "1", "g", 1), ("g", "g", "1", 1)])
FIB = FusionData(["1", "tau"], "1", {"1": "1", "tau": "tau"},
                 [("1", "1", "1", 1), ("1", "tau", "tau", 1), ("tau", "1", "tau", 1),
                  ("tau", "tau", "1", 1), ("tau", "tau", "tau", 1)])


def test_validate_group_ring_and_fibonacci():
    assert validate_fusion_data(Z2).ok
    assert validate_fusion_data(FIB).ok


def test_duality_violation_reported():
    bad = FusionData(["1", "a", "b"], "1", {"1": "1", "a": "a", "b": "b"},
                     [("1", x, x, 1) for x in "1ab"] + [(x, "1", x, 1) for x in "ab"] +
                     [("a", "b", "1", 1), ("b", "a", "1", 1), ("a", "a", "b", 1), ("b", "b", "a", 1)])
    rep = validate_fusion_data(bad)
    assert not rep.ok
    assert any("duality violation" in v for v in rep.violations)


def test_missing_dual_channel_reported():
    rep = validate_fusion_data(FusionData(["1", "a"], "1", {"1": "1", "a": "a"},
                                          [("1", "1", "1", 1), ("1", "a", "a", 1), ("a", "1", "a", 1)]))
    assert not rep.ok
    assert "fail" in str(rep)


def test_fp_dimensions():
    assert np.allclose(fp_dimensions(Z2), [1, 1], atol=1e-12)
    assert abs(fp_dimensions(FIB)[1] - PHI) < 1e-12
    d = fp_dimensions(category("ising").data)
    assert abs(d[2] - 2 ** 0.5) < 1e-12


def test_fa_multiply_examples():
    tau = FusionAlgebraElement({1: 1})
    one = FusionAlgebraElement({0: 1})
    assert fa_multiply(tau, tau, FIB).max_abs_diff(FusionAlgebraElement({0: 1, 1: 1})) == 0
    assert fa_multiply(one, tau, FIB).max_abs_diff(tau) == 0
    x = FusionAlgebraElement({0: 1, 1: 1})
    assert fa_multiply(x, tau, FIB).max_abs_diff(FusionAlgebraElement({0: 1, 1: 2})) == 0


def test_fa_star_examples():
    z3 = category("vec_z3").data
    g = FusionAlgebraElement({1: 1})
    assert fa_star(g, z3).max_abs_diff(FusionAlgebraElement({2: 1})) == 0
    itau = FusionAlgebraElement({1: 1j})
    assert fa_star(itau, FIB).max_abs_diff(FusionAlgebraElement({1: -1j})) == 0
    x = FusionAlgebraElement({0: 2 - 1j, 1: 0.5j, 2: 3})
    assert fa_star(fa_star(x, z3), z3).max_abs_diff(x) == 0


def test_laplacian_fibonacci_exact():
    cat = category("fib")
    dims = cat.F.dims()
    spec = LaplacianSpec.create(cat.data, ["tau"], dims)
    phi = dims[1]
    assert spec.kappa == phi
    delta = build_laplacian(spec, cat.data)
    assert delta.coeffs[0] == 1
    assert delta.coeffs[1] == -1 / phi
    assert abs(float(delta.coeffs[1]) + 1 / PHI) < 1e-15


def test_laplacian_z2_and_ising():
    cat = category("vec_z2")
    spec = LaplacianSpec.create(cat.data, ["g"], cat.F.dims())
    assert spec.kappa == 1
    d = build_laplacian(spec, cat.data)
    assert d.coeffs[1] == -1
    cat = category("ising")
    spec = LaplacianSpec.create(cat.data, ["sigma"], cat.F.dims())
    assert abs(float(spec.kappa) - 2 ** 0.5) < 1e-15
    d = build_laplacian(spec, cat.data)
    assert abs(float(d.coeffs[2]) + 2 ** -0.5) < 1e-15


def test_laplacian_spec_errors():
    z3 = category("vec_z3")
    dims = z3.F.dims()
    with pytest.raises(FusionDataError, match="not symmetric"):
        LaplacianSpec.create(z3.data, ["g"], dims)
    with pytest.raises(FusionDataError, match="positive"):
        LaplacianSpec.create(z3.data, ["g", "g2"], dims, {"g": -1, "g2": -1})
    with pytest.raises(FusionDataError, match="nu is not symmetric"):
        LaplacianSpec.create(z3.data, ["g", "g2"], dims, {"g": 1, "g2": Fraction(1, 2)})
    ising = category("ising")
    with pytest.raises(FusionDataError, match="does not generate"):
        LaplacianSpec.create(ising.data, ["eps"], ising.F.dims())


def test_is_generating():
    ising = category("ising").data
    assert is_generating(ising, [2])
    assert not is_generating(ising, [1])
