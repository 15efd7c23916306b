from fractions import Fraction

import numpy as np
import pytest

from tubecone.cone import ConeSupport, SOSMap, verify_certificate
from tubecone.sdp import (SDPError, SolverOptions, SupportTooSmall, build_margin_problem, build_problem,
                          build_refutation_problem, certify, extract_refutation, round_to_exact,
                          simplest_rational_between, solve)

from _shared import GAP_S, NAMES, PHI, algebra, category, laplacian

GAPS = {"vec_z2": 2.0, "vec_z3": 1.5, "fib": 1 + PHI ** -2, "ising": 1.0}


def sosmap(name, radius=None):
    alg = algebra(name)
    if radius is None:
        return SOSMap(ConeSupport(alg))
    spec, _ = laplacian(name, GAP_S[name])
    return SOSMap(ConeSupport.ball(alg, spec.S, radius))


def cvxopt_value(prob):
    """Independent solve of the dual: minimize phi.h s.t. phi.g = 1, sum phi_c A_c >= 0."""
    from cvxopt import matrix, solvers

    solvers.options["show_progress"] = False
    cols = np.concatenate([np.concatenate([A.reshape(prob.m, -1) for A in prob.A], axis=1),
                           prob.g[:, None], prob.h[:, None]], axis=1)
    groups = []
    for c in range(prob.m):
        for grp in groups:
            if np.allclose(cols[grp[0]], cols[c], atol=1e-14):
                grp.append(c)
                break
        else:
            groups.append([c])
    keep = [grp[0] for grp in groups]
    m = len(keep)
    Gs = [matrix(np.ascontiguousarray(-A[keep].reshape(m, -1).T)) for A in prob.A]
    hs = [matrix(0.0, (A.shape[1], A.shape[1])) for A in prob.A]
    sol = solvers.sdp(matrix(np.ascontiguousarray(prob.h[keep])), Gs=Gs, hs=hs,
                      A=matrix(np.ascontiguousarray(prob.g[keep].reshape(1, m))), b=matrix([1.0]))
    assert sol["status"] == "optimal"
    return sol["primal objective"]


def test_problem_shapes():
    _, d = laplacian("vec_z2", ["g"])
    p = build_problem(sosmap("vec_z2"), d, 0)
    assert p.m == 2 and p.sizes == [2] and p.blocks == [0]
    _, d = laplacian("fib", ["tau"])
    p = build_problem(sosmap("fib"), d, 0)
    assert p.m == 2 and p.sizes == [2, 1]


def test_eps_only_moves_unit_row():
    _, d = laplacian("fib", ["tau"])
    a = build_problem(sosmap("fib"), d, 0)
    b = build_problem(sosmap("fib"), d, 1e-3)
    assert all(np.array_equal(x, y) for x, y in zip(a.A, b.A))
    assert np.array_equal(a.g, b.g)
    diff = b.h - a.h
    assert diff[a.rows.index(0)] == pytest.approx(1e-3)
    assert np.count_nonzero(diff) == 1


def test_support_too_small_names_label():
    _, d = laplacian("fib", ["tau"])
    with pytest.raises(SupportTooSmall, match="tau"):
        build_problem(sosmap("fib", radius=0), d, 0)


def test_dimension_limit():
    _, d = laplacian("fib", ["tau"])
    with pytest.raises(SDPError):
        build_problem(sosmap("fib"), d, 0, SolverOptions(max_dim=2))


def test_dump_text_lists_every_block():
    _, d = laplacian("ising", ["sigma"])
    text = build_problem(sosmap("ising"), d, Fraction(1, 100)).dump_text()
    assert text.endswith("\n")
    assert "k-search" in text


def test_solve_vec_z2_near_gap():
    _, d = laplacian("vec_z2", ["g"])
    sol = solve(build_problem(sosmap("vec_z2"), d, 1e-4))
    assert abs(sol.u - 2) < 1e-3


def test_solve_fibonacci_near_gap():
    _, d = laplacian("fib", ["tau"])
    sol = solve(build_problem(sosmap("fib"), d, 1e-4))
    assert abs(sol.u - (1 + PHI ** -2)) < 1e-2


@pytest.mark.parametrize("name", NAMES)
def test_optimum_matches_independent_solver(name):
    _, d = laplacian(name, GAP_S[name])
    prob = build_problem(sosmap(name), d, 1e-4)
    ours = solve(prob)
    assert ours.status == "optimal"
    assert abs(ours.u - cvxopt_value(prob)) < 1e-6
    assert ours.primal_residual < 1e-8


@pytest.mark.parametrize("name", NAMES)
def test_k_search_bounded_by_gap(name):
    _, d = laplacian(name, GAP_S[name])
    eps = 1e-4
    sol = solve(build_problem(sosmap(name), d, eps))
    g = GAPS[name]
    assert sol.u <= g + eps / g + 1e-8


def test_refutation_dual_is_negative_above_gap():
    _, d = laplacian("fib", ["tau"])
    sol = solve(build_refutation_problem(sosmap("fib"), d, 2))
    assert sol.u < 0
    assert abs(sol.gap) < 1e-7


def test_extract_refutation_sign_character():
    _, d = laplacian("vec_z2", ["g"])
    prob = build_refutation_problem(sosmap("vec_z2"), d, 2.5)
    w = extract_refutation(prob, solve(prob), d, 2.5)
    assert abs(w.values["1"] - 1) < 1e-12
    assert abs(w.values["g"] + 1) < 1e-6
    assert abs(w.value + 1) < 1e-6
    assert w.margin >= -1e-8


def test_extract_refutation_fibonacci_character():
    _, d = laplacian("fib", ["tau"])
    prob = build_refutation_problem(sosmap("fib"), d, 1.5)
    w = extract_refutation(prob, solve(prob), d, 1.5)
    assert abs(w.values["tau"] + 1 / PHI) < 1e-6
    assert w.value < 0


@pytest.mark.parametrize("name", NAMES)
def test_no_refutation_at_zero(name):
    _, d = laplacian(name, GAP_S[name])
    sol = solve(build_refutation_problem(sosmap(name), d, 0))
    assert sol.u >= -1e-8


def test_extract_refutation_needs_refutation_problem():
    _, d = laplacian("fib", ["tau"])
    prob = build_problem(sosmap("fib"), d, 0)
    with pytest.raises(SDPError):
        extract_refutation(prob, solve(prob), d, 2)


def test_margin_problem_sign():
    _, d = laplacian("fib", ["tau"])
    below = solve(build_margin_problem(sosmap("fib"), d, Fraction(5, 4), Fraction(1, 100)))
    above = solve(build_margin_problem(sosmap("fib"), d, Fraction(3, 2), Fraction(1, 100)))
    assert below.u > 0 > above.u


def test_simplest_rational_between():
    assert simplest_rational_between(0.3, 0.4) == Fraction(1, 3)
    assert simplest_rational_between(1.99, 2.01) == 2
    q = simplest_rational_between(1.3819, 1.38196)
    assert 1.3819 <= q <= 1.38196


def test_round_z2_at_three_halves_is_exact():
    cat = category("vec_z2")
    spec, d = laplacian("vec_z2", ["g"])
    res = certify(cat, spec, d, Fraction(1, 100), k=Fraction(3, 2))
    assert res.ok
    assert res.certificate.eta == 0


def test_round_fibonacci_eleven_eighths():
    cat = category("fib")
    spec, d = laplacian("fib", ["tau"])
    res = certify(cat, spec, d, Fraction(1, 50), k=Fraction(11, 8))
    assert res.ok
    assert res.certificate.eta < Fraction(1, 200)
    assert verify_certificate(res.certificate).accepted


def test_corrupted_gram_entry_rejected():
    cat = category("fib")
    spec, d = laplacian("fib", ["tau"])
    cert = certify(cat, spec, d, Fraction(1, 50), k=Fraction(11, 8)).certificate
    cert.gram["1"][0][0] = "1/3"
    assert not verify_certificate(cert).accepted


def test_round_to_exact_needs_exact_algebra():
    spec, d = laplacian("fib", ["tau"])
    sm = SOSMap(ConeSupport(algebra("fib").to_float()))
    sol = solve(build_margin_problem(sm, d, Fraction(5, 4), Fraction(1, 100)))
    with pytest.raises(Exception, match="exact"):
        round_to_exact(sol, sm, d, spec, Fraction(5, 4), Fraction(1, 100), Fraction(1, 100), category("fib"))


@pytest.mark.parametrize("name", NAMES)
def test_certify_all_builtins(name):
    cat = category(name)
    spec, d = laplacian(name, GAP_S[name])
    res = certify(cat, spec, d, Fraction(1, 100))
    assert res.ok, res.messages
    g = GAPS[name]
    assert float(res.k) <= g + 0.01 / g
    assert float(res.k) >= g - 0.01
    assert res.certificate.eps_proved <= Fraction(1, 100)


def test_certify_fixed_k_above_gap_returns_witness():
    cat = category("fib")
    spec, d = laplacian("fib", ["tau"])
    res = certify(cat, spec, d, Fraction(1, 50), k=Fraction(3, 2))
    assert not res.ok
    assert res.witness is not None and res.witness.value < 0


def test_certificates_are_reproducible():
    cat = category("ising")
    spec, d = laplacian("ising", ["sigma"])
    a = certify(cat, spec, d, Fraction(1, 100), options=SolverOptions(tol=1e-12, seed=4)).certificate.dumps()
    b = certify(cat, spec, d, Fraction(1, 100), options=SolverOptions(tol=1e-12, seed=4)).certificate.dumps()
    assert a == b


def test_witness_json(tmp_path):
    _, d = laplacian("fib", ["tau"])
    prob = build_refutation_problem(sosmap("fib"), d, 2)
    w = extract_refutation(prob, solve(prob), d, 2)
    path = tmp_path / "w.json"
    w.save(path)
    import json
    obj = json.loads(path.read_text())
    assert obj["kind"] == "annular state witness"
    assert obj["phi"]["1"] == 1.0


@pytest.mark.parametrize("name", ["vec_z2", "fib"])
def test_bisection_k_search_agrees_with_single_sdp(name):
    cat = category(name)
    spec, d = laplacian(name, GAP_S[name])
    direct = certify(cat, spec, d, Fraction(1, 100))
    bis = certify(cat, spec, d, Fraction(1, 100), options=SolverOptions(tol=1e-12, bisect=True))
    assert direct.ok and bis.ok
    assert abs(direct.k_float - bis.k_float) < 1e-6
