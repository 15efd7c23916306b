"""From F-symbols to a verified spectral-gap certificate for the Fibonacci category.

Run with:  python3 demos/fibonacci_tour.py
"""

from fractions import Fraction

from tubecone import (ConeSupport, LaplacianSpec, SOSMap, TubeAlgebra, admissible_spectrum, build_gns,
                      build_laplacian, builtin, certify, pentagon_check, tube_axiom_report, verify_certificate)

cat = builtin("fib")
print(f"simples {cat.data.names}, F-symbols live in the exact field {cat.field_tag}")
print(f"pentagon residual (exact arithmetic): {pentagon_check(cat.F)}")

alg = TubeAlgebra(cat.F)
print(f"tube algebra: dimension {alg.dim}")
for line in tube_axiom_report(alg.to_float()).lines():
    print("  " + line)

# Delta = 1 - tau / phi
spec = LaplacianSpec.create(cat.data, ["tau"], alg.dims)
delta = build_laplacian(spec, cat.data)
print(f"Laplacian coefficients: {[float(delta.coeffs[w]) for w in range(cat.data.rank)]}")

# brute force: the spectrum of Delta in admissible representations
report = admissible_spectrum(build_gns(alg), delta)
print("oracle " + "; ".join(report.lines()))

# certificate: Delta^2 - k Delta + eps 1 is a sum of squares in the tube cone
res = certify(cat, spec, delta, Fraction(1, 50), sosmap=SOSMap(ConeSupport(alg)))
for m in res.messages:
    print("  " + m)
print(f"certified k = {res.k} = {float(res.k):.6f}; gap + eps/gap = {report.gap + 0.02 / report.gap:.6f}")

verdict = verify_certificate(res.certificate)
print("independent exact re-verification: " + verdict.summary().replace("\n", "\n  "))
