"""Sweep k across the spectral gap: below it a certificate exists, above it a state refutes it.

Run with:  python3 demos/gap_threshold.py
"""

from fractions import Fraction

from tubecone import ConeSupport, LaplacianSpec, SOSMap, TubeAlgebra, build_laplacian, builtin, certify

cat = builtin("fib")
alg = TubeAlgebra(cat.F)
spec = LaplacianSpec.create(cat.data, ["tau"], alg.dims)
delta = build_laplacian(spec, cat.data)
sosmap = SOSMap(ConeSupport(alg))
eps = Fraction(1, 1000)
gap = 1 + 1 / ((1 + 5 ** 0.5) / 2) ** 2
print(f"Fibonacci, S = {{tau}}, eps = {eps}; admissible gap 1 + phi^-2 = {gap:.6f}")

for k in (Fraction(1), Fraction(5, 4), Fraction(11, 8), Fraction(7, 5), Fraction(3, 2), Fraction(2)):
    res = certify(cat, spec, delta, eps, k=k, sosmap=sosmap)
    if res.ok:
        print(f"k = {str(k):>5}: certified, eta = {float(res.certificate.eta):.1e}")
    elif res.witness is not None:
        w = res.witness
        print(f"k = {str(k):>5}: refuted by phi(tau) = {w.values['tau'].real:+.6f}, "
              f"phi(Delta^2 - k Delta) = {w.value:+.6f}")
    else:
        print(f"k = {str(k):>5}: undecided ({res.messages[-1]})")
