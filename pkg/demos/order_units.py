"""The unit is an order unit: d(z)^2 1 - b* b is a sum of squares for every b built from z.

Run with:  python3 demos/order_units.py
"""

from tubecone import ConeSupport, SOSMap, builtin, TubeAlgebra, order_unit_certificate
from tubecone.fusion_ring import FusionAlgebraElement

for name, words in (("fib", [(1,), (1, 1)]), ("ising", [(2,), (1,), (2, 2)])):
    cat = builtin(name)
    alg = TubeAlgebra(cat.F)
    sup = ConeSupport(alg)
    L = SOSMap(sup)
    for z in words:
        res = order_unit_certificate(sup, z, cat.data.unit)
        bb = alg.to_fusion(alg.multiply_vectors(alg.star_vector(res.b.vec), res.b.vec))
        residual = L.apply(res.gram) + bb - FusionAlgebraElement({cat.data.unit: res.R})
        word = " x ".join(cat.data.names[a] for a in z)
        print(f"{name}: z = {word:<14} R = {float(res.R):8.4f} = {res.R.to_sympy()!s:<14} "
              f"Lambda(Q) + b*b - R 1 == 0: {residual.is_zero()}")
