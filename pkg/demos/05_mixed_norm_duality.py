"""The Schatten and mixed-norm machinery underneath the HTV.

The HTV is, by definition, a dual norm: the supremum of the pairing of
the Hessian with matrix-valued test fields of unit sup-Schatten norm.
This demo shows the finite-dimensional story behind that definition:
Holder's inequality for Schatten norms, the witness matrix that turns
it into an equality, and the discrete field norms with their duality
and equivalence relations.
"""

import math

import numpy as np

from htv import matnorm, mixed_fields as mf

rng = np.random.default_rng(3)

print("Holder pairs on a random 3x3 matrix:")
a = rng.standard_normal((3, 3))
b = rng.standard_normal((3, 3))
for p in (1.0, 1.5, 2.0, math.inf):
    q = matnorm.conjugate_order(p)
    pair = matnorm.inner_product(a, b)
    bound = matnorm.schatten_norm(a, p) * matnorm.schatten_norm(b, q)
    print(f"  p={p:<4g} <A,B> = {pair:+.6f} <= {bound:.6f}")

print("\nthe duality witness attains the bound:")
for p in (1.0, 1.5, 2.0, math.inf):
    q = matnorm.conjugate_order(p)
    f = matnorm.duality_witness(a, p)
    print(f"  p={p:<4g} pairing {matnorm.inner_product(a, f):.10f} "
          f"= ||A||_S{p:g} {matnorm.schatten_norm(a, p):.10f}, "
          f"||F||_S{q:g} = {matnorm.schatten_norm(f, q):.10f}")

print("\ndiscrete matrix fields: norms depend on the order of reduction")
domain = mf.BoxDomain((0.0,), (1.0,))
vals = np.stack([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
w = mf.MatrixField(domain, (2,), vals, mf.MEASURE_FIELD)
print(f"  entrywise masses first, then S_inf: {mf.norm_m_sp(w, math.inf)}")
print(f"  pointwise S_inf first, then sum:    {mf.norm_sp_m(w, math.inf)}")

print("\npointwise witnesses saturate the sum norm:")
w = mf.MatrixField(domain, (4,), rng.standard_normal((4, 2, 2)), mf.MEASURE_FIELD)
for p in (1.0, 2.0):
    field = mf.witness_field(w, p)
    print(f"  p={p:g}: pairing {mf.pairing(w, field):.10f} "
          f"vs norm {mf.norm_sp_m(w, p):.10f}")

print("\nequivalence constants between the two sup-type norms:")
for d in (1, 2, 3):
    for q in (1.0, 2.0, math.inf):
        lo, hi = mf.equivalence_constants(d, q)
        print(f"  d={d} q={q:<4g}: {lo:.4f} * sup-Sq <= entrywise-sup-Sq <= {hi:.4f} * sup-Sq")
