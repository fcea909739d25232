"""How the HTV responds to translations, rotations and scalings.

Translating or rotating the domain leaves the HTV unchanged; scaling
the argument by alpha multiplies it by |alpha|^(2-d).  In two dimensions
the exponent vanishes, which makes the HTV a genuinely scale-free
complexity measure there.  On meshes the laws hold to rounding; for
smooth functions they hold within quadrature error once the integration
domain is transformed along with the function.
"""

import numpy as np

from htv import cpwl, fixtures, smooth, transforms
from htv.mixed_fields import BoxDomain
from htv.smooth import QuadratureSpec

rng = np.random.default_rng(0)

print("pyramid (d=2), HTV 16, under random rigid motions and scalings:")
mesh = fixtures.pyramid_2d()
for _ in range(5):
    t = transforms.random_transform(rng, 2)
    measured = cpwl.htv(transforms.apply_to_cpwl(mesh, t))
    print(f"  alpha={t.alpha:+.3f}: predicted factor "
          f"{transforms.predicted_factor(t):.1f}, measured {measured / 16:.12f}")

print("\nhat (d=1) and two-tets (d=3): the exponent 2-d is not zero")
hat = fixtures.hat_1d()
tets = fixtures.two_tets_3d()
for mesh, d in ((hat, 1), (tets, 3)):
    base = cpwl.htv(mesh)
    for alpha in (0.5, 2.0, 3.0):
        t = transforms.DomainTransform(np.eye(d), alpha)
        measured = cpwl.htv(transforms.apply_to_cpwl(mesh, t))
        print(f"  d={d} alpha={alpha}: factor {measured / base:.6f} "
              f"(predicted {transforms.predicted_factor(t):.6f})")

print("\nsmooth case: rotated Gaussian bump (domain co-rotated)")
bump = smooth.gaussian_bump(2, 1.0)
box = BoxDomain((-6, -6), (6, 6))
base, err0 = smooth.htv_quadrature(bump, QuadratureSpec(box, 96), 1.0)
t = transforms.DomainTransform(transforms.rotation(2, 0, 1, 0.7))
rotated = transforms.apply_to_smooth(bump, t)
value, err = smooth.htv_quadrature(
    rotated, QuadratureSpec(transforms.transform_box(box, t), 96), 1.0
)
print(f"  base {base:.8f}, rotated {value:.8f}, difference {abs(value - base):.2e}")
