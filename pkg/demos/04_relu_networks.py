"""ReLU networks as piecewise-linear functions.

A ReLU multilayer perceptron computes a CPWL function, so its HTV and
its number of linear regions are well defined.  In one dimension the
breakpoints propagate exactly through any depth.  In two dimensions a
single hidden layer induces a line arrangement whose cells *are* the
linear regions, which gives an exact mesh; deeper networks are sampled
and triangulated, and the result is flagged approximate.
"""

import numpy as np

from htv import construct, cpwl, oracle
from htv.construct import MlpWeights
from htv.mixed_fields import BoxDomain

print("1-d: the hat function as relu(x+1) - 2 relu(x) + relu(x-1)")
hat = MlpWeights(
    layers=(
        (np.array([[1.0], [1.0], [1.0]]), np.array([1.0, 0.0, -1.0])),
        (np.array([[1.0, -2.0, 1.0]]), np.array([0.0])),
    ),
    input_dim=1,
)
bp, slopes = construct.relu_to_cpwl_1d(hat)
print(f"  breakpoints {bp.tolist()}, slopes {slopes.tolist()}")
print(f"  second-order total variation: {cpwl.tv2_1d(bp, slopes)}")

print("\n1-d: a random depth-3 network, checked against the grid oracle")
rng = np.random.default_rng(21)
widths = [1, 10, 10, 10, 1]
layers = []
for a, b in zip(widths[:-1], widths[1:]):
    layers.append((rng.standard_normal((b, a)), rng.standard_normal(b) * 0.5))
net = MlpWeights(layers=tuple(layers), input_dim=1)
bp, slopes = construct.relu_to_cpwl_1d(net)
tv2 = cpwl.tv2_1d(bp, slopes)
domain = BoxDomain((bp[0] - 0.5,), (bp[-1] + 0.5,))
grid = oracle.sample_function(
    lambda x: construct.mlp_forward(net, x[None])[0], domain, 4096
)
print(f"  {len(bp)} breakpoints, exact TV2 = {tv2:.8f}, "
      f"oracle = {oracle.grid_htv(grid, 1.0):.8f}")

print("\n2-d: a random single-hidden-layer network, exact arrangement mesh")
w0 = rng.standard_normal((6, 2))
b0 = rng.uniform(-0.5, 0.5, 6)
w1 = rng.standard_normal((1, 6))
net2 = MlpWeights(layers=((w0, b0), (w1, rng.standard_normal(1))), input_dim=2)
box = BoxDomain((-1, -1), (1, 1))
mesh = construct.relu_to_cpwl_2d(net2, box)
print(f"  mesh: {mesh.num_simplices} triangles, "
      f"{cpwl.region_count(mesh)} linear regions ({mesh.meta['construction']})")
truth = cpwl.htv(mesh)
est = oracle.grid_htv(oracle.sample_function(mesh, box, 512), 1.0, window=8)
print(f"  HTV exact {truth:.6f} vs oracle {est:.6f}")

print("\n2-d: a depth-2 network falls back to the sampled import")
pyramid_net = MlpWeights(
    layers=(
        (np.array([[1.0, 0], [-1, 0], [0, 1], [0, -1]]), np.zeros(4)),
        (np.array([[-1.0, -1, -1, -1]]), np.array([1.0])),
        (np.array([[1.0]]), np.array([0.0])),
    ),
    input_dim=2,
)
approx = construct.relu_to_cpwl_2d(
    pyramid_net, BoxDomain((-2, -2), (2, 2)), cells=128, method="approximate"
)
print(f"  {approx.meta['construction']} mesh with {approx.num_simplices} triangles; "
      f"HTV = {cpwl.htv(approx):.6f} (truth 16)")
