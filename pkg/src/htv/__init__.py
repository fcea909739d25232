"""Hessian-Schatten total variation (HTV) of multivariate functions.

The HTV seminorm measures the total second-order variation of a function
f: R^d -> R as the total-variation norm of the pointwise Schatten-p norm
of its (generalized) Hessian.  The package computes it three ways:

- exactly, for continuous piecewise-linear functions on simplicial
  meshes, as a sum of gradient-jump magnitudes weighted by facet
  surface measure (:mod:`htv.cpwl`);
- by quadrature of the pointwise Hessian Schatten norm, for twice
  differentiable functions (:mod:`htv.smooth`);
- by an independent finite-difference grid estimator used to
  cross-validate the other two (:mod:`htv.oracle`).

Supporting machinery: Schatten norms and duality witnesses
(:mod:`htv.matnorm`), discrete matrix-field mixed norms
(:mod:`htv.mixed_fields`), Dirac-fence calculus (:mod:`htv.fence`),
domain transforms with their predicted HTV factors
(:mod:`htv.transforms`), mesh file I/O (:mod:`htv.mesh_io`), ReLU
network import (:mod:`htv.relu`), and the ``htv`` command line
(:mod:`htv.cli`).
"""

from .construct import (
    MlpWeights,
    delaunay_cpwl_2d,
    mesh_from_relu_1d,
    mlp_forward,
    relu_to_cpwl_1d,
    relu_to_cpwl_2d,
)
from .cpwl import (
    SimplicialCpwl,
    adjacency,
    fit_affine_pieces,
    gradient_at,
    hessian_fences,
    htv,
    refine_barycentric,
    region_count,
    tv2_1d,
)
from .fence import DiracFence, fence_norm, fences_total_norm, leb_polytope
from .matnorm import (
    conjugate_order,
    duality_witness,
    inner_product,
    schatten_norm,
    singular_values,
)
from .mesh_io import read_mesh, read_mlp_weights, write_mesh, write_mlp_weights
from .mixed_fields import BoxDomain, MatrixField
from .oracle import GridEvaluation, convergence_study, grid_htv, sample_function
from .smooth import (
    QuadratureSpec,
    SmoothFn,
    gaussian_bump,
    hessian_fd,
    htv_quadrature,
    quadratic_bowl,
    rbf_mixture,
    sweep_rbf_width,
)
from .transforms import DomainTransform, apply_to_cpwl, apply_to_smooth, predicted_factor

__version__ = "0.1.0"

__all__ = [
    "BoxDomain",
    "DiracFence",
    "DomainTransform",
    "GridEvaluation",
    "MatrixField",
    "MlpWeights",
    "QuadratureSpec",
    "SimplicialCpwl",
    "SmoothFn",
    "adjacency",
    "apply_to_cpwl",
    "apply_to_smooth",
    "conjugate_order",
    "convergence_study",
    "delaunay_cpwl_2d",
    "duality_witness",
    "fence_norm",
    "fences_total_norm",
    "fit_affine_pieces",
    "gaussian_bump",
    "gradient_at",
    "grid_htv",
    "hessian_fd",
    "hessian_fences",
    "htv",
    "htv_quadrature",
    "inner_product",
    "leb_polytope",
    "mesh_from_relu_1d",
    "mlp_forward",
    "predicted_factor",
    "quadratic_bowl",
    "rbf_mixture",
    "read_mesh",
    "read_mlp_weights",
    "refine_barycentric",
    "region_count",
    "relu_to_cpwl_1d",
    "relu_to_cpwl_2d",
    "sample_function",
    "schatten_norm",
    "singular_values",
    "sweep_rbf_width",
    "tv2_1d",
    "write_mesh",
    "write_mlp_weights",
    "__version__",
]
