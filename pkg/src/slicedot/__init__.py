"""Sliced optimal transport on the sphere S^{d-1} and the rotation group SO(3).

Components:

- :mod:`slicedot.manifold` -- geometry primitives (distances, tangent
  projections, exponential maps, uniform sampling, rotation parameterizations).
- :mod:`slicedot.ot1d` -- one-dimensional optimal transport, CDF/quantile
  machinery, the cumulative distribution transform and 1D barycenters.
- :mod:`slicedot.slicing` -- slicing operators, measure pushforwards, and the
  direct quadrature transforms used as oracles.
- :mod:`slicedot.harmonics` -- Legendre polynomials, spherical harmonics,
  Wigner d/D functions, and the SVD-based forward/pseudoinverse transforms.
- :mod:`slicedot.distances` -- Monte Carlo sliced Wasserstein estimators
  (parallel, semicircular, rotation group).
- :mod:`slicedot.barycenters` -- free-support, fixed-support and Radon
  barycenter solvers.
- :mod:`slicedot.datasets` -- von Mises-Fisher sampling and synthetic shapes.
- :mod:`slicedot.cli` -- command line entry point.
"""

from .manifold import (
    Quaternion,
    Rotation,
    TangentVector,
    UnitVector,
    exp_so3,
    exp_sphere,
    geodesic_dist_sphere,
    proj_tangent_so3,
    proj_tangent_sphere,
    quat_to_rotation,
    rotation_angle,
    rotation_axis_angle,
    rotation_euler_zyz,
    sample_uniform_so3,
    sample_uniform_sphere,
)
from .ot1d import (
    CdtProfile,
    CircleMeasure,
    Measure1D,
    barycenter_1d,
    cdt,
    cdt_inverse,
    wasserstein_1d,
    wasserstein_circle,
)
from .slicing import (
    DiscreteMeasure,
    pushforward,
    slice_parallel,
    slice_semicircular,
    slice_so3_angle,
    slice_so3_trace,
    slice_transform_function,
    so3_radon_function,
)
from .distances import SliceBudget, DistanceEstimate, psw, ssw, sosw, sosw_via_s3

__all__ = [
    "Quaternion",
    "Rotation",
    "TangentVector",
    "UnitVector",
    "exp_so3",
    "exp_sphere",
    "geodesic_dist_sphere",
    "proj_tangent_so3",
    "proj_tangent_sphere",
    "quat_to_rotation",
    "rotation_angle",
    "rotation_axis_angle",
    "rotation_euler_zyz",
    "sample_uniform_so3",
    "sample_uniform_sphere",
    "CdtProfile",
    "CircleMeasure",
    "Measure1D",
    "barycenter_1d",
    "cdt",
    "cdt_inverse",
    "wasserstein_1d",
    "wasserstein_circle",
    "DiscreteMeasure",
    "pushforward",
    "slice_parallel",
    "slice_semicircular",
    "slice_so3_angle",
    "slice_so3_trace",
    "slice_transform_function",
    "so3_radon_function",
    "SliceBudget",
    "DistanceEstimate",
    "psw",
    "ssw",
    "sosw",
    "sosw_via_s3",
]

__version__ = "0.1.0"
