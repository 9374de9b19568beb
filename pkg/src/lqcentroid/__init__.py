"""Almost-subgaussian directions of convex bodies via L_q-centroid bodies.

Modules
-------
bodies      convex bodies with support, membership and gauge oracles
sampler     uniform and log-concave sampling with reproducible seeds
moments     isotropic position, directional moments and Orlicz norms
subgauss    the hull body T, sphere search and tail certification
geom        low-dimensional verifiers (widths, volumes, coverings)
runner      batch runs writing JSON/CSV artifacts
acceptance  the fast and full verification suites
"""
__version__ = "0.1.0"

from .bodies import (
    Ball,
    ConvexBody,
    CrossPolytope,
    Cube,
    HPolytope,
    LinearImage,
    LpBall,
    Simplex,
    SubspaceBasis,
    VPolytope,
    body_from_spec,
    body_to_spec,
    normalized,
)
from .moments import (
    directional_moment,
    isotropic_constant,
    isotropize,
    moment_profile,
    orlicz_norm,
    psi1_borell_report,
    psi2_constant,
)
from .sampler import LogConcaveSpec, SampleCloud, sample_logconcave, sample_uniform
from .subgauss import SearchConfig, find_direction, moment_growth_check, t_body, t_support, tail_profile

__all__ = [
    "__version__",
    "ConvexBody",
    "Ball",
    "Cube",
    "CrossPolytope",
    "LpBall",
    "HPolytope",
    "VPolytope",
    "Simplex",
    "LinearImage",
    "SubspaceBasis",
    "body_from_spec",
    "body_to_spec",
    "normalized",
    "SampleCloud",
    "LogConcaveSpec",
    "sample_uniform",
    "sample_logconcave",
    "isotropize",
    "isotropic_constant",
    "directional_moment",
    "moment_profile",
    "orlicz_norm",
    "psi2_constant",
    "psi1_borell_report",
    "SearchConfig",
    "t_body",
    "t_support",
    "find_direction",
    "moment_growth_check",
    "tail_profile",
]
