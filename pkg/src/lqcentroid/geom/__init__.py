"""Low-dimensional verifiers for the supporting geometry."""
from .ballbody import ball_body_gauge, ball_body_volume, half_slice_moment, prop21_identity_check
from .covering import CoverageError, covering_number, cube_net, hull_cover_net, segment_net, volumetric_check
from .integrals import polytope_power_integral
from .quermass import QuermassError, kubota, quermassintegrals
from .report import inputs_hash, record
from .width import SupportOracle, kq_mean_width, mean_width
from .zq import ball_zq_support, kq_body, lyz_check, projection_volume_check, zq_polytope

__all__ = [
    "SupportOracle",
    "mean_width",
    "kq_mean_width",
    "zq_polytope",
    "kq_body",
    "ball_zq_support",
    "lyz_check",
    "projection_volume_check",
    "half_slice_moment",
    "ball_body_gauge",
    "ball_body_volume",
    "prop21_identity_check",
    "polytope_power_integral",
    "covering_number",
    "volumetric_check",
    "segment_net",
    "cube_net",
    "hull_cover_net",
    "CoverageError",
    "quermassintegrals",
    "kubota",
    "QuermassError",
    "inputs_hash",
    "record",
]
