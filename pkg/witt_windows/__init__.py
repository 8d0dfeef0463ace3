"""witt-windows package."""

from .config import JobConfig
from .crystalline import (
    crystalline_lift,
    faithfulness_probe,
    hodge_deform,
    kappa_ladder_step,
    lift_hom,
    reduce_to_squarezero,
    unique_iso_solver,
)
from .frames import build_breuil_frame, build_c_frame, build_dieudonne_frame, check_frame_axioms
from .morphisms import kappa_morphism, projection_morphism
from .parser import parse_expression
from .ring import RingSpec, TruncatedSeries
from .windows import Window, base_change, window_from_normal_decomposition
from .witt import WittRing, WittVector


__all__ = [
    "JobConfig",
    "RingSpec",
    "TruncatedSeries",
    "WittRing",
    "WittVector",
    "Window",
    "base_change",
    "build_breuil_frame",
    "build_c_frame",
    "build_dieudonne_frame",
    "check_frame_axioms",
    "crystalline_lift",
    "faithfulness_probe",
    "hodge_deform",
    "kappa_ladder_step",
    "kappa_morphism",
    "lift_hom",
    "parse_expression",
    "projection_morphism",
    "reduce_to_squarezero",
    "unique_iso_solver",
    "window_from_normal_decomposition",
]
