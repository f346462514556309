"""contactpath: exact Lie-theoretic and symbolic analysis of contact path geometries."""

from . import engine, expr, flat_model, graded_sp, integrate, kostant, lie_core, squat
from .engine import (
    ODESpec,
    TorsionReport,
    contact_torsion,
    filtration_ranks,
    generating_field,
    load_spec,
    secondary_torsion,
    skew_complement_W,
    spec_from_dict,
    torsion_free_representative,
)
from .integrate import integrate as integrate_spec
from .kostant import h2
from .lie_core import Weight, WeylWord, build_root_system
from .squat import SplitQuaternion

__version__ = "0.1.0"

__all__ = [
    "ODESpec",
    "SplitQuaternion",
    "TorsionReport",
    "Weight",
    "WeylWord",
    "build_root_system",
    "contact_torsion",
    "engine",
    "expr",
    "filtration_ranks",
    "flat_model",
    "generating_field",
    "graded_sp",
    "h2",
    "integrate",
    "integrate_spec",
    "kostant",
    "lie_core",
    "load_spec",
    "secondary_torsion",
    "skew_complement_W",
    "spec_from_dict",
    "squat",
    "torsion_free_representative",
]
