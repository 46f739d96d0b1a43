"""Finite laboratory for the local structure of moduli of central representations of surface groups."""

from .errors import (BranchAmbiguity, ConfigError, DegenerateSigma, Infeasible, ModuliLabError,
                     NoConvergence, NotACocycle, NotCentral, NotInChart, NotInSliceVariety, SchemaError)
from .hodge import KaehlerHodgePackage, build_package
from .kuranishi import KuranishiChart, build_chart
from .lie import LieContext, available_groups, lie_context, register_group
from .reps import find_central_rep, newton_polish
from .surface import CentralRep, SurfacePresentation, TwistedComplex, build_complex, relator_eval, stabilizer_group

__version__ = "0.1.0"

__all__ = [
    "BranchAmbiguity", "CentralRep", "ConfigError", "DegenerateSigma", "Infeasible", "KaehlerHodgePackage",
    "KuranishiChart", "LieContext", "ModuliLabError", "NoConvergence", "NotACocycle", "NotCentral",
    "NotInChart", "NotInSliceVariety", "SchemaError", "SurfacePresentation", "TwistedComplex",
    "available_groups", "build_chart", "build_complex", "build_package", "find_central_rep",
    "lie_context", "newton_polish", "register_group", "relator_eval", "stabilizer_group",
]
