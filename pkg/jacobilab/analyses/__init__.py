"""
Analyses of algebraic curvature tensors.

Each module exposes plain functions over an [`AlgebraicCurvatureTensor`][jacobilab.tensors.AlgebraicCurvatureTensor] and returns frozen report models that serialize to JSON.
"""

from .admissibility import DimensionScreen, MultiplicityPattern, dimension_screen, rho
from .factorizer import FactorizationReport, SkewStructure, classify_two_root_simple
from .probes import ProbeReport, ViolationRecord, probe_report
from .spectral import AnalysisReport, SpectralProfile, spectral_profile

__all__: list[str] = [
    "AnalysisReport",
    "DimensionScreen",
    "FactorizationReport",
    "MultiplicityPattern",
    "ProbeReport",
    "SkewStructure",
    "SpectralProfile",
    "ViolationRecord",
    "classify_two_root_simple",
    "dimension_screen",
    "probe_report",
    "rho",
    "spectral_profile",
]
