"""Quench dynamics and nearest-neighbour entanglement of the infinite anisotropic XY chain."""
from .correlators import CorrelatorSet, correlator_set, g_correlator, magnetization, s_correlator
from .entanglement import EntanglementResult, negativity, partial_transpose
from .model import ModelParams, Temperature, dispersion, thermal_weight
from .phase_scan import (
    classify_monotonicity,
    evaluate_point,
    field_scan,
    find_critical_fields,
    phase_diagram,
    temp_scan,
    time_scan,
)
from .rdm import single_site_rdm, two_site_rdm, validate_physicality

__version__ = "0.1.0"

__all__ = [
    "ModelParams",
    "Temperature",
    "dispersion",
    "thermal_weight",
    "CorrelatorSet",
    "correlator_set",
    "magnetization",
    "g_correlator",
    "s_correlator",
    "single_site_rdm",
    "two_site_rdm",
    "validate_physicality",
    "EntanglementResult",
    "negativity",
    "partial_transpose",
    "evaluate_point",
    "field_scan",
    "time_scan",
    "temp_scan",
    "find_critical_fields",
    "classify_monotonicity",
    "phase_diagram",
]
