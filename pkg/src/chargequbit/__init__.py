"""Double-dot charge qubits: spectra, one- and two-qubit gates, decoherence rates."""

__version__ = "0.1.0"

from .fields import ConfigurationError, Grid, ScalarField, make_grid  # noqa: E402
from .potentials import CnotGeometry, DoubleWellParams, double_well_potential  # noqa: E402
from .eigensolver import SpectrumResult, dense_oracle, lowest_states  # noqa: E402
from .qubit import characterize, evolve, logical_basis  # noqa: E402
from .cnot import CnotTimings, cnot_schedule, tune_amplitude, verify_cnot  # noqa: E402
from .decoherence import Materials, QuadratureSpec, rate_breakdown  # noqa: E402

__all__ = [
    "CnotGeometry",
    "CnotTimings",
    "ConfigurationError",
    "DoubleWellParams",
    "Grid",
    "Materials",
    "QuadratureSpec",
    "ScalarField",
    "SpectrumResult",
    "characterize",
    "cnot_schedule",
    "dense_oracle",
    "double_well_potential",
    "evolve",
    "logical_basis",
    "lowest_states",
    "make_grid",
    "rate_breakdown",
    "tune_amplitude",
    "verify_cnot",
]
