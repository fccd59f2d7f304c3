"""Two inductively coupled fluxonium qubits with a stray LC mode.

Energies are in GHz, inductances in nH and capacitances in fF.
"""
from .analysis import (
    TransitionTable,
    coupling_sweep,
    device_metrics,
    drive_coefficients,
    flux_sweep,
    static_zz,
    zx_magnitude,
)
from .coupled import (
    DEVICE_PARAMS,
    LabeledSpectrum,
    SystemParams,
    TruncationConfig,
    build_coupled_h,
    label_states,
    solve_coupled,
    transition_frequency,
    two_qubit_matrix_element,
)
from .fitter import FitResult, Observation, fit, residuals
from .fluxonium import FluxoniumParams, anharmonicity, build_fluxonium_h, eigensolve, solve_fluxonium
from .ramsey import fit_decaying_sinusoid, synthesize_ramsey
from .reduction import (
    DEVICE_CIRCUIT,
    CircuitSpec,
    ReducedParams,
    reduce_closed_form,
    reduce_numeric,
    roundtrip_spectrum_check,
)

__version__ = "0.1.0"
