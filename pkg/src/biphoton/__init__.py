"""Simulator and design optimizer for single-mode broadband biphoton sources.

Type-I SPDC frequency-angular spectra, fiber coupling through a diffraction
grating, integral bandwidth and second-order correlation time.
"""
from ._kernels import BACKEND
from .collection import (
    CollectionModes,
    FiberTrainSpec,
    NumericalError,
    ParaxialWarning,
    coincidence_amplitude,
    coincidence_rate,
    collection_waist,
    fiber_mode_waist,
    matched_modes,
    select_gamma_train,
)
from .config import ConfigError, RunConfig, default_config, load_config, parse_config
from .designer import SweepResult, optimize_gamma, rate_vs_waist, waist_sweep
from .grating import (
    GratingSpec,
    angle_for_frequency,
    efficiency,
    frequency_for_angle,
    pair_efficiency,
    solve_theta0,
)
from .optics import (
    CrystalSpec,
    DomainError,
    PhaseMatchingError,
    Wavelength,
    bbo_crystal,
    external_angle,
    internal_angle,
    refractive_index_extraordinary,
    refractive_index_ordinary,
    solve_cut_angle,
)
from .phasematching import (
    PumpSpec,
    SpectralAngularGrid,
    branch_detuning_span,
    conjugate_angle,
    intensity_grid,
    longitudinal_mismatch,
)
from .spectra import (
    CorrelationFunction,
    Spectrum,
    bandwidth,
    correlation_function,
    correlation_time,
    initial_spectrum,
    transformed_spectrum,
)

__version__ = "0.1.0"
