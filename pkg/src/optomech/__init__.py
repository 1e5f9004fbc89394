"""Optomechanical cavity with intracavity parametric gain and a Duffing mirror:
steady states, multistability thresholds, linear stability, cooling and
squeezing observables."""

from .criticality import (CriticalIntermediate, CriticalPointError, CriticalValues,
                          MultiCriticalError, MultistabilityResult,
                          critical_intermediate, critical_values,
                          critical_values_exact, critical_values_harmonic,
                          critical_values_perturbative, descartes_positive_bound,
                          multistability_test)
from .fluctuations import (ApproxVariances, FluctuationReport, TransferFunctions,
                           UnstableSystemError, approx_variances,
                           bistability_parameter, covariance_lyapunov,
                           covariance_lyapunov_qp, covariance_spectral,
                           diffusion_matrix, fluctuation_report, neff_series,
                           neff_series_and_optimum, report, transfer_functions)
from .parameters import (CONSTANTS, DerivedParams, NormalizedParams, ParameterError,
                         PhysicalConstants, SystemParams, denormalize, derive_params,
                         normalize)
from .presets import BASES, PRESET_NAMES, figure_preset, preset_fingerprint
from .stability import (FixedPointError, OptimalDetuningResult, StabilityVerdict,
                        TransformedFrame, build_drift, frame_from_values,
                        routh_hurwitz, routh_hurwitz_terms, solve_optimal_detuning,
                        synthetic_frame, transform_frame)
from .steady_state import (LinearizationValidity, MeanFieldTrajectory,
                           SteadyStateBranch, branch_drive_phase,
                           integrate_mean_field, linearization_validity,
                           match_attractor, quintic_coefficients, solve_branches)
from .sweep import (COLUMNS, SweepSpec, apply_axis, params_from_config, run_sweep,
                    write_csv, write_json)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
