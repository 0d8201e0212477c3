"""Damping-injection tuning for fully actuated port-Hamiltonian mechanical systems."""
from .attraction import DoAEstimate, SamplingConfig, estimate_domain, remainder_field, solve_lyapunov
from .linearization import Linearization, factorize, linearize, saddle_transform
from .model import (ManipulatorParams, MechanicalSystem, closed_loop_field, hamiltonian,
                    linear_mechanical, oscillator, planar_manipulator, power_balance)
from .saddle import (EigenPair, SaddlePointMatrix, SpectrumReport, assemble_saddle,
                     check_real_spectrum, dominant_damping, eigen_pairs, prop2_residuals)
from .simulate import Trajectory, energy_check, integrate, response_metrics
from .tuning import (TuningResult, TuningRule, conservative_gain, gain_for_zeta,
                     predicted_damping, spectral_min_gain)

__version__ = "0.1.0"
