"""Electron tunneling driven by bright squeezed vacuum light.

Bohmian trajectories of the field quadrature give classical field
realizations; a complex-time quasiclassical saddle point gives the
tunneling exponent per realization; ensemble averaging over the
quadrature distribution gives the observable yield versus squeezing.
"""

__version__ = "0.1.0"

from .field import (FieldRealization, SqueezingParams, c_coeff, c_r_coeff,
                    e_field, p_trajectory, rho, sample_initial, sigma,
                    x_trajectory)
from .solver import (BarrierSpec, ContourSpec, CosineDrive, ConstantDrive,
                     TunnelSolution, complex_trajectory, exit_residual,
                     exit_trajectory, im_action, initial_guess, solve_saddle,
                     tunnel_probability)
from .ensemble import (QuadratureSpec, ScanResult, e_peak, find_x_peak,
                       gamma_peak, p_total, scan_r, tunnel_scan_table,
                       x_levels)
from .config import RunConfig, load_config

__all__ = [
    "__version__",
    "SqueezingParams", "FieldRealization", "c_coeff", "c_r_coeff", "rho",
    "sigma", "x_trajectory", "p_trajectory", "e_field", "sample_initial",
    "BarrierSpec", "ContourSpec", "TunnelSolution", "CosineDrive",
    "ConstantDrive", "complex_trajectory", "exit_residual", "initial_guess",
    "solve_saddle", "im_action", "tunnel_probability", "exit_trajectory",
    "QuadratureSpec", "ScanResult", "p_total", "find_x_peak", "x_levels",
    "e_peak", "gamma_peak", "scan_r", "tunnel_scan_table",
    "RunConfig", "load_config",
]
