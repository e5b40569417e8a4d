"""Semiclassical quantization of the magnetic monopole on the two-sphere.

Classical magnetic geodesic flow, invariant tori and their actions,
quantization conditions, WKB quasimodes, and the exact monopole spectrum
with an independent finite-difference check.
"""

__version__ = "0.1.0"

from .errors import (CausticError, ConvergenceError, DomainError, EmptyTorusError, GridResolutionError,
                     MonopoleError, OpenLoopError, OutOfAnnulusError, PoleCrossingError, PoleProximityError,
                     ValidationError)
from .geometry import BundleData, GaugePatch, LoopPath, holonomy, metric_at, potential_at, transition_at
from .symbols import PhasePoint, gamma0_at, h0_at, h1_at, subprincipal_at
from .dynamics import FlowConfig, closure_check, flow_rhs, hamiltonian, i2_at, integrate
from .tori import Branch, InvariantTorus, action_I_closed, action_I_quad, build_torus, complete_integral, p_theta_branch
from .quantization import QuantizedLevel, lambda_hat, make_level, solve_level
from .spectrum import RadialGrid, SpectralLine, lambda_exact, lowest_eigs, multiplicity_exact, numeric_spectrum, radial_matrix
from .canonical import EikonalSpec, SectionGrid, almost_eigenfunction, amplitude_at, eikonal_at, residual_norms

__all__ = [name for name in dir() if not name.startswith("_")]
