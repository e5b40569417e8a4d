"""Symbols of the h-differential operator ``H^h_U`` on the sphere.

In a gauge patch ``U`` with potential ``A = A_phi dphi`` the operator is
``H0(x, h D) + h H1(x, h D)`` with ``D = -i d/dx``, where::

    H0 = (p_theta - A_theta)^2 + (p_phi - A_phi)^2 / sin^2(theta)
    H1 = (1/sqrt|g|) sum_j (1/i) d_j [ sqrt|g| g^{jl} (p_l - A_l) ]

Momenta here are canonical momenta of the patch; ``f_U`` converts them to the
kinetic momenta used by the magnetic geodesic flow.  All derivatives are in
closed form; finite-difference versions live in :mod:`monopole_wkb.oracles`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, ValidationError
from .geometry import EPS_POLE, BundleData, GaugePatch, check_theta, potential_at


@dataclass(frozen=True)
class PhasePoint:
    """Point ``(theta, phi, p_theta, p_phi)`` of ``T*S^2`` in spherical coordinates."""

    theta: float
    phi: float
    p_theta: float
    p_phi: float

    def __post_init__(self):
        if not (0.0 < self.theta < math.pi):
            raise DomainError(f"theta={self.theta!r} must lie strictly inside (0, pi)")

    def as_array(self) -> np.ndarray:
        return np.array([self.theta, self.phi, self.p_theta, self.p_phi], dtype=float)

    @classmethod
    def from_array(cls, y) -> "PhasePoint":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]))


class Direction(enum.Enum):
    FORWARD = "forward"
    INVERSE = "inverse"


def _patch_potential(pt: PhasePoint, patch, bundle: BundleData, eps_pole: float) -> float:
    check_theta(pt.theta, eps_pole)
    return float(potential_at(GaugePatch.parse(patch), bundle, pt.theta))


def h0_at(pt: PhasePoint, patch: GaugePatch, bundle: BundleData, eps_pole: float = EPS_POLE) -> float:
    """Principal symbol ``|p - A_U(x)|^2`` in the inverse metric."""
    a_phi = _patch_potential(pt, patch, bundle, eps_pole)
    s = math.sin(pt.theta)
    return pt.p_theta ** 2 + (pt.p_phi - a_phi) ** 2 / (s * s)


def h0_p_gradient(pt: PhasePoint, patch: GaugePatch, bundle: BundleData,
                  eps_pole: float = EPS_POLE) -> tuple[float, float]:
    """``(dH0/dp_theta, dH0/dp_phi)``."""
    a_phi = _patch_potential(pt, patch, bundle, eps_pole)
    s = math.sin(pt.theta)
    return 2.0 * pt.p_theta, 2.0 * (pt.p_phi - a_phi) / (s * s)


def h1_at(pt: PhasePoint, patch: GaugePatch, bundle: BundleData, eps_pole: float = EPS_POLE) -> complex:
    """First-order symbol ``H1``.

    For the round metric only the ``theta`` term survives: ``A`` and the
    metric do not depend on ``phi`` and ``A_theta = 0``, so
    ``H1 = -i cot(theta) p_theta``.
    """
    _patch_potential(pt, patch, bundle, eps_pole)
    theta_term = math.cos(pt.theta) / math.sin(pt.theta) * pt.p_theta
    phi_term = 0.0
    return complex(0.0, -(theta_term + phi_term))


def mixed_trace_h0(pt: PhasePoint, patch: GaugePatch, bundle: BundleData,
                   eps_pole: float = EPS_POLE) -> float:
    """``sum_j d^2 H0 / dx_j dp_j``; zero on the sphere (``dH0/dp_theta = 2 p_theta``,
    ``dH0/dp_phi`` has no ``phi`` dependence)."""
    _patch_potential(pt, patch, bundle, eps_pole)
    return 0.0


def subprincipal_at(pt: PhasePoint, patch: GaugePatch, bundle: BundleData,
                    eps_pole: float = EPS_POLE) -> complex:
    """Subprincipal symbol ``H1 - (1/2i) sum_j d^2 H0 / dx_j dp_j``."""
    return h1_at(pt, patch, bundle, eps_pole) + 0.5j * mixed_trace_h0(pt, patch, bundle, eps_pole)


def x_h0_log_det(pt: PhasePoint, patch: GaugePatch, bundle: BundleData,
                 eps_pole: float = EPS_POLE) -> float:
    """``X_{H0}(ln|g|)`` with ``|g| = sin^2(theta)``."""
    dp_theta, _ = h0_p_gradient(pt, patch, bundle, eps_pole)
    return dp_theta * 2.0 * math.cos(pt.theta) / math.sin(pt.theta)


def gamma0_at(pt: PhasePoint, patch: GaugePatch, bundle: BundleData,
              eps_pole: float = EPS_POLE) -> complex:
    """Transport coefficient ``i sigma_sub - X_{H0}(ln|g|) / 4``; vanishes identically.

    ``i sigma_sub`` is the real quantity
    ``(1/sqrt|g|) sum d_j[sqrt|g|] g^{jl} (p_l - A_l)``.
    """
    return 1j * subprincipal_at(pt, patch, bundle, eps_pole) - 0.25 * x_h0_log_det(pt, patch, bundle, eps_pole)


def f_U(pt: PhasePoint, patch: GaugePatch, bundle: BundleData,
        direction: Direction | str = Direction.FORWARD, eps_pole: float = EPS_POLE) -> PhasePoint:
    """Gauge symplectomorphism ``(x, p) -> (x, p - A_U(x))`` (``inverse`` adds ``A_U``).

    ``f_U`` pulls the twisted form back to the canonical one.
    """
    direction = validate_direction(direction)
    a_phi = _patch_potential(pt, patch, bundle, eps_pole)
    sign = -1.0 if direction is Direction.FORWARD else 1.0
    return replace(pt, p_phi=pt.p_phi + sign * a_phi)


def change_gauge(pt: PhasePoint, source: GaugePatch, target: GaugePatch, bundle: BundleData,
                 eps_pole: float = EPS_POLE) -> PhasePoint:
    """Re-express canonical momenta of ``source`` in the ``target`` gauge (same kinetic momentum)."""
    kinetic = f_U(pt, source, bundle, Direction.FORWARD, eps_pole)
    return f_U(kinetic, target, bundle, Direction.INVERSE, eps_pole)


def canonical_form(u, v) -> float:
    """``Omega_0 = dp_theta ^ dtheta + dp_phi ^ dphi`` on tangent vectors ``(dtheta, dphi, dp_theta, dp_phi)``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(u[2] * v[0] - u[0] * v[2] + u[3] * v[1] - u[1] * v[3])


def twisted_form(theta: float, bundle: BundleData, u, v) -> float:
    """``Omega = Omega_0 + F`` with ``F = B_eff sin(theta) dtheta ^ dphi``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    f = bundle.B_eff * math.sin(theta)
    return canonical_form(u, v) + f * float(u[0] * v[1] - u[1] * v[0])


def validate_direction(value) -> Direction:
    try:
        return Direction(value)
    except ValueError:
        raise ValidationError(f"direction must be 'forward' or 'inverse', got {value!r}") from None
