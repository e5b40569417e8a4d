"""Invariant Lagrangian tori ``Lambda(E, P)`` of the magnetic geodesic flow.

``Lambda(E, P) = {H = E, p_phi - B cos(theta) = P}``.  With ``z = cos(theta)``
the momentum on the torus is ``p_theta^2 = R(z) / sin^2(theta)`` where
``R(z) = a1 + b1 z + c1 z^2``, ``a1 = E - P^2``, ``b1 = -2 B P``,
``c1 = -(E + B^2)``.  The roots ``z1 <= z2`` of ``R`` give the caustic circles
``theta1 = arccos z1 >= theta2 = arccos z2``, and the torus projects onto the
annulus ``theta2 <= theta <= theta1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import quad

from .errors import CausticError, ConvergenceError, EmptyTorusError, OutOfAnnulusError, ValidationError

EPS_CAUSTIC = 1e-6
ANNULUS_TOL = 1e-12


class Branch(enum.Enum):
    PLUS = "plus"
    MINUS = "minus"

    @property
    def sign(self) -> float:
        return 1.0 if self is Branch.PLUS else -1.0

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, cls):
            return value
        key = {"+": "plus", "-": "minus"}.get(str(value), str(value).lower())
        try:
            return cls(key)
        except ValueError:
            raise ValidationError(f"branch must be 'plus' or 'minus', got {value!r}") from None


@dataclass(frozen=True)
class InvariantTorus:
    E: float
    P: float
    B: float
    a1: float
    b1: float
    c1: float
    Delta1: float
    z1: float
    z2: float
    theta1: float
    theta2: float

    @property
    def width(self) -> float:
        return self.theta1 - self.theta2

    def R(self, z):
        """``R(z)`` in factored form ``(E + B^2)(z - z1)(z2 - z)``, accurate near the roots."""
        return (self.E + self.B ** 2) * (z - self.z1) * (self.z2 - z)

    def summary(self) -> dict:
        out = {k: v for k, v in asdict(self).items() if k in ("E", "P", "B", "Delta1", "z1", "z2", "theta1", "theta2")}
        out["J"] = complete_integral(self)
        return out


@dataclass(frozen=True)
class CausticCycle:
    which: str
    theta: float
    p_phi_on_cycle: float


def build_torus(E: float, P: float, B: float) -> InvariantTorus:
    """Derived data of ``Lambda(E, P)``; raises :class:`EmptyTorusError` when ``P^2 >= E + B^2``."""
    if not E > 0:
        raise ValidationError(f"energy must be positive, got E={E!r}")
    if P * P >= E + B * B:
        raise EmptyTorusError(f"Lambda(E={E!r}, P={P!r}) is empty: P^2 >= E + B^2")
    a1 = E - P * P
    b1 = -2.0 * B * P
    c1 = -(E + B * B)
    disc = E * E + E * (B * B - P * P)
    delta1 = 4.0 * disc
    root = math.sqrt(disc)
    z1 = (-B * P - root) / (E + B * B)
    z2 = (-B * P + root) / (E + B * B)
    z1 = max(z1, -1.0)
    z2 = min(z2, 1.0)
    return InvariantTorus(E=E, P=P, B=B, a1=a1, b1=b1, c1=c1, Delta1=delta1, z1=z1, z2=z2,
                          theta1=math.acos(z1), theta2=math.acos(z2))


def caustic_cycles(torus: InvariantTorus) -> tuple[CausticCycle, CausticCycle]:
    return (CausticCycle("theta1", torus.theta1, torus.P + torus.B * torus.z1),
            CausticCycle("theta2", torus.theta2, torus.P + torus.B * torus.z2))


def _check_annulus(torus: InvariantTorus, theta) -> None:
    t = np.asarray(theta, dtype=float)
    if np.any(t < torus.theta2 - ANNULUS_TOL) or np.any(t > torus.theta1 + ANNULUS_TOL):
        raise OutOfAnnulusError(f"theta={theta!r} outside [{torus.theta2!r}, {torus.theta1!r}]")


def _z_of(torus: InvariantTorus, theta):
    """``cos(theta)`` snapped to the exact roots at the caustics."""
    z = np.cos(theta)
    z = np.where(np.abs(np.asarray(theta) - torus.theta1) <= ANNULUS_TOL, torus.z1, z)
    z = np.where(np.abs(np.asarray(theta) - torus.theta2) <= ANNULUS_TOL, torus.z2, z)
    return np.clip(z, torus.z1, torus.z2)


def _scalar(x):
    return float(x) if np.ndim(x) == 0 else x


def p_theta_branch(torus: InvariantTorus, theta, branch: Branch | str = Branch.PLUS,
                   with_p_phi: bool = False):
    """``p_theta = +-sqrt(E - (P + B cos theta)^2 / sin^2 theta)`` on the annulus.

    With ``with_p_phi`` returns ``(p_theta, p_phi)`` where ``p_phi = P + B cos(theta)``.
    """
    _check_annulus(torus, theta)
    sign = Branch.parse(branch).sign
    z = _z_of(torus, theta)
    s2 = 1.0 - z * z
    r = np.maximum(torus.R(z), 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = sign * np.sqrt(np.where(s2 > 0, r / np.where(s2 > 0, s2, 1.0), 0.0))
    p = _scalar(p)
    if with_p_phi:
        return p, _scalar(torus.P + torus.B * np.cos(theta))
    return p


def action_I_closed(torus: InvariantTorus, theta):
    """Closed-form antiderivative ``I(theta)`` of the ``+`` branch of ``p_theta``.

    Three inverse-sine terms with weights ``|P+B|/2``, ``|P-B|/2`` and
    ``sqrt(E+B^2)``.  Each ``arcsin(x)`` is evaluated as ``atan2(x d, sqrt(1-x^2) d)``
    with ``1 - x^2`` expanded analytically as a multiple of ``R(cos theta)``;
    this is the same function, but the square-root sensitivity of the
    individual terms at the caustics cancels between them instead of
    accumulating.  Defined up to an additive constant.
    """
    _check_annulus(torus, theta)
    E, P, B = torus.E, torus.P, torus.B
    a1, b1, c1 = torus.a1, torus.b1, torus.c1
    z = _z_of(torus, theta)
    sqrt_r = np.sqrt(np.maximum(torus.R(z), 0.0))
    n1 = 2 * a1 + b1 + (b1 + 2 * c1) * z
    n2 = 2 * a1 - b1 + (b1 - 2 * c1) * z
    n3 = 2 * c1 * z + b1
    k = math.sqrt(E + B * B)
    # arcsin(n1 / ((z - 1) sqrt D)): scale by (1 - z) sqrt D > 0.
    t1 = np.arctan2(-n1, 2 * abs(P + B) * sqrt_r)
    # arcsin(n2 / ((z + 1) sqrt D)): scale by (1 + z) sqrt D > 0.
    t2 = np.arctan2(n2, 2 * abs(P - B) * sqrt_r)
    # arcsin(n3 / sqrt D).
    t3 = np.arctan2(n3, 2 * k * sqrt_r)
    return _scalar(0.5 * abs(P + B) * t1 + 0.5 * abs(P - B) * t2 + k * t3)


def action_I_quad(torus: InvariantTorus, theta: float, tol: float = 1e-13) -> float:
    """``integral_{theta2}^{theta} p_theta dtheta`` by adaptive quadrature.

    Substituting ``cos(theta) = m + w sin(u)`` (``m``, ``w`` the midpoint and
    half-width of ``[z1, z2]``) turns the square-root endpoint behaviour into
    the smooth integrand ``sqrt(E+B^2) w^2 cos^2(u) / (1 - z^2)``.
    """
    _check_annulus(torus, theta)
    theta = float(theta)
    if theta <= torus.theta2:
        return 0.0
    m = 0.5 * (torus.z1 + torus.z2)
    w = 0.5 * (torus.z2 - torus.z1)
    k = math.sqrt(torus.E + torus.B ** 2)
    s = (math.cos(theta) - m) / w
    u_lo = math.asin(min(1.0, max(-1.0, s)))

    def integrand(u):
        # w^2 cos^2 u = (z - z1)(z2 - z); each factor is divided by the matching
        # 1 -+ z separately so tori touching a pole (z1 = -1 or z2 = 1) stay finite
        su = math.sin(u)
        lo, hi = w * (1.0 + su), w * (1.0 - su)
        den_lo, den_hi = (1.0 + torus.z1) + lo, (1.0 - torus.z2) + hi
        r_lo = lo / den_lo if den_lo > 0 else 1.0
        r_hi = hi / den_hi if den_hi > 0 else 1.0
        return k * r_lo * r_hi

    val, err = quad(integrand, u_lo, 0.5 * math.pi, epsabs=tol, epsrel=tol, limit=200)
    if not math.isfinite(val) or err > 1e3 * max(tol, tol * abs(val)):
        raise ConvergenceError(f"action quadrature did not converge (error estimate {err:g})")
    return val


def complete_integral(torus: InvariantTorus) -> float:
    """Action of the theta-cycle: ``2 pi sqrt(E + B^2) - pi |P + B| - pi |P - B|``."""
    E, P, B = torus.E, torus.P, torus.B
    return 2.0 * math.pi * math.sqrt(E + B * B) - math.pi * abs(P + B) - math.pi * abs(P - B)


def invariant_density(torus: InvariantTorus, theta, eps_caustic: float = EPS_CAUSTIC):
    """Density ``1 / (2 |p_theta|)`` of the flow-invariant measure relative to ``dtheta dphi``."""
    _check_annulus(torus, theta)
    t = np.asarray(theta, dtype=float)
    if np.any(t < torus.theta2 + eps_caustic) or np.any(t > torus.theta1 - eps_caustic):
        raise CausticError(f"theta={theta!r} within {eps_caustic:g} of a caustic")
    return _scalar(1.0 / (2.0 * np.abs(p_theta_branch(torus, t))))


def torus_from_point(theta: float, p_theta: float, p_phi: float, B: float) -> InvariantTorus:
    """The torus through a phase point (kinetic momenta)."""
    s = math.sin(theta)
    return build_torus(p_theta ** 2 + p_phi ** 2 / (s * s), p_phi - B * math.cos(theta), B)
