"""Round metric on S^2 and the Wu-Yang line bundle of the Dirac monopole.

The sphere is covered by two gauge patches::

    North (U1): 0 <= theta < pi,   A1 =  B_eff (1 - cos theta) dphi
    South (U2): 0 <  theta <= pi,  A2 = -B_eff (1 + cos theta) dphi

with sections related by ``xi_1 = g12 xi_2`` on the overlap, where
``g12 = exp(2 i B_eff phi)``.  ``B_eff = N * B`` is the charge of the
tensor power ``L^N``; the first Chern number of ``L^N`` is ``2 N B``.

Loops are oriented counterclockwise as seen from the north pole (``phi``
increasing), and ``holonomy`` returns ``exp(i * integral of A)``, the
parallel transport of the connection ``d - i A``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError, OpenLoopError, PoleCrossingError, PoleProximityError, ValidationError

EPS_POLE = 1e-8
TWO_PI = 2.0 * math.pi


def check_theta(theta, eps_pole: float = EPS_POLE) -> None:
    """Raise :class:`PoleProximityError` unless ``eps_pole <= theta <= pi - eps_pole``."""
    t = np.asarray(theta, dtype=float)
    if np.any(t < eps_pole) or np.any(t > math.pi - eps_pole) or np.any(~np.isfinite(t)):
        raise PoleProximityError(f"theta={theta!r} is within {eps_pole:g} of a pole")


def normalize_phi(phi):
    """Map an angle to [0, 2 pi)."""
    out = np.mod(phi, TWO_PI)
    if np.ndim(out) == 0:
        out = float(out)
        return 0.0 if out >= TWO_PI else out
    return out


@dataclass(frozen=True)
class MetricSample:
    theta: float
    g_thth: float
    g_phph: float
    sqrt_det: float


def metric_at(theta: float, eps_pole: float = EPS_POLE) -> MetricSample:
    """Components of ``g = dtheta^2 + sin^2(theta) dphi^2`` at ``theta``."""
    check_theta(theta, eps_pole)
    s = math.sin(theta)
    return MetricSample(theta=float(theta), g_thth=1.0, g_phph=s * s, sqrt_det=s)


class GaugePatch(enum.Enum):
    NORTH = "north"
    SOUTH = "south"

    @property
    def theta_domain(self) -> tuple[float, float, str]:
        """``(lo, hi, closure)`` with ``closure`` in the interval notation ``[)`` or ``(]``."""
        if self is GaugePatch.NORTH:
            return (0.0, math.pi, "[)")
        return (0.0, math.pi, "(]")

    def contains(self, theta) -> bool:
        t = np.asarray(theta, dtype=float)
        if self is GaugePatch.NORTH:
            return bool(np.all((t >= 0.0) & (t < math.pi)))
        return bool(np.all((t > 0.0) & (t <= math.pi)))

    @classmethod
    def parse(cls, value) -> "GaugePatch":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"north": cls.NORTH, "n": cls.NORTH, "u1": cls.NORTH, "1": cls.NORTH,
                   "south": cls.SOUTH, "s": cls.SOUTH, "u2": cls.SOUTH, "2": cls.SOUTH}
        try:
            return aliases[key]
        except KeyError:
            raise ValidationError(f"unknown gauge patch {value!r}") from None


@dataclass(frozen=True)
class BundleData:
    """Tensor power ``L^N`` of the monopole bundle with base charge ``B``.

    ``2 B`` must be an integer; the default ``B = 1/2`` is the Hopf bundle.
    """

    B: float = 0.5
    N: int = 1

    def __post_init__(self):
        twice = 2 * Fraction(self.B).limit_denominator(10**6)
        if twice.denominator != 1 or abs(float(twice) - 2 * self.B) > 1e-12:
            raise ValidationError(f"B={self.B!r} violates the quantization condition 2B in Z")
        if int(self.N) != self.N or self.N < 1:
            raise ValidationError(f"N={self.N!r} must be a positive integer")

    @property
    def B_eff(self) -> float:
        return self.N * self.B

    @property
    def chern_number(self) -> int:
        return int(round(2 * self.N * self.B))


def potential_at(patch: GaugePatch, bundle: BundleData, theta):
    """``A_phi`` of the connection form on ``patch`` (``A_theta`` vanishes)."""
    patch = GaugePatch.parse(patch)
    if not patch.contains(theta):
        raise DomainError(f"theta={theta!r} outside the {patch.value} patch")
    b = bundle.B_eff
    if patch is GaugePatch.NORTH:
        return b * (1.0 - np.cos(theta))
    return -b * (1.0 + np.cos(theta))


def transition_at(bundle: BundleData, phi):
    """Transition function ``g12 = exp(2 i B_eff phi)``, so that ``xi_1 = g12 xi_2``."""
    return np.exp(2j * bundle.B_eff * np.asarray(phi, dtype=float))


def transition_log_derivative(bundle: BundleData) -> float:
    """``g12^{-1} dg12 / (i dphi)``; equals ``A1 - A2`` identically."""
    return 2.0 * bundle.B_eff


@dataclass(frozen=True)
class LoopPath:
    samples: tuple[tuple[float, float], ...]
    closed: bool = True

    @classmethod
    def latitude(cls, theta: float, n: int = 256, phi0: float = 0.0) -> "LoopPath":
        """Circle of constant ``theta`` traversed once counterclockwise."""
        phis = phi0 + np.linspace(0.0, TWO_PI, n + 1)
        return cls(tuple((float(theta), float(p)) for p in phis), closed=True)

    @classmethod
    def from_arrays(cls, theta: Sequence[float], phi: Sequence[float], closed: bool = True) -> "LoopPath":
        return cls(tuple((float(t), float(p)) for t, p in zip(theta, phi)), closed=closed)


def _wrap_pi(x):
    return (np.asarray(x) + math.pi) % TWO_PI - math.pi


def holonomy(loop: LoopPath, bundle: BundleData, tol: float = 1e-9,
             eps_pole: float = EPS_POLE) -> complex:
    """Holonomy ``exp(i h_A(gamma))`` of the projected loop.

    Composite trapezoid rule for ``integral of A_phi dphi`` on each segment;
    a segment uses the North gauge if its midpoint has ``theta < pi/2`` and the
    South gauge otherwise, and every patch switch applies the transition
    function at the switching sample.  Increments of ``phi`` between samples are
    taken in (-pi, pi], so consecutive samples must be closer than pi in ``phi``.
    """
    pts = np.asarray(loop.samples, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3:
        raise ValidationError("a loop needs at least three samples")
    if not loop.closed:
        raise OpenLoopError("loop is not marked closed")
    theta, phi = pts[:, 0], pts[:, 1]
    if abs(theta[-1] - theta[0]) > tol or abs(_wrap_pi(phi[-1] - phi[0])) > tol:
        raise OpenLoopError("first and last samples of the loop do not coincide")
    if np.any(theta < eps_pole) or np.any(theta > math.pi - eps_pole):
        raise PoleCrossingError("loop passes through a pole")

    dphi = _wrap_pi(np.diff(phi))
    mid = 0.5 * (theta[1:] + theta[:-1])
    north = mid < 0.5 * math.pi
    b = bundle.B_eff
    a_north = b * (1.0 - np.cos(theta))
    a_south = -b * (1.0 + np.cos(theta))
    seg_a = np.where(north, 0.5 * (a_north[1:] + a_north[:-1]), 0.5 * (a_south[1:] + a_south[:-1]))
    phase = float(np.sum(seg_a * dphi))

    # Carry the section in the gauge of the current segment; convert at switches.
    # xi_1 = g12 xi_2, so North -> South divides by g12 and South -> North multiplies.
    two_b = 2.0 * b
    unwrapped = phi[0] + np.concatenate(([0.0], np.cumsum(dphi)))
    start_north = bool(north[0])
    for k in range(1, len(north)):
        if north[k] != north[k - 1]:
            phase += (-two_b if north[k - 1] else two_b) * unwrapped[k]
    # Express the final value in the starting gauge.
    if bool(north[-1]) != start_north:
        phase += (-two_b if north[-1] else two_b) * unwrapped[-1]
    return complex(np.exp(1j * phase))


def cap_flux(theta: float, bundle: BundleData) -> float:
    """``2 pi B_eff (1 - cos theta)``: magnetic flux through the polar cap above ``theta``."""
    return TWO_PI * bundle.B_eff * (1.0 - math.cos(theta))
