"""WKB quasimodes built from the quantized tori on the two non-singular charts.

On a quantized torus the section::

    U_N = sum_{+-} c_{+-} exp(i N tau_{+-}) a(theta) chi(theta)

is an almost eigenfunction of the magnetic Laplacian with almost eigenvalue
``lambda_hat``.  The eikonals are ``tau_{+-} = +-I(theta) + (P +- gauge) phi``
with ``I`` measured from the inner caustic ``theta2``, the amplitude
``a = (2 |p_theta| sin theta)^{-1/2}`` is the square root of the invariant
density over the area density, and ``chi`` is a smooth plateau cutoff that
keeps the section away from the caustics.  Since ``N (P + B) = k1`` the
section factors as ``profile(theta) exp(i k1 phi)`` in the North gauge, so its
residual is computed with the one-dimensional radial operator.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridResolutionError, ValidationError
from .geometry import GaugePatch
from .quantization import QuantizedLevel
from .spectrum import apply_radial_operator
from .tori import (EPS_CAUSTIC, Branch, InvariantTorus, action_I_closed, invariant_density,
                   p_theta_branch)

#: relative phases of the two branches (one quarter period per caustic)
BRANCH_PHASES = {Branch.PLUS: cmath.exp(-0.25j * math.pi), Branch.MINUS: cmath.exp(0.25j * math.pi)}
MIN_POINTS_PER_OSCILLATION = 32
GAUGE_TOL = 1e-12


@dataclass(frozen=True)
class EikonalSpec:
    torus: InvariantTorus
    branch: Branch = Branch.PLUS
    patch: GaugePatch = GaugePatch.NORTH
    tau0: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "branch", Branch.parse(self.branch))
        object.__setattr__(self, "patch", GaugePatch.parse(self.patch))

    @property
    def phi_slope(self) -> float:
        """``P + B`` on the North patch, ``P - B`` on the South patch."""
        t = self.torus
        return t.P + t.B if self.patch is GaugePatch.NORTH else t.P - t.B


def action_from_inner_caustic(torus: InvariantTorus, theta):
    """``I(theta) - I(theta2)``, the integral of the ``+`` branch from the inner caustic."""
    return action_I_closed(torus, theta) - action_I_closed(torus, torus.theta2)


def eikonal_at(spec: EikonalSpec, theta, phi):
    """``tau = +-I(theta) + slope * phi + tau0`` on the chosen patch and branch."""
    return spec.branch.sign * action_from_inner_caustic(spec.torus, theta) + spec.phi_slope * np.asarray(phi) + spec.tau0


def amplitude_at(torus: InvariantTorus, theta, eps_caustic: float = EPS_CAUSTIC):
    """``(2 |p_theta| sin theta)^{-1/2}``; raises :class:`CausticError` near the caustics."""
    density = invariant_density(torus, theta, eps_caustic)
    return np.sqrt(density / np.sin(theta))


def _smooth_step(t: np.ndarray) -> np.ndarray:
    """C-infinity step, 0 for ``t <= 0`` and 1 for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        g = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return f / (f + g)


@dataclass(frozen=True)
class PlateauCutoff:
    """Smooth bump supported in ``(lo + delta, hi - delta)``, equal to 1 on ``[lo + 2 delta, hi - 2 delta]``."""

    lo: float
    hi: float
    delta: float

    @classmethod
    def for_torus(cls, torus: InvariantTorus, delta_frac: float = 0.1) -> "PlateauCutoff":
        if not 0.0 < delta_frac < 0.25:
            raise ValidationError(f"cutoff too wide: delta_frac must be in (0, 0.25), got {delta_frac!r}")
        return cls(torus.theta2, torus.theta1, delta_frac * torus.width)

    @property
    def support(self) -> tuple[float, float]:
        return self.lo + self.delta, self.hi - self.delta

    @property
    def plateau(self) -> tuple[float, float]:
        return self.lo + 2 * self.delta, self.hi - 2 * self.delta

    def __call__(self, theta):
        a, b = self.support
        return _smooth_step((np.asarray(theta) - a) / self.delta) * _smooth_step((b - np.asarray(theta)) / self.delta)

    def describe(self) -> dict:
        return {"kind": "exp(-1/t) plateau", "delta": self.delta, "support": list(self.support),
                "plateau": list(self.plateau)}


@dataclass
class SectionGrid:
    level: QuantizedLevel
    k1: int
    theta_samples: np.ndarray
    phi_samples: np.ndarray
    values_north: np.ndarray
    values_south: np.ndarray
    cutoff: PlateauCutoff
    profile: np.ndarray = field(repr=False)

    @property
    def B(self) -> float:
        return 0.5

    @property
    def transition_exponent(self) -> int:
        """``2 N B``: the Fourier shift between the gauges."""
        return self.level.N

    def gauge_defect(self) -> float:
        """``max |values_north - exp(2 i N B phi) values_south|``."""
        phase = np.exp(1j * self.transition_exponent * self.phi_samples)[None, :]
        return float(np.max(np.abs(self.values_north - phase * self.values_south)))

    def to_json(self) -> dict:
        def interleave(z: np.ndarray) -> list[float]:
            return np.column_stack((z.real.ravel(), z.imag.ravel())).ravel().tolist()

        return {
            "N": self.level.N, "j": self.level.j, "k1": self.k1,
            "lambda_hat": float(self.level.lambda_hat),
            "shape": [len(self.theta_samples), len(self.phi_samples)],
            "theta": self.theta_samples.tolist(), "phi": self.phi_samples.tolist(),
            "cutoff": self.cutoff.describe(),
            "north": interleave(self.values_north), "south": interleave(self.values_south),
        }


def wkb_profile(level: QuantizedLevel, k1: int, theta: np.ndarray, cutoff: PlateauCutoff) -> np.ndarray:
    """``sum_{+-} c_{+-} exp(+-i N I) a chi`` on ``theta``, zero off the cutoff support."""
    torus = level.torus(k1)
    out = np.zeros(theta.shape, dtype=complex)
    a, b = cutoff.support
    inside = (theta > a) & (theta < b)
    t = theta[inside]
    amp = amplitude_at(torus, t) * cutoff(t)
    phase = level.N * action_from_inner_caustic(torus, t)
    for br, c in BRANCH_PHASES.items():
        out[inside] += c * np.exp(1j * br.sign * phase) * amp
    return out


def almost_eigenfunction(level: QuantizedLevel, k1: int, n_theta: int = 4096, n_phi: int | None = None,
                         delta_frac: float = 0.1) -> SectionGrid:
    """Sample the quasimode of ``(level, k1)`` on both gauge patches.

    The theta grid is uniform with ``n_theta`` cell midpoints over the annulus
    ``[theta2, theta1]``; the phi grid has ``n_phi`` uniform points on
    ``[0, 2 pi)`` (by default enough to resolve both Fourier modes).
    """
    if int(k1) != k1 or k1 not in level.k1_range:
        raise ValidationError(f"k1={k1!r} outside [{level.k1_min}, {level.k1_max}] for j={level.j}")
    if n_theta < 16:
        raise ValidationError("n_theta must be at least 16")
    torus = level.torus(k1)
    cutoff = PlateauCutoff.for_torus(torus, delta_frac)
    shift = level.N  # 2 N B
    if n_phi is None:
        n_phi = 2 * max(abs(k1), abs(k1 - shift)) + 2
    if n_phi < 1:
        raise ValidationError("n_phi must be positive")
    h = torus.width / n_theta
    theta = torus.theta2 + (np.arange(n_theta) + 0.5) * h
    phi = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    profile = wkb_profile(level, k1, theta, cutoff)
    north = profile[:, None] * np.exp(1j * k1 * phi)[None, :]
    south = profile[:, None] * np.exp(1j * (k1 - shift) * phi)[None, :]
    return SectionGrid(level=level, k1=k1, theta_samples=theta, phi_samples=phi, values_north=north,
                       values_south=south, cutoff=cutoff, profile=profile)


def check_resolution(section: SectionGrid) -> float:
    """Points per local oscillation of ``N I(theta)``; raises if below the guard."""
    torus = section.level.torus(section.k1)
    h = section.theta_samples[1] - section.theta_samples[0]
    p_max = float(np.max(np.abs(p_theta_branch(torus, section.theta_samples))))
    k = section.level.N * p_max * h
    points = math.inf if k == 0 else 2 * math.pi / k
    if points < MIN_POINTS_PER_OSCILLATION:
        raise GridResolutionError(f"only {points:.1f} grid points per oscillation; need {MIN_POINTS_PER_OSCILLATION}")
    return points


def _weighted_norm(f: np.ndarray, theta: np.ndarray, mask=None) -> float:
    w = np.sin(theta) * np.abs(f) ** 2
    if mask is not None:
        w = w[mask]
    return math.sqrt(float(np.sum(w)))


def residual_norms(level: QuantizedLevel, section: SectionGrid, shift: float = 0.0) -> tuple[float, float]:
    """``(global, plateau)`` relative residuals of ``(Delta - lambda_hat - shift) U``.

    The global value is ``||r|| / ||U||`` over the whole annulus, the plateau
    value the same ratio with both norms restricted to the region where the
    cutoff is 1.  Norms use the area measure ``sin(theta) dtheta`` (the
    ``phi`` factor is common and cancels).
    """
    if section.level != level:
        raise ValidationError("section was built for a different level")
    check_resolution(section)
    theta, u = section.theta_samples, section.profile
    lam = float(level.lambda_hat) + shift
    r = apply_radial_operator(level.N, 0.5, section.k1, theta, u) - lam * u
    lo, hi = section.cutoff.plateau
    plateau = (theta >= lo) & (theta <= hi)
    return (_weighted_norm(r, theta) / _weighted_norm(u, theta),
            _weighted_norm(r, theta, plateau) / _weighted_norm(u, theta, plateau))


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float)), 1)[0])


@dataclass(frozen=True)
class ResidualRow:
    N: int
    j: int
    k1: int
    global_residual: float
    plateau_residual: float


def residual_scan(Ns, j: int, k1_of_N=None, n_theta: int = 4096, shift: float = 0.0,
                  delta_frac: float = 0.1) -> list[ResidualRow]:
    """Residuals of the ``(N, j, k1)`` quasimodes; ``k1`` defaults to ``ceil(N/2)``."""
    from .quantization import make_level

    rows = []
    for N in Ns:
        k1 = (N + 1) // 2 if k1_of_N is None else k1_of_N(N)
        level = make_level(N, j)
        sec = almost_eigenfunction(level, k1, n_theta=n_theta, n_phi=1, delta_frac=delta_frac)
        g, p = residual_norms(level, sec, shift)
        rows.append(ResidualRow(N, j, k1, g, p))
    return rows
