"""Magnetic geodesic flow on the unit sphere.

The flow is generated by ``H = p_theta^2 + p_phi^2 / sin^2(theta)`` (kinetic
momenta) with respect to the twisted form
``Omega = dp ^ dx + B sin(theta) dtheta ^ dphi``::

    theta'   = 2 p_theta
    phi'     = 2 p_phi / sin^2(theta)
    p_theta' = 2 cos(theta) p_phi^2 / sin^3(theta) + 2 B p_phi / sin(theta)
    p_phi'   = -2 B sin(theta) p_theta

i.e. ``p_j' = -dH/dx^j + F_jk x'^k``.  Both ``H`` and
``I2 = p_phi - B cos(theta)`` are first integrals; every orbit is a circle and
closes after time ``pi / sqrt(E + B^2)``.

Integration uses a Dormand-Prince 5(4) pair with a PI step-size controller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ConvergenceError, PoleCrossingError, ValidationError
from .geometry import EPS_POLE, check_theta
from .symbols import PhasePoint

# Dormand-Prince 5(4) tableau.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)

_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0
_BETA = 0.04
_EXPO = 0.2 - 0.75 * _BETA


@dataclass(frozen=True)
class FlowConfig:
    B: float = 0.5
    abs_tol: float = 1e-13
    rel_tol: float = 1e-13
    t_max: float = 10.0
    eps_pole: float = EPS_POLE
    max_steps: int = 1_000_000
    h_min: float = 1e-14

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValidationError("integrator tolerances must be positive")
        if not math.isfinite(self.t_max) or self.t_max == 0:
            raise ValidationError("t_max must be finite and non-zero")


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    point: PhasePoint
    energy: float
    i2: float
    on_grid: bool = field(default=False, compare=False)


class ClosureResult(NamedTuple):
    period: float
    return_error: float
    energy_drift: float
    i2_drift: float


def hamiltonian(pt: PhasePoint, eps_pole: float = EPS_POLE) -> float:
    """Kinetic energy ``p_theta^2 + p_phi^2 / sin^2(theta)``."""
    check_theta(pt.theta, eps_pole)
    s = math.sin(pt.theta)
    return pt.p_theta ** 2 + pt.p_phi ** 2 / (s * s)


def i2_at(pt: PhasePoint, B: float) -> float:
    """Axial first integral ``p_phi - B cos(theta)``."""
    return pt.p_phi - B * math.cos(pt.theta)


def _rhs(y: np.ndarray, B: float) -> np.ndarray:
    theta, _, p_theta, p_phi = y
    s = math.sin(theta)
    c = math.cos(theta)
    return np.array([
        2.0 * p_theta,
        2.0 * p_phi / (s * s),
        2.0 * c * p_phi * p_phi / (s * s * s) + 2.0 * B * p_phi / s,
        -2.0 * B * s * p_theta,
    ])


def flow_rhs(pt: PhasePoint, B: float, eps_pole: float = EPS_POLE) -> np.ndarray:
    """Velocity ``(theta', phi', p_theta', p_phi')`` of the magnetic geodesic flow."""
    check_theta(pt.theta, eps_pole)
    return _rhs(pt.as_array(), B)


def _energy(y) -> float:
    s = math.sin(y[0])
    return y[2] * y[2] + y[3] * y[3] / (s * s)


def _i2(y, B) -> float:
    return y[3] - B * math.cos(y[0])


def _dopri_step(y: np.ndarray, h: float, B: float, k1: np.ndarray):
    ks = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * k for a, k in zip(_A[i], ks))
        ks.append(_rhs(yi, B))
    y_new = y + h * sum(a * k for a, k in zip(_A[6], ks[:6]))
    err = h * sum(e * k for e, k in zip(_E, ks))
    return y_new, err, ks[6]


class _Stepper:
    """Adaptive Dormand-Prince driver with Gustafsson PI control (forward or backward in time)."""

    def __init__(self, y0: np.ndarray, cfg: FlowConfig, direction: float):
        self.cfg = cfg
        self.direction = direction
        self.t = 0.0
        self.y = np.array(y0, dtype=float)
        self.k = _rhs(self.y, cfg.B)
        self.fac_old = 1e-4
        self.h = direction * self._initial_step()
        self.steps = 0

    def _initial_step(self) -> float:
        scale = self.cfg.abs_tol + self.cfg.rel_tol * np.abs(self.y)
        d0 = float(np.sqrt(np.mean((self.y / scale) ** 2)))
        d1 = float(np.sqrt(np.mean((self.k / scale) ** 2)))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        return min(h0, abs(self.cfg.t_max))

    def _err_norm(self, y_new, err) -> float:
        scale = self.cfg.abs_tol + self.cfg.rel_tol * np.maximum(np.abs(self.y), np.abs(y_new))
        return float(np.sqrt(np.mean((err / scale) ** 2)))

    def try_step(self, h: float):
        """One trial step of size ``h`` from the current state, without committing it."""
        return _dopri_step(self.y, h, self.cfg.B, self.k)

    def advance(self, t_stop: float) -> None:
        """Take one accepted step, never overshooting ``t_stop``."""
        cfg = self.cfg
        while True:
            self.steps += 1
            if self.steps > cfg.max_steps:
                raise ConvergenceError("maximum number of integration steps exceeded")
            h = self.h
            remaining = t_stop - self.t
            clipped = abs(h) >= abs(remaining)
            if clipped:
                h = remaining
            y_new, err, k_new = self.try_step(h)
            e = self._err_norm(y_new, err)
            fac11 = e ** _EXPO if e > 0 else 0.0
            fac = fac11 / self.fac_old ** _BETA
            fac = min(1.0 / _FAC_MIN, max(1.0 / _FAC_MAX, fac / _SAFETY))
            h_new = h / fac if fac > 0 else h * _FAC_MAX
            if math.isfinite(e) and e <= 1.0:
                self.fac_old = max(e, 1e-4)
                self.t = t_stop if clipped else self.t + h
                self.y = y_new
                self.k = k_new
                if not (cfg.eps_pole < y_new[0] < math.pi - cfg.eps_pole):
                    raise PoleCrossingError(f"trajectory reached a pole at t={self.t:.6g}")
                if not clipped or abs(h_new) > abs(self.h):
                    self.h = h_new
                return
            if abs(h) <= cfg.h_min:
                raise ConvergenceError(f"step size underflow at t={self.t:.6g}")
            self.h = h / min(1.0 / _FAC_MIN, fac11 / _SAFETY)


def _sample(t: float, y: np.ndarray, B: float, on_grid: bool) -> TrajectorySample:
    return TrajectorySample(t=t, point=PhasePoint.from_array(y), energy=_energy(y), i2=_i2(y, B),
                            on_grid=on_grid)


def integrate(pt0: PhasePoint, cfg: FlowConfig, t_eval: Sequence[float] | None = None,
              include_internal: bool = True) -> list[TrajectorySample]:
    """Integrate the flow from ``pt0`` over ``[0, cfg.t_max]`` (backward if ``t_max < 0``).

    Steps are clipped to land exactly on every time in ``t_eval`` (default: 101
    equally spaced times), so grid samples carry full fifth-order accuracy.
    Adaptive internal steps are included when ``include_internal`` is set.
    ``energy`` and ``i2`` are recorded with every sample; see :func:`max_drift`.
    """
    check_theta(pt0.theta, cfg.eps_pole)
    direction = 1.0 if cfg.t_max > 0 else -1.0
    if t_eval is None:
        grid = list(np.linspace(0.0, cfg.t_max, 101))
    else:
        grid = sorted({float(t) for t in t_eval}, key=lambda t: direction * t)
        if any(direction * t < 0 or abs(t) > abs(cfg.t_max) for t in grid):
            raise ValidationError("t_eval must lie between 0 and t_max")
    stepper = _Stepper(pt0.as_array(), cfg, direction)
    out = [_sample(0.0, stepper.y, cfg.B, on_grid=bool(grid) and grid[0] == 0.0)]
    for target in grid:
        if target == 0.0:
            continue
        while direction * (target - stepper.t) > 0:
            stepper.advance(target)
            hit = stepper.t == target
            if hit or include_internal:
                out.append(_sample(stepper.t, stepper.y, cfg.B, on_grid=hit))
    if grid and abs(grid[-1]) < abs(cfg.t_max):
        while direction * (cfg.t_max - stepper.t) > 0:
            stepper.advance(cfg.t_max)
            if include_internal or stepper.t == cfg.t_max:
                out.append(_sample(stepper.t, stepper.y, cfg.B, on_grid=False))
    return out


def max_drift(samples: Sequence[TrajectorySample]) -> tuple[float, float]:
    """Largest ``|H(t) - H(0)|`` and ``|I2(t) - I2(0)|`` over a trajectory."""
    e0, i0 = samples[0].energy, samples[0].i2
    return (max(abs(s.energy - e0) for s in samples), max(abs(s.i2 - i0) for s in samples))


_MAX_ANGLE_STEP = 0.5


def _wrap(x: float) -> float:
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def analytic_period(E: float, B: float) -> float:
    """``pi / sqrt(E + B^2)``: the theta-libration period ``dJ/dE`` of the complete integral."""
    return math.pi / math.sqrt(E + B * B)


def closure_check(pt0: PhasePoint, cfg: FlowConfig, bisection_tol: float = 1e-15) -> ClosureResult:
    """First return of the orbit through ``pt0`` to its starting section.

    The section is ``phi = phi0`` crossed in the direction of ``phi'(0)``, or
    ``theta = theta0`` crossed in the direction of ``theta'(0)`` when that is the
    more transversal choice (e.g. for orbits starting with ``p_phi = 0``).  The
    crossing time is refined by bisection on the length of a single
    Dormand-Prince step from the last accepted state.
    """
    check_theta(pt0.theta, cfg.eps_pole)
    y0 = pt0.as_array()
    if _energy(y0) <= 0:
        raise ValidationError("closure_check needs H(pt0) > 0")
    if cfg.t_max <= 0:
        raise ValidationError("closure_check integrates forward in time; t_max must be positive")
    v0 = _rhs(y0, cfg.B)
    use_phi = abs(v0[1]) * math.sin(y0[0]) > abs(v0[0])
    if use_phi:
        sign = math.copysign(1.0, v0[1])
        # phi is integrated without wrapping; an upward crossing of sign*sin(phi - phi0)
        # in the direction of motion only happens at phi - phi0 in 2 pi Z.
        section = lambda y: sign * math.sin(y[1] - y0[1])
    else:
        sign = math.copysign(1.0, v0[0])
        section = lambda y: sign * (y[0] - y0[0])

    e0, i0 = _energy(y0), _i2(y0, cfg.B)
    drift_e = drift_i = 0.0
    stepper = _Stepper(y0, cfg, 1.0)
    prev = section(y0)
    while stepper.t < cfg.t_max:
        t_prev, y_prev, k_prev = stepper.t, stepper.y.copy(), stepper.k.copy()
        # keep the angular advance per step well below a half turn so no crossing is skipped
        speed = max(abs(k_prev[0]), abs(k_prev[1]), 1e-300)
        stepper.advance(min(cfg.t_max, stepper.t + _MAX_ANGLE_STEP / speed))
        drift_e = max(drift_e, abs(_energy(stepper.y) - e0))
        drift_i = max(drift_i, abs(_i2(stepper.y, cfg.B) - i0))
        cur = section(stepper.y)
        if prev < 0.0 <= cur:
            lo, hi = 0.0, stepper.t - t_prev
            while hi - lo > bisection_tol * max(1.0, stepper.t):
                mid = 0.5 * (lo + hi)
                y_mid, _, _ = _dopri_step(y_prev, mid, cfg.B, k_prev)
                if section(y_mid) < 0.0:
                    lo = mid
                else:
                    hi = mid
            y_ret, _, _ = _dopri_step(y_prev, hi, cfg.B, k_prev)
            diff = y_ret - y0
            diff[1] = _wrap(diff[1])
            drift_e = max(drift_e, abs(_energy(y_ret) - e0))
            drift_i = max(drift_i, abs(_i2(y_ret, cfg.B) - i0))
            return ClosureResult(float(t_prev + hi), float(np.linalg.norm(diff)), float(drift_e), float(drift_i))
        prev = cur
    raise ConvergenceError(f"no return to the section found within t_max={cfg.t_max:g}")
