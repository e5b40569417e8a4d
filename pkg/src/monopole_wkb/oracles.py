"""Independent numerical oracles.

Each function here recomputes a quantity by a route that shares no code with
the implementation it checks: ODE integration instead of trapezoid sums,
finite differences instead of closed-form derivatives, generic quadrature
instead of antiderivatives.  They are used by the test-suite and by
``monopole-wkb verify``.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.integrate import quad, solve_ivp

from .geometry import BundleData, GaugePatch, potential_at
from .symbols import PhasePoint, f_U, h0_at, twisted_form, canonical_form


def parallel_transport_holonomy(theta_of_t: Callable[[float], float],
                                phi_of_t: Callable[[float], float],
                                dphi_dt: Callable[[float], float],
                                bundle: BundleData, t_end: float = 1.0) -> complex:
    """Solve ``xi' = i A_phi(theta(t)) phi'(t) xi`` in the North gauge over ``[0, t_end]``.

    The loop must avoid the south pole (the only singularity of the North gauge).
    """

    def rhs(t, y):
        a = float(potential_at(GaugePatch.NORTH, bundle, theta_of_t(t))) * dphi_dt(t)
        return [-a * y[1], a * y[0]]

    sol = solve_ivp(rhs, (0.0, t_end), [1.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-13)
    return complex(sol.y[0, -1], sol.y[1, -1])


def cap_flux_quadrature(theta: float, bundle: BundleData) -> float:
    """Integral of ``F = B_eff sin(theta') dtheta' ^ dphi`` over the cap ``theta' < theta``."""
    # the integrand does not depend on phi, so the outer integral is a factor 2 pi
    inner, _ = quad(lambda t: bundle.B_eff * math.sin(t), 0.0, theta, epsabs=1e-13, epsrel=1e-13)
    return 2.0 * math.pi * inner


def _shift(pt: PhasePoint, k: int, h: float) -> PhasePoint:
    y = pt.as_array()
    y[k] += h
    return PhasePoint.from_array(y)


def _d5(f: Callable[[float], float], x: float, h: float) -> float:
    """Fourth-order five-point central difference ``f'(x)``."""
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)


def _fd_dh_dp(pt: PhasePoint, k: int, patch, bundle: BundleData, hp: float) -> float:
    # H0 is quadratic in p, so the central difference in p is exact up to rounding.
    return (h0_at(_shift(pt, k, hp), patch, bundle) - h0_at(_shift(pt, k, -hp), patch, bundle)) / (2 * hp)


def fd_subprincipal(pt: PhasePoint, patch, bundle: BundleData, h: float = 1e-3, hp: float = 1.0) -> complex:
    """``H1 - (1/2i) sum d^2H0/dx_j dp_j`` with every derivative by finite differences.

    ``H1`` is rebuilt from its divergence form: the bracket
    ``sqrt|g| g^{jl} (p_l - A_l)`` is differenced in ``x_j`` with ``p`` frozen.
    Position derivatives use a fourth-order stencil of step ``h sin(theta)``.
    """
    patch = GaugePatch.parse(patch)
    h = h * math.sin(pt.theta)

    def bracket(theta, phi, j):
        s = math.sin(theta)
        a = float(potential_at(patch, bundle, theta))
        if j == 0:
            return s * pt.p_theta
        return s * (pt.p_phi - a) / (s * s)

    sqrt_g = math.sin(pt.theta)
    div = _d5(lambda t: bracket(t, pt.phi, 0), pt.theta, h) + _d5(lambda f: bracket(pt.theta, f, 1), pt.phi, h)
    h1 = complex(0.0, -div / sqrt_g)

    trace = 0.0
    for xk, pk in ((0, 2), (1, 3)):
        trace += _d5(lambda x: _fd_dh_dp(_shift(pt, xk, x - pt.as_array()[xk]), pk, patch, bundle, hp),
                     pt.as_array()[xk], h)
    return h1 + 0.5j * trace


def fd_gamma0(pt: PhasePoint, patch, bundle: BundleData, h: float = 1e-3, hp: float = 1.0) -> complex:
    """Transport coefficient with ``X_{H0}`` and ``ln|g|`` both differenced numerically."""
    patch = GaugePatch.parse(patch)
    hx = h * math.sin(pt.theta)
    dh_dp = [_fd_dh_dp(pt, k, patch, bundle, hp) for k in (2, 3)]
    dlog = [_d5(lambda t: math.log(math.sin(t) ** 2), pt.theta, hx), 0.0]
    x_log = dh_dp[0] * dlog[0] + dh_dp[1] * dlog[1]
    return 1j * fd_subprincipal(pt, patch, bundle, h, hp) - 0.25 * x_log


def fd_pullback_defect(pt: PhasePoint, patch, bundle: BundleData, u, v, h: float = 1e-6) -> float:
    """``(f_U^* Omega)(u, v) - Omega_0(u, v)`` at ``f_U^{-1}(pt)`` with ``Df_U`` by central differences.

    ``pt`` is given in canonical coordinates of ``patch``.
    """
    z = pt.as_array()
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)

    def f(y):
        return f_U(PhasePoint.from_array(y), patch, bundle, "forward").as_array()

    du = (f(z + h * u) - f(z - h * u)) / (2 * h)
    dv = (f(z + h * v) - f(z - h * v)) / (2 * h)
    image = f(z)
    return twisted_form(image[0], bundle, du, dv) - canonical_form(u, v)


def chain_spectrum(n: int, diag: float = 2.0, off: float = -1.0) -> np.ndarray:
    """Closed-form eigenvalues of the constant tridiagonal matrix ``tridiag(off, diag, off)``."""
    k = np.arange(1, n + 1)
    return np.sort(diag + 2.0 * off * np.cos(k * np.pi / (n + 1)))


def quad_action(E: float, P: float, B: float, lo: float, hi: float) -> float:
    """Plain adaptive quadrature of the momentum ``p_theta`` from ``lo`` to ``hi`` in ``theta``."""

    def p_theta(t):
        v = E - (P + B * math.cos(t)) ** 2 / math.sin(t) ** 2
        return math.sqrt(v) if v > 0 else 0.0

    val, _ = quad(p_theta, lo, hi, epsabs=1e-13, epsrel=1e-13, limit=400)
    return val
