"""Quantization conditions on the tori ``Lambda(E, P)`` with ``B = 1/2``.

A torus is quantized for the tensor power ``L^N`` when

* the phi-cycle is periodic in both gauges: ``N (P + 1/2) = k1`` is an integer, and
* the theta-cycle carries Maslov index 2: ``N J / (2 pi) = k2 + 1/2``.

Solving both gives ``sqrt(E + 1/4) = (j + 1/2)/N + 1/2`` with ``j`` the
piecewise function of ``(k1, k2)`` in :func:`j_from_k`, hence the almost
eigenvalues ``lambda_hat = N^2 E = j(j+1) + N(2j+1)/2 + 1/4`` with
``N + 2j + 1`` admissible values of ``k1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .tori import InvariantTorus, build_torus, complete_integral

B_HALF = Fraction(1, 2)
MASLOV_THETA_CYCLE = 2


def _check_N(N: int) -> None:
    if int(N) != N or N < 1:
        raise ValidationError(f"N must be a positive integer, got {N!r}")


def _check_j(j: int) -> None:
    if int(j) != j or j < 0:
        raise ValidationError(f"j must be a non-negative integer, got {j!r}")


def lambda_hat(N: int, j: int) -> Fraction:
    """Almost eigenvalue ``j(j+1) + N(2j+1)/2 + 1/4``."""
    _check_N(N)
    _check_j(j)
    return Fraction(j * (j + 1)) + Fraction(N * (2 * j + 1), 2) + Fraction(1, 4)


def energy_level(N: int, j: int) -> Fraction:
    """Admissible energy ``E_{N,j} = lambda_hat / N^2``."""
    return lambda_hat(N, j) / (N * N)


def multiplicity_hat(N: int, j: int) -> int:
    _check_N(N)
    _check_j(j)
    return N + 2 * j + 1


def periodicity_P(N: int, k1: int) -> Fraction:
    """``P = k1/N - 1/2``: the value of ``I2`` making the phi-cycle periodic."""
    _check_N(N)
    return Fraction(k1, N) - B_HALF


def j_from_k(N: int, k1: int, k2: int) -> int:
    if k1 < 0:
        return -k1 + k2
    if k1 < N:
        return k2
    return k1 - N + k2


def k2_from_j(N: int, j: int, k1: int) -> int:
    """Inverse of :func:`j_from_k` in ``k2``."""
    if k1 < 0:
        return j + k1
    if k1 < N:
        return j
    return j - k1 + N


@dataclass(frozen=True)
class QuantizedLevel:
    N: int
    j: int
    k1_min: int
    k1_max: int
    E: Fraction
    lambda_hat: Fraction
    multiplicity: int
    maslov_theta_cycle: int = MASLOV_THETA_CYCLE

    @property
    def k1_range(self) -> range:
        return range(self.k1_min, self.k1_max + 1)

    def torus(self, k1: int) -> InvariantTorus:
        if k1 not in self.k1_range:
            raise ValidationError(f"k1={k1} outside [{self.k1_min}, {self.k1_max}]")
        return build_torus(float(self.E), float(periodicity_P(self.N, k1)), float(B_HALF))

    def sqrt_E_quarter(self) -> Fraction:
        """``sqrt(E + 1/4) = (j + 1/2)/N + 1/2``, exact."""
        return (self.j + B_HALF) / self.N + B_HALF


def make_level(N: int, j: int) -> QuantizedLevel:
    lam = lambda_hat(N, j)
    return QuantizedLevel(N=N, j=j, k1_min=-j, k1_max=N + j, E=lam / (N * N), lambda_hat=lam,
                          multiplicity=multiplicity_hat(N, j))


def solve_level(N: int, k1: int, k2: int) -> QuantizedLevel:
    """Level selected by the quantum numbers ``(k1, k2)``."""
    _check_N(N)
    if int(k2) != k2 or k2 < 0:
        raise ValidationError(f"k2 must be a non-negative integer, got {k2!r}")
    level = make_level(N, j_from_k(N, k1, k2))
    assert k1 in level.k1_range
    return level


def _dist_to_int(x: float) -> float:
    return abs(x - round(x))


def quantization_residual(torus: InvariantTorus, N: int) -> tuple[float, float]:
    """``(action_residual, periodicity_residual)``; both vanish iff the torus is quantized.

    ``periodicity_residual`` is the distance of ``N (P + B)`` to the integers and
    ``action_residual`` that of ``N J / (2 pi) - l/4`` with Maslov index ``l = 2``.
    """
    _check_N(N)
    if abs(torus.B - 0.5) > 1e-15:
        raise ValidationError("quantization conditions are implemented for B = 1/2")
    periodicity = _dist_to_int(N * (torus.P + torus.B))
    action = _dist_to_int(N * complete_integral(torus) / (2.0 * math.pi) - MASLOV_THETA_CYCLE / 4)
    return action, periodicity


def enumerate_levels(N: int, j_max: int) -> list[QuantizedLevel]:
    _check_N(N)
    _check_j(j_max)
    return sorted((make_level(N, j) for j in range(j_max + 1)), key=lambda lv: lv.lambda_hat)


def periodic_in_both_gauges(N: int, P: float, B: float, tol: float = 1e-12) -> bool:
    """Whether ``exp(i N tau)`` is 2 pi-periodic in phi in both the North and South gauges.

    Needs ``N (P + B)`` and ``N (P - B)`` integral, hence ``2 N B`` integral.
    """
    return _dist_to_int(N * (P + B)) < tol and _dist_to_int(N * (P - B)) < tol


def exists_periodic_P(N: int, B: float, tol: float = 1e-12) -> bool:
    """Some ``P`` is periodic in both gauges iff ``2 N B`` is an integer."""
    return _dist_to_int(2 * N * B) < tol
