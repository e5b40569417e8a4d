import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from monopole_wkb.errors import DomainError, OpenLoopError, PoleCrossingError, PoleProximityError, ValidationError
from monopole_wkb.geometry import (BundleData, GaugePatch, LoopPath, cap_flux, holonomy, metric_at, normalize_phi,
                                   potential_at, transition_at, transition_log_derivative)
from monopole_wkb.oracles import cap_flux_quadrature, parallel_transport_holonomy

HALF = BundleData(0.5, 1)


def test_metric_samples():
    m = metric_at(math.pi / 2)
    assert (m.g_thth, m.g_phph, m.sqrt_det) == (1.0, 1.0, 1.0)
    m = metric_at(math.pi / 3)
    assert m.g_thth == 1.0
    assert m.g_phph == pytest.approx(0.75, abs=1e-15)
    assert m.sqrt_det == pytest.approx(0.8660254037844386, abs=1e-15)
    assert m.sqrt_det ** 2 == pytest.approx(m.g_thth * m.g_phph, abs=1e-15)


@pytest.mark.parametrize("theta", [0.0, 1e-9, math.pi, math.pi - 1e-9, -0.1])
def test_metric_pole_guard(theta):
    with pytest.raises(PoleProximityError):
        metric_at(theta)


def test_metric_pole_guard_configurable():
    assert metric_at(1e-9, eps_pole=1e-10).g_thth == 1.0


def test_potentials():
    assert potential_at(GaugePatch.NORTH, HALF, math.pi / 2) == pytest.approx(0.5, abs=1e-15)
    assert potential_at(GaugePatch.SOUTH, HALF, math.pi / 2) == pytest.approx(-0.5, abs=1e-15)
    assert potential_at("north", BundleData(1.5, 3), 0.0) == 0.0
    with pytest.raises(DomainError):
        potential_at(GaugePatch.NORTH, HALF, math.pi)
    with pytest.raises(DomainError):
        potential_at(GaugePatch.SOUTH, HALF, 0.0)


def test_bundle_validation():
    b = BundleData(1.5, 4)
    assert b.B_eff == 6.0
    assert b.chern_number == 12
    with pytest.raises(ValidationError):
        BundleData(0.3, 1)
    with pytest.raises(ValidationError):
        BundleData(0.5, 0)


def test_transition_values():
    assert transition_at(HALF, 0.0) == pytest.approx(1 + 0j, abs=1e-15)
    assert transition_at(HALF, math.pi) == pytest.approx(-1 + 0j, abs=1e-15)
    assert transition_at(BundleData(0.5, 2), math.pi / 2) == pytest.approx(-1 + 0j, abs=1e-15)
    assert abs(transition_at(BundleData(1.0, 3), 1.234)) == pytest.approx(1.0, abs=1e-15)


@given(st.floats(1e-3, math.pi - 1e-3), st.integers(1, 4), st.integers(1, 6))
def test_gauge_compatibility(theta, twice_b, N):
    b = BundleData(twice_b / 2, N)
    gap = potential_at("north", b, theta) - potential_at("south", b, theta)
    assert gap == pytest.approx(transition_log_derivative(b), abs=1e-12)
    assert gap == pytest.approx(2 * N * b.B, abs=1e-12)


def test_normalize_phi():
    assert normalize_phi(-0.5) == pytest.approx(2 * math.pi - 0.5)
    assert normalize_phi(2 * math.pi) == 0.0


def test_holonomy_examples():
    assert holonomy(LoopPath.latitude(math.pi / 2), HALF) == pytest.approx(-1 + 0j, abs=1e-12)
    assert holonomy(LoopPath.latitude(1e-6), HALF) == pytest.approx(1 + 0j, abs=1e-10)
    assert holonomy(LoopPath.latitude(2 * math.pi / 3), HALF) == pytest.approx(cmath.exp(1.5j * math.pi), abs=1e-12)


@given(st.floats(0.05, math.pi - 0.05), st.integers(1, 3), st.integers(1, 3))
def test_holonomy_matches_flux_and_transport(theta, twice_b, N):
    b = BundleData(twice_b / 2, N)
    h = holonomy(LoopPath.latitude(theta, n=32), b)
    assert h == pytest.approx(cmath.exp(1j * cap_flux_quadrature(theta, b)), abs=1e-8)
    assert h == pytest.approx(cmath.exp(1j * cap_flux(theta, b)), abs=1e-10)


def test_holonomy_vs_parallel_transport_ode():
    for theta in (0.4, 1.3, 2.2):
        ode = parallel_transport_holonomy(lambda t: theta, lambda t: 2 * math.pi * t, lambda t: 2 * math.pi,
                                          BundleData(0.5, 3))
        assert holonomy(LoopPath.latitude(theta), BundleData(0.5, 3)) == pytest.approx(ode, abs=1e-8)


def test_holonomy_orientation_and_total_flux():
    th = 1.0
    fwd = LoopPath.latitude(th)
    back = LoopPath.from_arrays([p[0] for p in fwd.samples][::-1], [p[1] for p in fwd.samples][::-1])
    assert holonomy(back, HALF) == pytest.approx(holonomy(fwd, HALF).conjugate(), abs=1e-12)
    # near the south pole the enclosed flux tends to 2 pi times an integer
    assert holonomy(LoopPath.latitude(math.pi - 1e-6), HALF) == pytest.approx(1 + 0j, abs=1e-9)


def test_holonomy_of_tilted_loop_crossing_the_equator():
    # a loop that wanders across the patch boundary several times
    t = np.linspace(0, 2 * math.pi, 2001)
    theta = math.pi / 2 + 0.4 * np.sin(3 * t)
    phi = t
    b = BundleData(0.5, 2)
    hol = holonomy(LoopPath.from_arrays(theta, phi), b)
    ode = parallel_transport_holonomy(lambda s: math.pi / 2 + 0.4 * math.sin(6 * math.pi * s),
                                      lambda s: 2 * math.pi * s, lambda s: 2 * math.pi, b)
    assert abs(hol) == pytest.approx(1.0, abs=1e-14)
    assert hol == pytest.approx(ode, abs=1e-4)  # trapezoid rule on a curved path is second order


def test_holonomy_errors():
    with pytest.raises(OpenLoopError):
        holonomy(LoopPath.from_arrays([1.0, 1.1, 1.2], [0.0, 0.5, 1.0]), HALF)
    with pytest.raises(OpenLoopError):
        holonomy(LoopPath(LoopPath.latitude(1.0).samples, closed=False), HALF)
    with pytest.raises(PoleCrossingError):
        holonomy(LoopPath.from_arrays([1.0, 0.0, 1.0, 1.0], [0.0, 1.0, 2.0, 2 * math.pi]), HALF)


def test_patch_parse():
    assert GaugePatch.parse("South") is GaugePatch.SOUTH
    with pytest.raises(ValidationError):
        GaugePatch.parse("east")
    assert GaugePatch.NORTH.contains(0.1) and not GaugePatch.NORTH.contains(math.pi)
