import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from monopole_wkb.dynamics import hamiltonian
from monopole_wkb.errors import CausticError, EmptyTorusError, OutOfAnnulusError, ValidationError
from monopole_wkb.oracles import quad_action
from monopole_wkb.symbols import PhasePoint
from monopole_wkb.tori import (Branch, action_I_closed, action_I_quad, build_torus, caustic_cycles,
                               complete_integral, invariant_density, p_theta_branch, torus_from_point)

REF = build_torus(0.3125, 0.0, 0.5)


@st.composite
def tori(draw):
    B = draw(st.sampled_from([0.0, 0.5, 1.0, 1.5]))
    E = draw(st.floats(0.02, 4.0))
    frac = draw(st.floats(-0.98, 0.98))
    return build_torus(E, frac * math.sqrt(E + B * B), B)


def test_reference_torus():
    assert REF.Delta1 == pytest.approx(0.703125, abs=1e-15)
    assert REF.z1 == pytest.approx(-0.7453559924999299, abs=1e-12)
    assert REF.z2 == pytest.approx(0.7453559924999299, abs=1e-12)
    assert REF.theta2 == pytest.approx(0.729728, abs=1e-6)
    assert REF.theta1 == pytest.approx(2.411865, abs=1e-6)
    for th in (REF.theta1, REF.theta2):
        assert p_theta_branch(REF, th) == pytest.approx(0.0, abs=1e-12)


def test_geodesic_torus_and_empty_torus():
    t = build_torus(1.0, 0.0, 0.0)
    assert (t.z1, t.z2) == (-1.0, 1.0)
    with pytest.raises(EmptyTorusError):
        build_torus(0.1, 1.0, 0.5)
    with pytest.raises(ValidationError):
        build_torus(0.0, 0.0, 0.5)


def test_boundary_tori_touch_the_poles():
    assert build_torus(0.5, -0.5, 0.5).z2 == pytest.approx(1.0, abs=1e-15)
    assert build_torus(0.5, 0.5, 0.5).z1 == pytest.approx(-1.0, abs=1e-15)


@given(tori())
def test_torus_invariants(t):
    assert t.Delta1 == pytest.approx(t.b1 ** 2 - 4 * t.a1 * t.c1, rel=1e-12, abs=1e-12)
    assert t.Delta1 > 0
    assert -1.0 <= t.z1 <= t.z2 <= 1.0
    assert t.theta1 >= t.theta2
    for z in (t.z1, t.z2):
        assert t.a1 + t.b1 * z + t.c1 * z * z == pytest.approx(0.0, abs=1e-12)


def test_p_theta_examples():
    p, p_phi = p_theta_branch(REF, math.pi / 2, Branch.PLUS, with_p_phi=True)
    assert p == pytest.approx(0.5590169943749475, abs=1e-12)
    assert p_phi == pytest.approx(0.0, abs=1e-16)
    assert hamiltonian(PhasePoint(math.pi / 2, 0, p, p_phi)) == pytest.approx(0.3125, abs=1e-14)
    assert p_theta_branch(REF, math.pi / 2, "minus") == -p
    with pytest.raises(OutOfAnnulusError):
        p_theta_branch(REF, 0.5)
    with pytest.raises(ValidationError):
        Branch.parse("sideways")


def test_caustic_cycles():
    c1, c2 = caustic_cycles(REF)
    assert c1.which == "theta1" and c2.which == "theta2"
    assert c1.p_phi_on_cycle == pytest.approx(0.5 * REF.z1)


def test_complete_integral_examples():
    assert complete_integral(REF) == pytest.approx(math.pi / 2, abs=1e-15)
    assert complete_integral(build_torus(2.0, 0.0, 0.0)) == pytest.approx(2 * math.pi * math.sqrt(2.0))
    assert complete_integral(build_torus(1.0, 0.999999 * math.sqrt(1.25), 0.5)) < 1e-5


@given(tori())
def test_complete_integral_is_twice_the_action_difference(t):
    twice = 2 * (action_I_closed(t, t.theta1) - action_I_closed(t, t.theta2))
    assert twice == pytest.approx(complete_integral(t), abs=1e-9)


@given(tori())
def test_complete_integral_matches_plain_quadrature(t):
    # plain quadrature in theta cannot resolve the boundary layer of width ~|P -+ B| at a pole
    assume(min(abs(t.P + t.B), abs(t.P - t.B)) > 1e-2)
    assert 2 * quad_action(t.E, t.P, t.B, t.theta2, t.theta1) == pytest.approx(complete_integral(t), abs=1e-8)


@given(tori(), st.floats(0.0, 1.0))
def test_closed_form_matches_quadrature(t, frac):
    th = t.theta2 + frac * t.width
    closed = action_I_closed(t, th) - action_I_closed(t, t.theta2)
    assert closed == pytest.approx(action_I_quad(t, th), abs=1e-8)


def test_reference_torus_quadrature_interior():
    for th in np.linspace(REF.theta2 + 1e-3, REF.theta1 - 1e-3, 25):
        closed = action_I_closed(REF, th) - action_I_closed(REF, REF.theta2)
        assert closed == pytest.approx(action_I_quad(REF, th), abs=1e-8)
    assert action_I_quad(REF, REF.theta2) == 0.0


def test_symmetric_torus_quadrature():
    lo = action_I_quad(REF, math.pi / 2)
    hi = action_I_quad(REF, REF.theta1) - lo
    assert hi == pytest.approx(lo, abs=1e-12)


@given(tori(), st.floats(0.02, 0.98))
def test_closed_form_derivative_is_momentum(t, frac):
    th = t.theta2 + frac * t.width
    h = 1e-6
    assume(t.width > 1e-3)
    d = (action_I_closed(t, th + h) - action_I_closed(t, th - h)) / (2 * h)
    assert d == pytest.approx(p_theta_branch(t, th), abs=1e-6)


def test_action_closed_vectorized():
    th = np.linspace(REF.theta2, REF.theta1, 7)
    vals = action_I_closed(REF, th)
    assert vals.shape == (7,)
    assert np.all(np.diff(vals) > 0)


def test_invariant_density():
    assert invariant_density(REF, math.pi / 2) == pytest.approx(0.8944271909999159, abs=1e-12)
    with pytest.raises(CausticError):
        invariant_density(REF, REF.theta1)
    with pytest.raises(CausticError):
        invariant_density(REF, REF.theta2 + 1e-7)


def test_torus_from_point_round_trip():
    t = torus_from_point(1.0, 0.3, -0.2, 0.5)
    assert t.E == pytest.approx(0.09 + 0.04 / math.sin(1.0) ** 2)
    assert p_theta_branch(t, 1.0) == pytest.approx(0.3, abs=1e-12)
    assert "J" in t.summary()
