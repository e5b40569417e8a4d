import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from monopole_wkb.dynamics import (FlowConfig, analytic_period, closure_check, flow_rhs, hamiltonian, i2_at,
                                   integrate, max_drift)
from monopole_wkb.errors import ConvergenceError, PoleCrossingError, PoleProximityError, ValidationError
from monopole_wkb.symbols import PhasePoint
from monopole_wkb.tori import build_torus, invariant_density, p_theta_branch

# constant-latitude circle of the flow with B = 1/2: p_phi = -B sin^2(theta) / cos(theta)
CIRCLE = PhasePoint(math.pi / 3, 0.0, 0.0, -0.75)


def test_hamiltonian_examples():
    assert hamiltonian(PhasePoint(math.pi / 2, 0, 0.5590169943749475, 0)) == pytest.approx(0.3125, abs=1e-15)
    assert hamiltonian(PhasePoint(math.pi / 2, 0, 0, 1)) == 1.0
    assert hamiltonian(PhasePoint(1.0, 2.0, 0, 0)) == 0.0
    with pytest.raises(PoleProximityError):
        hamiltonian(PhasePoint(1e-10, 0, 0, 0))


def test_i2_examples():
    assert i2_at(PhasePoint(math.pi / 2, 0, 0.3, 0.0), 0.5) == pytest.approx(0.0, abs=1e-16)
    assert i2_at(PhasePoint(1e-9, 0, 0, 0.25 + 0.5), 0.5) == pytest.approx(0.25, abs=1e-12)


def test_flow_rhs_stationary_circle():
    assert flow_rhs(CIRCLE, 0.5) == pytest.approx([0.0, -2.0, 0.0, 0.0], abs=1e-15)
    assert flow_rhs(PhasePoint(1.0, 0.0, 0.0, 0.0), 0.5) == pytest.approx([0, 0, 0, 0], abs=0)


def _grad_h(pt):
    s, c = math.sin(pt.theta), math.cos(pt.theta)
    return np.array([-2 * c * pt.p_phi ** 2 / s ** 3, 0.0, 2 * pt.p_theta, 2 * pt.p_phi / s ** 2])


@given(st.floats(0.1, 3.0), st.floats(-2, 2), st.floats(-2, 2), st.sampled_from([0.0, 0.5, 1.0, 1.5]))
def test_flow_preserves_first_integrals_pointwise(theta, pth, pph, B):
    pt = PhasePoint(theta, 0.0, pth, pph)
    v = flow_rhs(pt, B)
    scale = 1.0 + abs(hamiltonian(pt)) / math.sin(theta)
    assert float(_grad_h(pt) @ v) == pytest.approx(0.0, abs=1e-12 * scale)
    grad_i2 = np.array([B * math.sin(theta), 0.0, 0.0, 1.0])
    assert float(grad_i2 @ v) == pytest.approx(0.0, abs=1e-12 * (1 + abs(B)))


def test_stationary_circle_stays_put():
    traj = integrate(CIRCLE, FlowConfig(t_max=10.0))
    assert max(abs(s.point.theta - math.pi / 3) for s in traj) < 1e-9
    res = closure_check(CIRCLE, FlowConfig(t_max=10.0))
    assert res.period == pytest.approx(2 * math.pi / 2.0, abs=1e-9)  # 2 pi / |phi'|
    assert res.return_error < 1e-9


def test_equator_geodesic_without_field():
    traj = integrate(PhasePoint(math.pi / 2, 0.0, 0.0, 1.0), FlowConfig(B=0.0, t_max=5.0), include_internal=False)
    for s in traj:
        assert s.point.theta == pytest.approx(math.pi / 2, abs=1e-12)
        assert s.point.phi == pytest.approx(2 * s.t, abs=1e-9)
    assert [s.on_grid for s in traj] == [True] * 101


def test_unit_energy_geodesic_period_is_pi():
    res = closure_check(PhasePoint(math.pi / 2, 0.0, 0.6, 0.8), FlowConfig(B=0.0, t_max=5.0))
    assert res.period == pytest.approx(math.pi, abs=1e-9)
    assert res.return_error < 1e-9


@pytest.mark.parametrize("seed", range(6))
def test_generic_orbits_close_with_the_action_period(seed):
    rng = np.random.default_rng(seed)
    B = 0.5
    while True:
        pt = PhasePoint(rng.uniform(0.5, 2.6), rng.uniform(0, 6), rng.normal(), rng.normal())
        t = build_torus(hamiltonian(pt), i2_at(pt, B), B)
        if t.theta2 > 0.1 and t.theta1 < math.pi - 0.1:
            break
    res = closure_check(pt, FlowConfig(B=B, t_max=20.0))
    assert res.return_error < 1e-6
    assert res.energy_drift < 1e-9 and res.i2_drift < 1e-9
    assert res.period == pytest.approx(analytic_period(t.E, B), rel=1e-9)


def test_integrate_reports_drift_and_lands_on_grid():
    pt = PhasePoint(1.2, 0.3, 0.4, -0.2)
    traj = integrate(pt, FlowConfig(t_max=3.0), t_eval=[0.0, 0.7, 1.9, 3.0], include_internal=True)
    grid = [s.t for s in traj if s.on_grid]
    assert grid == [0.0, 0.7, 1.9, 3.0]
    assert all(b.t > a.t for a, b in zip(traj, traj[1:]))
    dh, di = max_drift(traj)
    assert dh < 1e-10 and di < 1e-10


def test_reversibility():
    pt = PhasePoint(1.2, 0.3, 0.4, -0.2)
    fwd = integrate(pt, FlowConfig(t_max=2.0), include_internal=False)
    end = fwd[-1].point
    back = integrate(end, FlowConfig(t_max=-2.0), include_internal=False)
    one_way = max(max_drift(fwd))
    assert np.linalg.norm(back[-1].point.as_array() - pt.as_array()) < max(10 * one_way, 1e-10)


def test_pole_crossing_abort():
    # a meridian through the north pole
    with pytest.raises(PoleCrossingError):
        integrate(PhasePoint(0.5, 0.0, -1.0, 0.0), FlowConfig(B=0.0, t_max=2.0))


def test_config_and_closure_errors():
    with pytest.raises(ValidationError):
        FlowConfig(abs_tol=0.0)
    with pytest.raises(ValidationError):
        closure_check(PhasePoint(1.0, 0, 0, 0), FlowConfig())
    with pytest.raises(ConvergenceError):
        closure_check(PhasePoint(1.2, 0.0, 0.4, -0.2), FlowConfig(t_max=0.1))


def test_invariant_density_divergence_identity():
    # on the torus the flow is (theta', phi') = (2 p_theta, 2 p_phi / sin^2) and rho = 1/(2 p_theta):
    # d/dtheta (theta' rho) = d/dtheta 1 = 0 and phi' rho does not depend on phi.
    t = build_torus(0.3125, 0.0, 0.5)
    th = np.linspace(t.theta2 + 0.05, t.theta1 - 0.05, 50)
    flux = 2 * p_theta_branch(t, th) * invariant_density(t, th)
    assert np.max(np.abs(flux - 1.0)) < 1e-12
    for x in th[::10]:
        v = flow_rhs(PhasePoint(x, 0.0, p_theta_branch(t, x), t.P + t.B * math.cos(x)), t.B)
        assert v[0] * invariant_density(t, x) == pytest.approx(1.0, abs=1e-12)
