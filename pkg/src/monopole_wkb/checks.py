"""The verification suite behind ``monopole-wkb verify`` and the acceptance tests.

Each check returns a :class:`CheckResult` with the measured quantities; no
timings are recorded so that a report is byte-identical for a fixed seed.
``scale="quick"`` shrinks grid sizes for smoke runs; thresholds are never
relaxed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import canonical, dynamics, geometry, oracles, quantization, spectrum, symbols, tori

SCALES = ("full", "quick")
FAULTS = ("no-quarter",)


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        detail = ", ".join(f"{k}={_fmt(v)}" for k, v in self.metrics.items())
        return f"[{status}] {self.criterion:2d} {self.name}: {detail}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".3g")
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return str(v)


@dataclass(frozen=True)
class Context:
    seed: int = 0
    scale: str = "full"
    faults: frozenset = frozenset()

    def rng(self, salt: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])

    def lambda_hat(self, N: int, j: int) -> Fraction:
        lam = quantization.lambda_hat(N, j)
        return lam - Fraction(1, 4) if "no-quarter" in self.faults else lam


def check_delta(ctx: Context) -> CheckResult:
    worst = 0.0
    for N in range(1, 65):
        for j in range(21):
            d = float(ctx.lambda_hat(N, j)) - float(spectrum.lambda_exact(N, j))
            worst = max(worst, abs(d - 0.25))
    return CheckResult(1, "correction term lambda_hat - lambda = 1/4", worst < 1e-12, {"max_error": worst})


def check_multiplicity(ctx: Context) -> CheckResult:
    bad = 0
    for N in range(1, 65):
        for j in range(21):
            expected = N + 2 * j + 1
            # count the quantum numbers (k1, k2 >= 0) that land on level j
            pairs = sum(1 for k1 in range(-j - 2, N + j + 3) if quantization.k2_from_j(N, j, k1) >= 0
                        and quantization.j_from_k(N, k1, quantization.k2_from_j(N, j, k1)) == j)
            if not (quantization.multiplicity_hat(N, j) == spectrum.multiplicity_exact(N, j) == expected == pairs):
                bad += 1
    return CheckResult(2, "multiplicity N + 2j + 1", bad == 0, {"mismatches": bad})


def check_spectral_oracle(ctx: Context) -> CheckResult:
    n = 4000 if ctx.scale == "full" else 1000
    lines = spectrum.numeric_table(2, 3, spectrum.RadialGrid(n), m_range=range(-4, 7))
    rel = [ln.numeric_error / ln.lambda_exact for ln in lines]
    sizes = [ln.mult_numeric for ln in lines]
    # grid convergence of the m = 0 radial problem (carries j = 0, 1, 2)
    ns = (250, 500, 1000, 2000)
    errs = np.array([[abs(v - float(spectrum.lambda_exact(2, j)))
                      for j, v in enumerate(spectrum.lowest_eigs(spectrum.radial_matrix(2, 0.5, 0, spectrum.RadialGrid(k)), 3))]
                     for k in ns])
    orders = [o for col in errs.T for o in spectrum.convergence_order(list(col))]
    passed = max(rel) < 1e-3 and sizes == [3, 5, 7, 9] and all(abs(o - 2.0) <= 0.2 for o in orders)
    return CheckResult(3, "finite-difference spectrum N=2", passed,
                       {"n": n, "max_rel_error": max(rel), "cluster_sizes": sizes,
                        "min_order": min(orders), "max_order": max(orders)})


def _random_torus(rng: np.random.Generator) -> tori.InvariantTorus:
    B = float(rng.choice([0.0, 0.5, 1.0, 1.5]))
    E = float(rng.uniform(0.05, 3.0))
    pmax = math.sqrt(E + B * B)
    return tori.build_torus(E, float(rng.uniform(-0.95, 0.95)) * pmax, B)


def check_action(ctx: Context) -> CheckResult:
    rng = ctx.rng(4)
    worst_quad = worst_deriv = 0.0
    h = 1e-6
    for _ in range(20):
        t = _random_torus(rng)
        base = tori.action_I_closed(t, t.theta2)
        for th in rng.uniform(t.theta2, t.theta1, 100):
            worst_quad = max(worst_quad, abs(tori.action_I_closed(t, th) - base - tori.action_I_quad(t, th)))
        w = t.width
        for th in rng.uniform(t.theta2 + 0.01 * w, t.theta1 - 0.01 * w, 20):
            d = (tori.action_I_closed(t, th + h) - tori.action_I_closed(t, th - h)) / (2 * h)
            worst_deriv = max(worst_deriv, abs(d - tori.p_theta_branch(t, th)))
    return CheckResult(4, "closed-form action vs quadrature", worst_quad < 1e-8 and worst_deriv < 1e-6,
                       {"max_quad_diff": worst_quad, "max_derivative_diff": worst_deriv})


def check_complete_integral(ctx: Context) -> CheckResult:
    t = tori.build_torus(0.3125, 0.0, 0.5)
    J = tori.complete_integral(t)
    j_err = abs(J - math.pi / 2)
    twice_i = 2 * (tori.action_I_closed(t, t.theta1) - tori.action_I_closed(t, t.theta2))
    n10 = 10 * J / (2 * math.pi) - 0.5
    n10_err = abs(n10 - round(n10))
    worst = 0.0
    count = 0
    for N in range(1, 11):
        for j in range(5):
            level = quantization.make_level(N, j)
            for k1 in level.k1_range:
                worst = max(worst, *quantization.quantization_residual(level.torus(k1), N))
            count += 1
    passed = j_err < 1e-9 and n10_err < 1e-9 and abs(twice_i - J) < 1e-9 and worst < 1e-9 and count == 50
    return CheckResult(5, "complete integral and quantization", passed,
                       {"J_error": j_err, "twice_I_minus_J": abs(twice_i - J), "N10_residual": n10_err,
                        "levels": count, "max_level_residual": worst})


def _random_phase_point(rng: np.random.Generator, B: float) -> symbols.PhasePoint:
    while True:
        th = float(rng.uniform(0.3, math.pi - 0.3))
        pt = symbols.PhasePoint(th, float(rng.uniform(0, 2 * math.pi)), float(rng.normal()), float(rng.normal()))
        if dynamics.hamiltonian(pt) < 0.05:
            continue
        t = tori.torus_from_point(pt.theta, pt.p_theta, pt.p_phi, B)
        if t.theta2 > 0.1 and t.theta1 < math.pi - 0.1:
            return pt


def check_conservation(ctx: Context) -> CheckResult:
    rng = ctx.rng(6)
    B = 0.5
    worst_ret = worst_e = worst_i = 0.0
    for _ in range(20):
        pt = _random_phase_point(rng, B)
        cfg = dynamics.FlowConfig(B=B, t_max=2.5 * dynamics.analytic_period(dynamics.hamiltonian(pt), B) + 1.0)
        res = dynamics.closure_check(pt, cfg)
        worst_ret = max(worst_ret, res.return_error)
        worst_e = max(worst_e, res.energy_drift)
        worst_i = max(worst_i, res.i2_drift)
    passed = worst_ret < 1e-6 and worst_e < 1e-9 and worst_i < 1e-9
    return CheckResult(6, "flow conservation and closure", passed,
                       {"max_return_error": worst_ret, "max_H_drift": worst_e, "max_I2_drift": worst_i})


def check_symbols(ctx: Context) -> CheckResult:
    rng = ctx.rng(7)
    worst_closed = worst_fd = worst_pull = 0.0
    for i in range(1000):
        th = float(rng.uniform(0.05, math.pi - 0.05))
        pt = symbols.PhasePoint(th, float(rng.uniform(0, 2 * math.pi)), float(rng.normal()), float(rng.normal()))
        bundle = geometry.BundleData(0.5 * int(rng.integers(1, 5)), int(rng.integers(1, 9)))
        patch = geometry.GaugePatch.NORTH if i % 2 == 0 else geometry.GaugePatch.SOUTH
        worst_closed = max(worst_closed, abs(symbols.gamma0_at(pt, patch, bundle)))
        # relative to the size of the two terms that cancel
        scale = 1.0 + abs(pt.p_theta / math.tan(th))
        worst_fd = max(worst_fd, abs(oracles.fd_gamma0(pt, patch, bundle)) / scale)
        if i < 200:
            u, v = rng.normal(size=4), rng.normal(size=4)
            worst_pull = max(worst_pull, abs(oracles.fd_pullback_defect(pt, patch, bundle, u, v, h=1e-6)))
    # the finite-difference oracle is held to the finite-difference tolerance
    passed = worst_closed < 1e-9 and worst_fd < 1e-6 and worst_pull < 1e-6
    return CheckResult(7, "transport coefficient and symplectomorphism", passed,
                       {"max_gamma0": worst_closed, "max_gamma0_fd_rel": worst_fd, "max_pullback_defect": worst_pull})


def check_gauge(ctx: Context) -> CheckResult:
    rng = ctx.rng(8)
    worst_a = worst_hol_ode = worst_hol_flux = 0.0
    for _ in range(10):
        bundle = geometry.BundleData(0.5 * int(rng.integers(1, 4)), int(rng.integers(1, 4)))
        for th in rng.uniform(0.05, math.pi - 0.05, 10):
            diff = float(geometry.potential_at("north", bundle, th) - geometry.potential_at("south", bundle, th))
            phi, step = float(rng.uniform(0, 2 * math.pi)), 0.25 / bundle.B_eff
            g = geometry.transition_at(bundle, phi + step) / geometry.transition_at(bundle, phi)
            rate = math.atan2(g.imag, g.real) / step
            worst_a = max(worst_a, abs(diff - rate), abs(diff - geometry.transition_log_derivative(bundle)))
        for th in rng.uniform(0.05, math.pi - 0.05, 2):
            hol = geometry.holonomy(geometry.LoopPath.latitude(float(th), n=64), bundle)
            ode = oracles.parallel_transport_holonomy(lambda t: th, lambda t: 2 * math.pi * t,
                                                      lambda t: 2 * math.pi, bundle)
            flux = complex(np.exp(1j * oracles.cap_flux_quadrature(float(th), bundle)))
            worst_hol_ode = max(worst_hol_ode, abs(hol - ode))
            worst_hol_flux = max(worst_hol_flux, abs(hol - flux))
    passed = worst_a < 1e-12 and worst_hol_ode < 1e-8 and worst_hol_flux < 1e-8
    return CheckResult(8, "gauge transition and holonomy", passed,
                       {"max_potential_gap": worst_a, "max_holonomy_vs_ode": worst_hol_ode,
                        "max_holonomy_vs_flux": worst_hol_flux})


RESIDUAL_NS = (8, 16, 32, 64)


def check_quasimode(ctx: Context) -> CheckResult:
    n_theta = 4096 if ctx.scale == "full" else 2048
    rows = canonical.residual_scan(RESIDUAL_NS, 2, n_theta=n_theta)
    plateau = [r.plateau_residual for r in rows]
    glob = [r.global_residual for r in rows]
    s_plateau = canonical.loglog_slope(RESIDUAL_NS, plateau)
    s_global = canonical.loglog_slope(RESIDUAL_NS, glob)
    detuned = canonical.residual_scan((64,), 2, n_theta=n_theta, shift=1.0)[0].plateau_residual
    ratio = detuned / plateau[-1]
    passed = -0.3 <= s_plateau <= 0.3 and s_global <= 1.1 and ratio >= 10.0
    return CheckResult(9, "quasimode residual scaling", passed,
                       {"plateau": plateau, "global": glob, "plateau_slope": s_plateau,
                        "global_slope": s_global, "detuned_ratio": ratio})


def check_sections(ctx: Context) -> CheckResult:
    rng = ctx.rng(10)
    cases = [(N, 2, (N + 1) // 2) for N in RESIDUAL_NS]
    for _ in range(6):
        N, j = int(rng.integers(1, 33)), int(rng.integers(0, 6))
        cases.append((N, j, int(rng.integers(-j + 1, N + j))))
    worst = 0.0
    single_mode = True
    for N, j, k1 in cases:
        sec = canonical.almost_eigenfunction(quantization.make_level(N, j), k1, n_theta=512)
        worst = max(worst, sec.gauge_defect())
        coeff = np.abs(np.fft.fft(sec.values_north, axis=1)).sum(axis=0)
        single_mode &= int(np.count_nonzero(coeff > 1e-9 * coeff.max())) == 1
    return CheckResult(10, "gauge consistency of sections", worst < 1e-12 and single_mode,
                       {"sections": len(cases), "max_gauge_defect": worst, "single_fourier_mode": single_mode})


CHECKS: dict[int, Callable[[Context], CheckResult]] = {
    1: check_delta, 2: check_multiplicity, 3: check_spectral_oracle, 4: check_action,
    5: check_complete_integral, 6: check_conservation, 7: check_symbols, 8: check_gauge,
    9: check_quasimode, 10: check_sections,
}


def run_checks(seed: int = 0, scale: str = "full", only=None, faults=()) -> list[CheckResult]:
    ctx = Context(seed=seed, scale=scale, faults=frozenset(faults))
    keys = sorted(CHECKS) if not only else sorted(set(only))
    return [CHECKS[k](ctx) for k in keys]


def report(results: list[CheckResult], seed: int, scale: str) -> dict:
    return {
        "seed": seed, "scale": scale, "passed": all(r.passed for r in results),
        "failed": [r.name for r in results if not r.passed],
        "checks": [{"criterion": r.criterion, "name": r.name, "passed": r.passed, "metrics": r.metrics}
                   for r in results],
    }
