"""Searches, scans and curve fits built on the sector fast path."""

import math

import numpy as np
import pytest
from conftest import reference_lcg, reference_zchg

from rydgate.atom import ExcitationKind, default_model
from rydgate.dynamics import IntegratorConfig
from rydgate.optimize import (
    LCG_DOMAIN,
    AdiabaticGateObjective,
    DeConfig,
    DeResult,
    FitResult,
    SearchDomain,
    SpeedupPoint,
    UnreachableTargetError,
    differential_evolution,
    feasible,
    fidelity_from_returns,
    find_phase_shifts,
    fit_logistic,
    fit_power_law,
    generalized_area,
    min_omega_search,
    min_time_search,
    params_to_lcg,
    params_to_zchg,
    pulse_area,
    r_squared,
    resource_scan,
    search_adiabatic_parameters,
    sequence_fidelity,
    sequence_operators,
)
from rydgate.pulses import (
    LcgParams,
    build_sequence,
    double_sequence,
    lcg_eval,
    tqd_dipole,
)

TWO_PI = 2.0 * math.pi

SPHERE_TARGET = np.array([0.3, -1.2, 2.0, 0.5])
SPHERE_DOMAIN = SearchDomain(
    names=("a", "b", "c", "d"),
    bounds=((-5.0, 5.0),) * 4,
)


def _sphere(x):
    return float(np.sum((np.asarray(x) - SPHERE_TARGET) ** 2))


def test_feasible_thresholds_are_strict():
    assert feasible(0.999, ExcitationKind.DIPOLE)
    assert not feasible(0.9989, ExcitationKind.DIPOLE)
    assert feasible(0.99, ExcitationKind.QUADRUPOLE)
    assert not feasible(0.989, ExcitationKind.QUADRUPOLE)
    with pytest.raises(ValueError):
        feasible(1.2, ExcitationKind.DIPOLE)
    with pytest.raises(ValueError):
        feasible(-0.1, ExcitationKind.QUADRUPOLE)


def test_generalized_area_constant_pair():
    t = np.linspace(0.0, 2.0, 501)
    omega = np.full_like(t, 3.0)
    delta = np.full_like(t, 4.0)
    assert generalized_area(omega, delta, t) == pytest.approx(10.0, rel=1e-12)


def test_pulse_area_adiabatic_matches_direct_integral():
    base = reference_lcg(0.24)
    sched = double_sequence(ExcitationKind.DIPOLE, base, synthesis="adiabatic")
    t = np.linspace(0.0, 0.24, 20001)
    omega, delta, _, _ = lcg_eval(base, t)
    expected = 2.0 * np.trapezoid(np.hypot(omega, delta), t) / TWO_PI
    assert pulse_area(sched) == pytest.approx(expected, rel=1e-6)


def test_pulse_area_tqd_matches_direct_integral():
    base = reference_lcg(0.03)
    sched = build_sequence(ExcitationKind.DIPOLE, base, 0.4 * math.pi, 1.9 * math.pi)
    t = np.linspace(0.0, 0.03, 20001)
    omega, delta = tqd_dipole(base, t)
    expected = 4.0 * np.trapezoid(np.hypot(omega, delta), t) / TWO_PI
    assert pulse_area(sched) == pytest.approx(expected, rel=1e-6)


def test_pulse_area_reference_values():
    arp = double_sequence(
        ExcitationKind.DIPOLE, reference_lcg(0.24), synthesis="adiabatic"
    )
    tqd = build_sequence(
        ExcitationKind.DIPOLE, reference_lcg(0.03), 0.4 * math.pi, 1.9 * math.pi
    )
    stirap = double_sequence(
        ExcitationKind.QUADRUPOLE, reference_zchg(0.81), synthesis="adiabatic"
    )
    tqd_q = build_sequence(
        ExcitationKind.QUADRUPOLE,
        reference_zchg(0.06),
        0.4636 * math.pi,
        1.9638 * math.pi,
    )
    assert pulse_area(arp) == pytest.approx(14.8639, abs=2e-3)
    assert pulse_area(tqd) == pytest.approx(4.5805, abs=2e-3)
    assert pulse_area(stirap) == pytest.approx(21.7597, abs=2e-3)
    assert pulse_area(tqd_q) == pytest.approx(4.9231, abs=2e-3)


def test_pulse_area_even_point_count_bumped():
    sched = double_sequence(
        ExcitationKind.DIPOLE, reference_lcg(0.1), synthesis="adiabatic"
    )
    assert pulse_area(sched, points_per_segment=2000) == pulse_area(
        sched, points_per_segment=2001
    )


def test_fidelity_from_returns_perfect_gate():
    for phi in (0.0, 0.7, math.pi, 2.3):
        c01 = np.exp(1j * phi)
        c11 = np.exp(1j * (2.0 * phi + math.pi))
        assert fidelity_from_returns(c01, c11) == pytest.approx(1.0, abs=1e-12)
    assert fidelity_from_returns(-1.0, -1.0, cz_pi=True) == pytest.approx(
        1.0, abs=1e-12
    )


def test_fidelity_from_returns_identity_scores_quarter():
    assert fidelity_from_returns(1.0, 1.0) == pytest.approx(0.25, abs=1e-12)
    assert fidelity_from_returns(1.0, 1.0, cz_pi=True) == pytest.approx(
        0.25, abs=1e-12
    )


def test_fidelity_from_returns_broadcasts():
    phi = np.linspace(0.0, 2.0 * math.pi, 7)
    f = fidelity_from_returns(np.exp(1j * phi), np.exp(1j * (2 * phi + math.pi)))
    assert f.shape == (7,)
    assert np.allclose(f, 1.0, atol=1e-12)


def test_sequence_amplitudes_broadcast_and_arity(dipole_model):
    base = reference_lcg(0.005)
    sched = build_sequence(ExcitationKind.DIPOLE, base, 0.0, 0.0)
    ops = sequence_operators(dipole_model, sched, IntegratorConfig(step=1e-4))
    with pytest.raises(ValueError):
        ops.amplitudes([0.0, 0.0, 0.0])

    pr = np.linspace(0.0, TWO_PI, 4, endpoint=False)[:, None]
    pb = np.linspace(0.0, TWO_PI, 3, endpoint=False)[None, :]
    c01, c11 = ops.amplitudes([0.0, pr, pb, pr + pb])
    assert c01.shape == (4, 3)
    assert c11.shape == (4, 3)
    s01, s11 = ops.amplitudes([0.0, pr[2, 0], pb[0, 1], pr[2, 0] + pb[0, 1]])
    assert complex(s01) == pytest.approx(complex(c01[2, 1]), abs=1e-12)
    assert complex(s11) == pytest.approx(complex(c11[2, 1]), abs=1e-12)


def test_find_phase_shifts_flat_landscape(dipole_model):
    base = LcgParams(duration=0.01, omega0=0.0, delta0=TWO_PI * 10.0, tau=0.003)
    res = find_phase_shifts(
        dipole_model,
        base,
        synthesis="adiabatic",
        resolution=math.pi / 10,
        config=IntegratorConfig(step=1e-4),
        keep_grid=True,
    )
    assert res.flat
    assert res.phi_r == 0.0
    assert res.phi_big == 0.0
    assert res.grid.shape == (20, 20)
    assert res.axis.shape == (20,)
    assert float(np.ptp(res.grid)) <= 1e-9
    assert res.fidelity == pytest.approx(float(res.grid.max()))


def test_find_phase_shifts_dipole_sequence(dipole_model):
    base = reference_lcg(0.015)
    cfg = IntegratorConfig(step=5e-5)
    res = find_phase_shifts(
        dipole_model, base, resolution=math.pi / 20, config=cfg, keep_grid=True
    )
    assert not res.flat
    assert 0.0 <= res.phi_r < TWO_PI
    assert 0.0 <= res.phi_big < TWO_PI
    assert res.fidelity >= float(res.grid.max()) - 1e-12
    rebuilt = build_sequence(ExcitationKind.DIPOLE, base, res.phi_r, res.phi_big)
    assert sequence_fidelity(dipole_model, rebuilt, cfg) == pytest.approx(
        res.fidelity, abs=1e-9
    )


def test_find_phase_shifts_refine_only_improves(dipole_model):
    base = reference_lcg(0.015)
    cfg = IntegratorConfig(step=1e-4)
    coarse = find_phase_shifts(
        dipole_model, base, resolution=math.pi / 10, refine=False, config=cfg
    )
    fine = find_phase_shifts(
        dipole_model, base, resolution=math.pi / 10, refine=True, config=cfg
    )
    assert not coarse.flat
    assert fine.fidelity >= coarse.fidelity


def test_search_domain_accessors_and_validation():
    dom = SearchDomain(names=("a", "b"), bounds=((0.0, 1.0), (2.0, 5.0)))
    assert dom.dim == 2
    assert np.array_equal(dom.lower, [0.0, 2.0])
    assert np.array_equal(dom.upper, [1.0, 5.0])
    assert np.array_equal(dom.clip(np.array([-1.0, 10.0])), [0.0, 5.0])
    draws = dom.sample(np.random.default_rng(0), 100)
    assert draws.shape == (100, 2)
    assert np.all(draws >= dom.lower) and np.all(draws <= dom.upper)
    with pytest.raises(ValueError):
        SearchDomain(names=("a",), bounds=((0.0, 1.0), (2.0, 5.0)))
    with pytest.raises(ValueError):
        SearchDomain(names=("a",), bounds=((1.0, 1.0),))


def test_de_config_validation():
    with pytest.raises(ValueError):
        DeConfig(population_size=3)
    with pytest.raises(ValueError):
        DeConfig(differential_weight=2.5)
    with pytest.raises(ValueError):
        DeConfig(crossover_rate=1.0)
    with pytest.raises(ValueError):
        DeConfig(max_generations=0)


def test_differential_evolution_minimizes_sphere():
    res = differential_evolution(
        _sphere, SPHERE_DOMAIN, DeConfig(seed=3, max_generations=200)
    )
    assert res.value < 1e-6
    assert np.allclose(res.x, SPHERE_TARGET, atol=1e-2)
    assert len(res.history) == res.n_generations + 1
    assert np.all(np.diff(res.history) <= 0.0)
    assert res.n_evaluations == (res.n_generations + 1) * 60


def test_differential_evolution_deterministic_across_workers():
    config = DeConfig(seed=11, max_generations=3, population_size=8)
    first = differential_evolution(_sphere, SPHERE_DOMAIN, config)
    repeat = differential_evolution(_sphere, SPHERE_DOMAIN, config)
    fanned = differential_evolution(_sphere, SPHERE_DOMAIN, config, workers=2)
    assert np.array_equal(first.x, repeat.x)
    assert first.value == repeat.value
    assert np.array_equal(first.x, fanned.x)
    assert first.value == fanned.value


def test_differential_evolution_early_stop():
    res = differential_evolution(
        _sphere,
        SPHERE_DOMAIN,
        DeConfig(seed=3, max_generations=200),
        early_stop=lambda v: v < 0.5,
    )
    assert res.stopped_early
    assert res.value < 0.5
    assert res.n_generations < 200


def test_domain_vector_converters():
    lcg = params_to_lcg([0.2, 20.0, 40.0, 0.25])
    assert lcg.duration == 0.2
    assert lcg.omega0 == pytest.approx(TWO_PI * 20.0)
    assert lcg.delta0 == pytest.approx(TWO_PI * 40.0)
    assert lcg.tau == pytest.approx(0.05)
    zchg = params_to_zchg([0.5, 100.0, 200.0, 1000.0, 0.3, 0.25])
    assert zchg.duration == 0.5
    assert zchg.omega_b0 == pytest.approx(TWO_PI * 100.0)
    assert zchg.omega_r0 == pytest.approx(TWO_PI * 200.0)
    assert zchg.delta_b == pytest.approx(TWO_PI * 1000.0)
    assert zchg.tau_b == pytest.approx(0.15)
    assert zchg.tau_r == pytest.approx(0.125)


def test_adiabatic_objective_reference_point():
    obj = AdiabaticGateObjective(
        model=default_model(ExcitationKind.DIPOLE), step=2e-5
    )
    val = obj((0.24, 24.92, 49.55, 0.266))
    assert val == pytest.approx(-0.99935, abs=5e-4)


def test_search_adiabatic_parameters_smoke():
    res = search_adiabatic_parameters(
        ExcitationKind.DIPOLE,
        DeConfig(seed=0, max_generations=1, population_size=4),
        step=1e-4,
    )
    assert isinstance(res, DeResult)
    assert np.all(res.x >= LCG_DOMAIN.lower) and np.all(res.x <= LCG_DOMAIN.upper)
    assert -1.0 <= res.value <= 0.0
    assert res.n_evaluations >= 4


def test_min_omega_search_synthesized():
    res = min_omega_search(
        0.12,
        0.99,
        synthesis="tqd",
        coarse=8,
        tol=TWO_PI * 0.5,
        phase_resolution=math.pi / 25,
        config=IntegratorConfig(step=5e-5),
    )
    assert res.t_gate == 0.12
    assert res.synthesis == "tqd"
    assert res.fidelity > 0.99
    assert TWO_PI * 1.0 <= res.omega0 <= TWO_PI * 120.0
    assert res.omega_max >= res.omega0 - 1e-9
    assert res.phi_r is not None and res.phi_big is not None


def test_min_omega_search_adiabatic():
    res = min_omega_search(
        0.48,
        0.99,
        synthesis="adiabatic",
        coarse=8,
        tol=TWO_PI * 0.5,
        config=IntegratorConfig(step=5e-5),
    )
    assert res.synthesis == "adiabatic"
    assert res.fidelity > 0.99
    assert res.omega_max == res.omega0
    assert res.phi_r is None and res.phi_big is None


def test_min_omega_search_guards(quad_model):
    with pytest.raises(ValueError):
        min_omega_search(0.12, 0.99, model=quad_model)
    with pytest.raises(ValueError):
        min_omega_search(0.12, 0.99, synthesis="bogus")
    with pytest.raises(UnreachableTargetError):
        min_omega_search(
            0.12,
            0.989,
            synthesis="adiabatic",
            omega_bounds=(TWO_PI * 0.5, TWO_PI * 2.0),
            coarse=3,
            config=IntegratorConfig(step=1e-4),
        )


def test_min_time_search_meets_budget():
    t_gate, best = min_time_search(
        TWO_PI * 30.0,
        0.99,
        synthesis="tqd",
        t_bounds=(0.05, 0.3),
        coarse=5,
        rel_tol=0.05,
        phase_resolution=math.pi / 25,
        config=IntegratorConfig(step=5e-5),
    )
    assert 0.05 <= t_gate <= 0.3
    assert best.fidelity > 0.99
    assert best.omega_max <= TWO_PI * 30.0 * 1.02


def test_min_time_search_guards(quad_model):
    with pytest.raises(ValueError):
        min_time_search(TWO_PI * 30.0, model=quad_model)
    with pytest.raises(UnreachableTargetError):
        min_time_search(
            TWO_PI * 20.0,
            1.0 - 1e-9,
            t_bounds=(0.04, 0.1),
            coarse=3,
            phase_resolution=math.pi / 12,
            config=IntegratorConfig(step=1e-4),
        )


def test_resource_scan_results_and_workers():
    kwargs = dict(
        synthesis="tqd",
        target_f0=0.99,
        coarse=6,
        tol=TWO_PI * 1.0,
        phase_resolution=math.pi / 25,
        config=IntegratorConfig(step=5e-5),
    )
    serial = resource_scan([0.12, 0.2], **kwargs)
    assert all(r is not None for r in serial)
    assert serial[1].omega_max <= serial[0].omega_max * 1.1
    fanned = resource_scan([0.12, 0.2], workers=2, **kwargs)
    assert [r.omega_max for r in fanned] == [r.omega_max for r in serial]
    assert [r.fidelity for r in fanned] == [r.fidelity for r in serial]


def test_resource_scan_unreachable_yields_none():
    out = resource_scan(
        [0.12],
        synthesis="adiabatic",
        target_f0=0.989,
        omega_bounds=(TWO_PI * 0.5, TWO_PI * 2.0),
        coarse=2,
        config=IntegratorConfig(step=1e-4),
    )
    assert out == [None]


def test_speedup_point_ratio():
    point = SpeedupPoint(omega_budget=TWO_PI * 20.0, t_adiabatic=0.5, t_tqd=0.1)
    assert point.speedup == pytest.approx(5.0)


def test_fit_power_law_recovers_exponent():
    rng = np.random.default_rng(5)
    t = np.geomspace(0.12, 1.0, 12)
    y = 5.0 * t ** (-1.4) + 2.0
    noisy = y * (1.0 + 0.005 * rng.standard_normal(t.size))
    fit = fit_power_law(t, noisy)
    assert fit.names == ("nu1", "nu2", "p")
    assert fit.values[2] == pytest.approx(1.4, rel=5e-2)
    assert fit.values[0] == pytest.approx(5.0, rel=0.1)
    assert fit.r_squared > 0.995
    assert np.all(fit.sigmas >= 0.0)
    as_dict = fit.as_dict()
    assert set(as_dict) == {"nu1", "nu2", "p"}
    assert as_dict["p"][0] == pytest.approx(fit.values[2])


def test_fit_power_law_filters_non_finite():
    t = np.geomspace(0.12, 1.0, 10)
    y = 3.0 * t ** (-2.0) + 1.0
    t_dirty = np.append(t, 0.5)
    y_dirty = np.append(y, np.nan)
    fit = fit_power_law(t_dirty, y_dirty)
    assert fit.values[2] == pytest.approx(2.0, rel=1e-3)
    with pytest.raises(ValueError):
        fit_power_law([0.1, 0.2, 0.3], [3.0, 2.0, 1.0])
    with pytest.raises(ValueError):
        fit_power_law([0.1, 0.2], [1.0, 2.0, 3.0])


def test_fit_logistic_recovers_parameters():
    rng = np.random.default_rng(7)
    x = np.linspace(5.0, 40.0, 16)
    y = 2.4 / (1.0 + np.exp(-0.45 * x + 11.0)) + 2.3
    noisy = y + 0.01 * rng.standard_normal(x.size)
    fit = fit_logistic(x, noisy)
    assert fit.names == ("a", "b", "c", "d")
    assert fit.values[0] == pytest.approx(2.4, rel=0.1)
    assert fit.values[1] == pytest.approx(0.45, rel=0.15)
    assert fit.values[3] == pytest.approx(2.3, rel=0.1)
    assert fit.r_squared > 0.99
    with pytest.raises(ValueError):
        fit_logistic([1.0, 2.0, 3.0, 4.0], [1.0, 2.0, 3.0, 4.0])


def test_r_squared_edge_cases():
    assert r_squared([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 1.0
    assert r_squared([1.0, 1.0, 1.0], [1.0, 1.0, 1.0]) == 1.0
    assert r_squared([1.0, 1.0, 1.0], [1.0, 1.0, 2.0]) == -math.inf
    assert r_squared([1.0, 2.0, 3.0], [1.0, 2.0, 4.0]) < 1.0


def test_fit_result_validation():
    with pytest.raises(ValueError):
        FitResult(
            names=("a",),
            values=np.array([1.0, 2.0]),
            sigmas=np.array([0.1, 0.2]),
            r_squared=0.5,
        )
    with pytest.raises(ValueError):
        FitResult(
            names=("a",),
            values=np.array([1.0]),
            sigmas=np.array([0.1]),
            r_squared=1.5,
        )
