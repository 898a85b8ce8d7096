import math
from dataclasses import replace

import numpy as np
import pytest

from rydgate import bell
from rydgate.atom import (
    DIM_2,
    NO_NOISE,
    ExcitationKind,
    default_model,
    pair_index,
)
from rydgate.dynamics import IntegratorConfig, propagate_magnus
from rydgate.optimize import fidelity_from_returns, sequence_fidelity
from rydgate.pipeline import (
    build_full_system,
    build_sector_system,
    evaluate_gate,
    gate_flavor,
    gate_sectors,
    population_series,
    run_lindblad_gate,
    run_monte_carlo,
    run_unitary_gate,
    sequence_adiabaticity,
    swap_operator,
    two_level_sectors,
)
from rydgate.pulses import (
    PulseSchedule,
    Segment,
    build_sequence,
    double_sequence,
)

from conftest import reference_lcg, reference_zchg

CFG = IntegratorConfig(step=1e-5)


@pytest.fixture(scope="module")
def dipole_model():
    return default_model(ExcitationKind.DIPOLE)


@pytest.fixture(scope="module")
def quad_model():
    return default_model(ExcitationKind.QUADRUPOLE)


@pytest.fixture(scope="module")
def dipole_schedule():
    return build_sequence(
        ExcitationKind.DIPOLE, reference_lcg(0.015), 0.4 * math.pi, 1.9 * math.pi
    )


@pytest.fixture(scope="module")
def dipole_run(dipole_model, dipole_schedule):
    return run_unitary_gate(dipole_model, dipole_schedule, CFG)


def test_sector_bases_are_orthonormal_with_expected_weights():
    sec01, sec11 = gate_sectors(ExcitationKind.DIPOLE)
    assert (sec01.dim, sec11.dim) == (2, 3)
    np.testing.assert_allclose(sec01.phase_weights, [0.0, -1.0])
    np.testing.assert_allclose(sec11.phase_weights, [0.0, -1.0, -2.0])
    q01, q11 = gate_sectors(ExcitationKind.QUADRUPOLE)
    assert (q01.dim, q11.dim) == (3, 6)
    np.testing.assert_allclose(q01.phase_weights, [0.0, 1.0, 1.0])
    np.testing.assert_allclose(q11.phase_weights, [0.0, 1.0, 1.0, 2.0, 2.0, 2.0])
    for sec in (sec01, sec11, q01, q11):
        v = sec.isometry
        np.testing.assert_allclose(v.conj().T @ v, np.eye(sec.dim), atol=1e-14)
    assert sec01.isometry[pair_index(0, 1), 0] == 1.0
    assert sec11.isometry[pair_index(1, 1), 0] == 1.0


@pytest.mark.parametrize(
    "kind,base_builder,duration,step",
    [
        (ExcitationKind.DIPOLE, reference_lcg, 0.01, 1e-5),
        (ExcitationKind.QUADRUPOLE, reference_zchg, 0.01, 2e-5),
    ],
)
def test_sectors_are_exact_invariant_subspaces(kind, base_builder, duration, step):
    model = default_model(kind)
    schedule = build_sequence(kind, base_builder(duration), 0.7, 2.1)
    full, grids = build_full_system(model, schedule, step)
    for sector in gate_sectors(kind):
        e_full = sector.isometry[:, 0].copy()
        res_full = propagate_magnus(full, grids, e_full)
        sys_sec, grids_sec = build_sector_system(model, schedule, sector, step)
        e_sec = np.zeros(sector.dim, dtype=complex)
        e_sec[0] = 1.0
        res_sec = propagate_magnus(sys_sec, grids_sec, e_sec)
        np.testing.assert_allclose(
            res_full.final, sector.isometry @ res_sec.final, atol=1e-10
        )


def test_00_is_stationary(dipole_model):
    schedule = build_sequence(ExcitationKind.DIPOLE, reference_lcg(0.01), 0.3, 1.1)
    full, grids = build_full_system(dipole_model, schedule, 1e-5)
    e00 = np.zeros(DIM_2, dtype=complex)
    e00[pair_index(0, 0)] = 1.0
    res = propagate_magnus(full, grids, e00)
    assert abs(res.final[pair_index(0, 0)] - 1.0) < 1e-8
    assert np.linalg.norm(res.final - e00) < 1e-8


def test_exchange_symmetry_of_full_propagation(dipole_model):
    schedule = build_sequence(ExcitationKind.DIPOLE, reference_lcg(0.01), 0.3, 1.1)
    full, grids = build_full_system(dipole_model, schedule, 1e-5)
    e01 = np.zeros(DIM_2, dtype=complex)
    e01[pair_index(0, 1)] = 1.0
    e10 = np.zeros(DIM_2, dtype=complex)
    e10[pair_index(1, 0)] = 1.0
    u01 = propagate_magnus(full, grids, e01).final
    u10 = propagate_magnus(full, grids, e10).final
    np.testing.assert_allclose(u10, swap_operator() @ u01, atol=1e-12)


@pytest.mark.parametrize("kind", list(ExcitationKind))
def test_segment_phase_conjugates_sector_propagator(kind):
    base = reference_lcg(0.01) if kind is ExcitationKind.DIPOLE else reference_zchg(0.01)
    phi = 0.9
    plain = PulseSchedule(
        kind=kind, synthesis="tqd", base=base, segments=(Segment(0.0, base.duration),)
    )
    shifted = PulseSchedule(
        kind=kind,
        synthesis="tqd",
        base=base,
        segments=(Segment(0.0, base.duration, phase=phi),),
    )
    for sector in gate_sectors(kind):
        sys0, grids0 = build_sector_system(default_model(kind), plain, sector, 2e-5)
        sys1, grids1 = build_sector_system(default_model(kind), shifted, sector, 2e-5)
        eye = np.eye(sector.dim, dtype=complex)
        u0 = propagate_magnus(sys0, grids0, eye).final
        u1 = propagate_magnus(sys1, grids1, eye).final
        d = np.exp(1j * phi * sector.phase_weights)
        np.testing.assert_allclose(u1, (d[:, None] * u0) * d.conj()[None, :], atol=1e-11)


def test_unitary_gate_run_structure(dipole_run):
    final = dipole_run.final_state
    assert final[pair_index(0, 0)] == 0.5
    assert final[pair_index(0, 1)] == pytest.approx(-0.5 * dipole_run.c01, abs=1e-12)
    assert final[pair_index(1, 0)] == pytest.approx(-0.5 * dipole_run.c01, abs=1e-12)
    assert final[pair_index(1, 1)] == pytest.approx(0.5 * dipole_run.c11, abs=1e-12)
    assert np.linalg.norm(final) <= 1.0 + 1e-9
    assert abs(dipole_run.c01) <= 1.0 + 1e-9
    assert not dipole_run.phase_flagged
    assert dipole_run.amps_01[0] == pytest.approx(1.0)
    assert dipole_run.times_01[0] == 0.0
    assert dipole_run.times_01[-1] == pytest.approx(4 * 0.015)


def test_fidelity_from_returns_matches_state_metric(dipole_model, dipole_run):
    f_fast = fidelity_from_returns(dipole_run.c01, dipole_run.c11)
    phi = bell.extract_phi(dipole_run.phi_10)
    f_full = bell.intrinsic_fidelity(dipole_run.final_state, phi, bell.BETA_01)
    assert f_fast == pytest.approx(f_full, abs=1e-10)


def test_fidelity_from_returns_matches_cz_pi_flavor(dipole_model):
    schedule = double_sequence(ExcitationKind.DIPOLE, reference_lcg(0.06))
    run = run_unitary_gate(dipole_model, schedule, CFG)
    f_fast = fidelity_from_returns(run.c01, run.c11, cz_pi=True)
    f_full = bell.intrinsic_fidelity(run.final_state, 0.0, bell.BETA_00)
    assert f_fast == pytest.approx(f_full, abs=1e-10)


def test_sequence_fidelity_shortcut_agrees(dipole_model, dipole_schedule, dipole_run):
    f_short = sequence_fidelity(dipole_model, dipole_schedule, CFG)
    f_direct = fidelity_from_returns(dipole_run.c01, dipole_run.c11)
    assert f_short == pytest.approx(float(f_direct), abs=1e-9)


def test_lindblad_without_decay_matches_unitary(dipole_model, dipole_schedule, dipole_run):
    bare = replace(dipole_model, decay=())
    rho = run_lindblad_gate(bare, dipole_schedule, CFG)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-8)
    phi = bell.extract_phi(dipole_run.phi_10)
    f_rho = float(
        np.atleast_1d(bell.fidelity(bell.finalize_state(rho, phi), bell.BETA_01))[0]
    )
    f_psi = bell.intrinsic_fidelity(dipole_run.final_state, phi, bell.BETA_01)
    assert f_rho == pytest.approx(f_psi, abs=2e-5)


def test_decay_lowers_fidelity_and_preserves_trace(dipole_model, dipole_schedule, dipole_run):
    rho = run_lindblad_gate(dipole_model, dipole_schedule, CFG)
    assert np.trace(rho).real == pytest.approx(1.0, abs=1e-8)
    phi = bell.extract_phi(dipole_run.phi_10)
    f_decay = float(
        np.atleast_1d(bell.fidelity(bell.finalize_state(rho, phi), bell.BETA_01))[0]
    )
    f0 = bell.intrinsic_fidelity(dipole_run.final_state, phi, bell.BETA_01)
    assert f_decay < f0
    np.testing.assert_allclose(rho, rho.conj().T, atol=1e-10)


def test_evaluate_gate_identity_noise_equals_decay_run(dipole_model, dipole_schedule):
    report, run, summary = evaluate_gate(
        dipole_model, dipole_schedule, CFG, pairs=[(NO_NOISE, NO_NOISE)]
    )
    assert summary is not None and summary.n_runs == 1
    assert summary.fidelities[0] == pytest.approx(report.f_decay, abs=1e-12)
    assert report.f_mean == pytest.approx(summary.mean_f)
    assert report.f_intrinsic == pytest.approx(
        fidelity_from_returns(run.c01, run.c11), abs=1e-10
    )
    assert report.target == "beta_01"


def test_evaluate_gate_noiseless_limit_reaches_intrinsic(dipole_model, dipole_schedule):
    bare = replace(dipole_model, decay=())
    report, _, summary = evaluate_gate(
        bare, dipole_schedule, CFG, pairs=[(NO_NOISE, NO_NOISE)], with_decay=False
    )
    assert report.f_decay is None
    assert summary.fidelities[0] == pytest.approx(report.f_intrinsic, abs=2e-5)


def test_monte_carlo_is_deterministic_and_worker_invariant(dipole_model, dipole_schedule):
    cfg = IntegratorConfig(step=2e-5)
    a = run_monte_carlo(dipole_model, dipole_schedule, 4, 3, cfg, workers=1)
    b = run_monte_carlo(dipole_model, dipole_schedule, 4, 3, cfg, workers=1)
    assert np.array_equal(a.fidelities, b.fidelities)
    c = run_monte_carlo(dipole_model, dipole_schedule, 4, 3, cfg, workers=2)
    np.testing.assert_allclose(a.fidelities, c.fidelities, atol=1e-12)
    assert a.mean_f < 1.0
    assert a.std_error > 0.0


def test_population_series_shapes_and_conservation(dipole_model, dipole_schedule):
    sec01, _ = gate_sectors(ExcitationKind.DIPOLE)
    times, pops = population_series(dipole_model, dipole_schedule, sec01, CFG)
    assert pops.shape == (len(times), sec01.dim)
    np.testing.assert_allclose(pops[0], [1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(pops.sum(axis=1), 1.0, atol=1e-8)
    assert times[0] == 0.0
    assert times[-1] == pytest.approx(dipole_schedule.total_duration)


def test_two_level_sectors_api(dipole_model, quad_model):
    secs = two_level_sectors(dipole_model, None)
    assert [s.dim for s in secs] == [2, 2]
    with pytest.raises(NotImplementedError):
        two_level_sectors(quad_model, None)


def test_adiabaticity_improves_with_duration(dipole_model):
    fast = double_sequence(ExcitationKind.DIPOLE, reference_lcg(0.03))
    slow = double_sequence(ExcitationKind.DIPOLE, reference_lcg(0.48))
    o_fast = sequence_adiabaticity(dipole_model, fast, IntegratorConfig(step=2e-5))
    o_slow = sequence_adiabaticity(dipole_model, slow, IntegratorConfig(step=2e-5))
    assert 0.0 <= o_fast <= 1.0 and 0.0 <= o_slow <= 1.0
    assert o_slow > o_fast
    assert o_slow > 0.9


def test_gate_flavor_assignment(dipole_model, quad_model):
    adiab_d = double_sequence(ExcitationKind.DIPOLE, reference_lcg(0.48))
    tqd_d = build_sequence(ExcitationKind.DIPOLE, reference_lcg(0.03), 0.0, 0.0)
    adiab_q = double_sequence(ExcitationKind.QUADRUPOLE, reference_zchg(0.81))
    tqd_q = build_sequence(ExcitationKind.QUADRUPOLE, reference_zchg(0.06), 0.0, 0.0)
    assert gate_flavor(dipole_model, adiab_d) == (bell.BETA_00, False)
    assert gate_flavor(dipole_model, tqd_d) == (bell.BETA_01, True)
    assert gate_flavor(quad_model, adiab_q) == (bell.BETA_01, True)
    assert gate_flavor(quad_model, tqd_q) == (bell.BETA_01, True)
