import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clocknet import oracle
from clocknet.emitter import A, B, G, EmitterParams
from clocknet.protocol import (ExperimentConfig, ReadoutMap, balance_epsilon, entangled_visibility,
                               extract_visibility, fringe_period, herald_state, product_clock_state,
                               readout_photons, run_entanglement, run_free_evolution, run_postselected,
                               run_readout, simulate_point, uniform_deltas, visibility_curve)
from clocknet.spacetime import ClockSpec, SiteWorldline, phase_bundle

GROUND = (SiteWorldline.at_height(10.0), SiteWorldline(0.0))
SAT = (SiteWorldline.above_earth(5e5), SiteWorldline.above_earth(0.0))


def ideal(**kw):
    kw.setdefault("site1", GROUND[0])
    kw.setdefault("site2", GROUND[1])
    return ExperimentConfig.ideal(**kw)


def idx(s1, s2):
    return 3 * s1 + s2


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(deltas=())
    with pytest.raises(ValueError):
        ExperimentConfig(trials=0)
    with pytest.raises(ValueError):
        ExperimentConfig(eta_d=1.5)
    with pytest.raises(ValueError):
        ExperimentConfig(xi_std=-1)
    assert len(ExperimentConfig().deltas) == 64


# -- step 1 -----------------------------------------------------------------


def test_entanglement_ideal():
    h = run_entanglement(ideal())
    assert h.P_s == pytest.approx(0.19, abs=1e-14)
    assert h.fidelity_to_bell == pytest.approx(2 * 0.9 / 1.9, abs=1e-14)
    assert h.rho4.matrix[idx(G, G), idx(G, G)].real == pytest.approx(0.01 / 0.19, abs=1e-14)


def test_entanglement_without_photons():
    h = run_entanglement(ideal(epsilon=0.0))
    assert not h.succeeded and h.P_s == 0.0 and h.fidelity_to_bell == 0.0
    with pytest.raises(ValueError):
        run_free_evolution(h, ideal(), 1.0)


def _p_s(**kw):
    node = EmitterParams(eta_i=0.99, epsilon=kw.pop("epsilon", 0.1))
    return run_entanglement(ExperimentConfig(node1=node, node2=node, **kw)).P_s


@pytest.mark.parametrize("name", ["eta_o", "eta_t", "eta_d", "epsilon"])
def test_success_probability_monotone(name):
    grid = np.linspace(0.0, 1.0, 6)
    base = dict(eta_o=0.5, eta_t=0.9, eta_d=0.5)
    vals = [_p_s(**{**base, name: float(v)}) for v in grid]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))


# -- step 2 -----------------------------------------------------------------


def _bell_outcome():
    cfg = ideal(epsilon=1e-12)
    return run_entanglement(cfg), cfg


def test_free_evolution_zero_time_is_prepared_state():
    h, cfg = _bell_outcome()
    rho = run_free_evolution(h, cfg, 0.0).matrix
    # (|g>(|a>+|b>) + (|a>+|b>)|g>)/2
    psi = np.zeros(9)
    psi[[idx(G, A), idx(G, B), idx(A, G), idx(B, G)]] = 0.5
    assert np.allclose(rho, np.outer(psi, psi), atol=1e-9)


@given(st.floats(0, 5), st.floats(-3, 3))
@settings(max_examples=20, deadline=None)
def test_free_evolution_coherence_phase(T, varphi):
    h, cfg = _bell_outcome()
    cfg = replace(cfg, varphi=varphi)
    rho = run_free_evolution(h, cfg, T).matrix
    ratio = rho[idx(B, G), idx(G, B)] / rho[idx(A, G), idx(G, A)]
    b = phase_bundle(cfg.clock, cfg.site1, cfg.site2, 0.0, T, varphi)
    assert abs(ratio) == pytest.approx(1.0, abs=1e-9)
    assert abs(np.angle(ratio * np.exp(1j * b.clock_difference))) < 1e-6


def test_free_evolution_depolarized_coherence():
    h, cfg = _bell_outcome()
    node = replace(cfg.node1, T_d=2.0)
    lossy = replace(cfg, node1=node, node2=node)
    a = run_free_evolution(h, lossy, 6.0).matrix[idx(G, A), idx(A, G)]
    b = run_free_evolution(h, cfg, 6.0).matrix[idx(G, A), idx(A, G)]
    assert abs(a) / abs(b) == pytest.approx(math.exp(-6), rel=1e-9)
    assert math.exp(-6) == pytest.approx(2.479e-3, rel=1e-3)


# -- step 3 -----------------------------------------------------------------


def _bundle_config(omega_ga=2 * math.pi * 1e12, T_c=1e-3, varphi=0.0):
    node = EmitterParams(eta_i=1.0, epsilon=0.1, T_c=T_c)
    return ExperimentConfig(node1=node, node2=node, site1=SAT[0], site2=SAT[1], varphi=varphi,
                            clock=ClockSpec.from_wavelength(698e-9, omega_ga))


@given(st.floats(0, 1e-4), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
@settings(max_examples=25, deadline=None)
def test_readout_matches_closed_form(T, delta, varphi):
    cfg = _bundle_config(varphi=varphi)
    h = run_entanglement(cfg)
    p = run_readout(run_free_evolution(h, cfg, T), cfg, delta).normalized()
    b = phase_bundle(cfg.clock, cfg.site1, cfg.site2, cfg.attempt_time, T, varphi, delta)
    assert abs(b.theta0) > 0.01
    ref = oracle.ideal_readout_probs(b)
    assert np.allclose(p.as_array(), ref.as_array(), atol=1e-10)
    plus, minus = oracle.readout_totals(b)
    assert p.p_plus_total == pytest.approx(plus, abs=1e-10)
    assert p.p_minus_total == pytest.approx(minus, abs=1e-10)


def test_readout_without_collection_is_dark():
    cfg = ideal()
    node = replace(cfg.node1, p_c_prime=0.0)
    cfg = replace(cfg, node1=node, node2=node)
    p = run_readout(run_free_evolution(run_entanglement(cfg), cfg, 0.4), cfg, 0.0)
    assert p.as_array() == pytest.approx([0, 0, 0, 0], abs=1e-15)


def test_opposite_clocks_give_flat_fringe():
    # theta1 - theta2 = pi through the clock offset alone
    cfg = ideal(varphi=math.pi, site1=SiteWorldline(0.0), site2=SiteWorldline(0.0))
    rho6 = run_free_evolution(run_entanglement(cfg), cfg, 0.0)
    p = [run_readout(rho6, cfg, d).normalized() for d in uniform_deltas(16)]
    assert [x.p_plus_total for x in p] == pytest.approx([0.5] * 16, abs=1e-12)
    assert [x.p_plus_early + x.p_plus_late for x in p] == pytest.approx([0.5] * 16, abs=1e-12)


@given(st.floats(0, 1), st.floats(0.01, 0.3), st.floats(0, 1), st.floats(0, 10), st.floats(-3, 3))
@settings(max_examples=20, deadline=None)
def test_pipeline_states_positive(eta, eps, eta_i, T, xi):
    node = EmitterParams(eta_i=eta_i, epsilon=eps, T_d=3.0, Omega=0.4, phi_pi=0.3, p_c=0.8, p_c_prime=0.9)
    cfg = ExperimentConfig(node1=node, node2=node, eta_o=eta, eta_t=0.9, eta_d=eta)
    rho3, P = herald_state(cfg, xi)
    if P == 0:
        return
    assert rho3.min_eigenvalue() >= -1e-8
    h = run_entanglement(cfg, xi)
    rho6 = run_free_evolution(h, cfg, T)
    assert abs(rho6.trace - 1) <= 1e-10
    assert rho6.min_eigenvalue() >= -1e-8
    ph = readout_photons(rho6, cfg)
    assert abs(ph.trace - 1) <= 1e-10
    assert ph.min_eigenvalue() >= -1e-8


def test_readout_map_matches_pipeline():
    cfg = replace(ideal(), eta_o=0.5, eta_t=0.3, eta_d=0.7)
    rho6 = run_free_evolution(run_entanglement(cfg, 0.4), cfg, 1.1)
    rm = ReadoutMap(cfg, cfg.detector())
    assert np.allclose(rm.photons(rho6), readout_photons(rho6, cfg).matrix, atol=1e-14)
    for d in (0.0, 1.0, 4.0):
        ref = run_readout(rho6, cfg, d, 0.0).as_array()
        assert np.allclose(rm.slots(rho6, [d])[0], ref, atol=1e-14)


# -- visibility -------------------------------------------------------------


def test_extract_visibility_methods():
    d = np.array(uniform_deltas(64))
    p = 0.4 + 0.3 * np.cos(d + 0.2)
    assert extract_visibility(d, p) == pytest.approx(0.75, abs=1e-14)
    assert extract_visibility(d, p, "grid") == pytest.approx(0.75, abs=1e-2)
    assert extract_visibility(d, np.zeros_like(d)) == 0.0
    with pytest.raises(ValueError):
        extract_visibility(d, p, "median")


def test_ideal_curve_is_overlap_magnitude():
    cfg = ideal(times=tuple(np.linspace(0, 5, 15)), varphi=0.4)
    for pt in visibility_curve(cfg):
        b = phase_bundle(cfg.clock, cfg.site1, cfg.site2, 0.0, pt.T, cfg.varphi)
        assert pt.nu == pytest.approx(oracle.fringe_visibility(b.clock_difference), abs=1e-9)
        assert pt.nu_std == 0.0


def test_fast_path_matches_reference_path_without_noise():
    cfg = replace(ideal(times=(0.0, 0.7, 2.2)), eta_o=0.5, eta_t=0.9, eta_d=0.5)
    for pt in visibility_curve(cfg):
        assert pt.nu == pytest.approx(entangled_visibility(cfg, pt.T), abs=1e-12)


@pytest.mark.parametrize("independent", [False, True])
def test_fast_path_matches_trial_average(independent):
    cfg = replace(ideal(times=(0.9,), trials=6, seed=3, xi_std=0.8, xi_prime_std=0.6, xi_prime_mean=0.2,
                        independent_arm_phases=independent),
                  eta_t=0.6, eta_d=0.8)
    from clocknet.protocol import noise_draws
    xi, xip = noise_draws(cfg, 0)
    slots = np.zeros((len(cfg.deltas), 4))
    for a, b in zip(xi, xip):
        slots += np.array([simulate_point(cfg, 0.9, d, a, b).as_array() for d in cfg.deltas])
    slots /= len(xi)
    p_plus = slots[:, 0] + slots[:, 2]
    pt = visibility_curve(cfg)[0]
    assert pt.nu == pytest.approx(extract_visibility(cfg.deltas, p_plus), abs=1e-10)
    assert pt.p_click == pytest.approx(slots.sum(axis=1).mean(), abs=1e-12)


def test_degenerate_sweep_flagged():
    cfg = replace(ideal(times=(0.0,)), eta_t=0.0)
    pt = visibility_curve(cfg)[0]
    assert pt.nu == 0.0 and pt.degenerate


def test_curve_deterministic():
    cfg = ideal(times=(0.3, 1.0), trials=50, seed=99, xi_prime_std=0.5)
    assert visibility_curve(cfg) == visibility_curve(cfg)
    other = visibility_curve(replace(cfg, seed=100))
    assert other[0].nu != visibility_curve(cfg)[0].nu


def test_shot_sampling_flag():
    cfg = ideal(times=(0.0,), shots=20000, seed=1)
    pt = visibility_curve(cfg)[0]
    assert pt.nu == pytest.approx(1.0, abs=0.05)
    assert visibility_curve(cfg) == visibility_curve(cfg)


# -- invariants -------------------------------------------------------------


@given(st.floats(0, 3), st.floats(-3, 3))
@settings(max_examples=10, deadline=None)
def test_half_period_shift(T, phi):
    a = visibility_curve(ideal(times=(T,), varphi=phi))[0].nu
    b = visibility_curve(ideal(times=(T,), varphi=phi + math.pi))[0].nu
    assert a**2 + b**2 == pytest.approx(1.0, abs=1e-9)


@given(st.floats(0, 1e-4), st.floats(0, 1e-2))
@settings(max_examples=10, deadline=None)
def test_theta0_does_not_change_visibility(T, T_c):
    base = entangled_visibility(_bundle_config(omega_ga=0.0, T_c=T_c), T)
    shifted = entangled_visibility(_bundle_config(omega_ga=2 * math.pi * 3e12, T_c=T_c), T)
    assert shifted == pytest.approx(base, abs=1e-9)


# -- post-selected variant --------------------------------------------------


def test_postselected_ideal():
    cfg = ideal()
    r = run_postselected(cfg, 0.0)
    assert r.nu_ps == pytest.approx(1.0, abs=1e-12)
    assert r.p_select == pytest.approx(4 / 9, abs=1e-10)
    assert r.lambda_gap == pytest.approx(0.0, abs=1e-9)


@given(st.floats(0, 1e-4), st.floats(-3, 3))
@settings(max_examples=10, deadline=None)
def test_postselected_gap_vanishes(T, phi):
    cfg = replace(_bundle_config(), varphi=phi)
    r = run_postselected(cfg, T)
    assert r.lambda_gap == pytest.approx(0.0, abs=1e-9)
    assert r.p_select == pytest.approx(4 / 9, abs=1e-10)


def test_postselected_curve_columns():
    cfg = ideal(times=(0.0, 0.8))
    for pt in visibility_curve(cfg, postselected=True):
        assert pt.nu_ps == pytest.approx(run_postselected(cfg, pt.T).nu_ps, abs=1e-12)
        assert pt.lambda_gap == pytest.approx(0.0, abs=1e-9)
        assert pt.p_select == pytest.approx(4 / 9, abs=1e-10)


def test_product_state_norm():
    rho = product_clock_state(ideal(), 0.3)
    assert rho.trace == pytest.approx(1.0)
    assert rho.space.labels == ("s1", "s2")


# -- helpers ----------------------------------------------------------------


def test_balance_epsilon():
    e2 = balance_epsilon(0.05, 0.9, 0.45)
    assert e2 == pytest.approx(0.1, abs=1e-12)
    assert 0.45 * e2 - 0.9 * 0.05 == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        balance_epsilon(0.9, 0.9, 0.1)


def test_fringe_period_synthetic():
    T = np.linspace(0, 10, 200)
    nu = np.abs(np.cos(1.4723 * T)) * np.exp(-0.2 * T)
    assert fringe_period(T, nu) == pytest.approx(math.pi / 1.4723, rel=2e-3)
    assert math.isnan(fringe_period(T[:10], nu[:10]))
