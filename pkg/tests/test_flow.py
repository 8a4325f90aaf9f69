from dataclasses import replace

import numpy as np
import pytest

from flow_oracle import oracle_energy
from higgsmorse.errors import NumericalError, ValidationError
from higgsmorse.flow import (LatticeGeometry, abelian_linear_prediction, classify_limit,
                             constraint_deviation, energy_terms, gauge_transform, gradient_norm,
                             heat_flow_run, hodge_block_state, moment_maps, orbit_gradient,
                             random_state, random_unitary_field, restriction_check,
                             s1_action_check, state_from_text, state_to_text, ymh_energy,
                             ymh_gradient, zero_state)


def rel(x, y):
    return abs(x - y) / max(abs(x), abs(y), 1e-300)


def _ip(x, y, a):
    return a * a * float(np.sum(np.real(np.conj(x) * y)))


def test_geometry():
    assert LatticeGeometry(4, 0.5).area == 4.0
    with pytest.raises(ValidationError):
        LatticeGeometry(0)
    with pytest.raises(ValidationError):
        LatticeGeometry(3, 0.0)


def test_zero_state_energy_and_moment_maps():
    s = zero_state(6, 2)
    assert ymh_energy(s) == 0.0 and ymh_energy(s, "full") == 0.0
    m1, mc = moment_maps(s)
    assert not m1.any() and not mc.any()


def test_abelian_constant_curvature():
    s = zero_state(5, 1, spacing=0.3, flux=[0.7])
    s = replace(s, higgs=np.full((5, 5, 1, 1), 0.4 + 0.2j))
    assert rel(ymh_energy(s), s.geometry.area * 0.7**2) < 1e-12


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("full", [False, True])
def test_energy_matches_loop_oracle(seed, full):
    s = random_state(5, 2, seed, spacing=0.8, metric_amplitude=0.4)
    e = ymh_energy(s, "full" if full else "restricted")
    o = oracle_energy(s.base_connection, s.higgs, s.metric, 0.8, full=full, seed=seed)
    assert rel(e, o) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_norm_and_expansion_identities(seed):
    s = random_state(6, 2, seed, metric_amplitude=0.3)
    a = s.geometry.spacing
    m1, mc = moment_maps(s)
    full = ymh_energy(s, "full")
    norms = _ip(m1, m1, a) + _ip(mc.real, mc.real, a) + _ip(mc.imag, mc.imag, a)
    assert rel(norms, full) < 1e-12
    t = energy_terms(s)
    assert rel(t["F2"] + t["B2"] + t["cross"] + t["dbar2"], full) < 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_gauge_invariance(seed):
    s = random_state(6, 3, seed, metric_amplitude=0.3)
    u = random_unitary_field(np.random.default_rng(seed + 100), (6, 6), 3)
    t = gauge_transform(s, u)
    for v in ("restricted", "full"):
        assert rel(ymh_energy(s, v), ymh_energy(t, v)) < 1e-12


@pytest.mark.parametrize("theta", [0.0, np.pi / 3, 2.0])
def test_s1_invariance(theta):
    s = random_state(6, 2, 4, metric_amplitude=0.3)
    r = s1_action_check(s, theta)
    assert r.energy_rel_diff < 1e-12 and r.norm_rel_diff < 1e-12


@pytest.mark.parametrize("theta", [np.pi / 7, np.pi / 3, 1.0])
def test_fixed_point_identity(theta):
    s, w = hodge_block_state(6, (1, 1), seed=2)
    assert s1_action_check(s, theta, w).fixed_point_diff < 1e-14
    s, w = hodge_block_state(4, (2, 1, 1), seed=3)
    assert s1_action_check(s, theta, w).fixed_point_diff < 1e-14


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("variant", ["restricted", "full"])
def test_gradient_matches_central_differences(seed, variant):
    s = random_state(5, 2, seed, spacing=0.9, metric_amplitude=0.3)
    a = s.geometry.spacing
    ga, gp = ymh_gradient(s, variant)
    rng = np.random.default_rng(seed + 7)
    da = rng.standard_normal(ga.shape) + 1j * rng.standard_normal(ga.shape)
    dp = rng.standard_normal(gp.shape) + 1j * rng.standard_normal(gp.shape)
    pred = _ip(ga, da, a) + _ip(gp, dp, a)

    def e(eps):
        return ymh_energy(replace(s, base_connection=s.base_connection + eps * da,
                                  higgs=s.higgs + eps * dp), variant)

    errs = [rel(pred, (e(h) - e(-h)) / (2 * h)) for h in (1e-4, 1e-5, 1e-6)]
    assert min(errs) < 1e-5


def test_orbit_gradient_matches_central_differences():
    from higgsmorse.flow import herm_exp, metric_root
    s = random_state(5, 2, 3, metric_amplitude=0.3)
    a = s.geometry.spacing
    rng = np.random.default_rng(0)
    x = rng.standard_normal(s.metric.shape) + 1j * rng.standard_normal(s.metric.shape)
    xi = 0.5 * (x + np.conj(np.swapaxes(x, -1, -2)))
    g, _ = metric_root(s.metric)

    def e(eps):
        gg = herm_exp(eps * xi) @ g
        return ymh_energy(s.with_metric(np.conj(np.swapaxes(gg, -1, -2)) @ gg))

    fd = (e(1e-6) - e(-1e-6)) / 2e-6
    assert rel(_ip(orbit_gradient(s), xi, a), fd) < 1e-5


def test_split_critical_state():
    s = zero_state(6, 2, flux=[0.5, -0.2])
    ga, gp = ymh_gradient(s)
    assert not ga.any() and not gp.any()
    assert gradient_norm(s) == 0.0
    tr = heat_flow_run(s)
    assert len(tr.steps) == 1 and tr.converged
    assert tr.steps[0][1] == ymh_energy(s)
    rep = classify_limit(s)
    assert rep.multiplicities == (1, 1)
    assert [round(c.value, 12) for c in rep.clusters] == [-0.2, 0.5]


def test_zero_state_limit_single_cluster():
    rep = classify_limit(zero_state(4, 3))
    assert rep.multiplicities == (3,) and rep.clusters[0].value == 0.0
    assert rep.status == "candidate"


def test_flow_keeps_holomorphic_data_and_decreases_energy():
    s = random_state(8, 2, 11)
    alpha, phi = s.base_connection.copy(), s.higgs.copy()
    tr = heat_flow_run(s, 1e-6, 5000)
    assert np.array_equal(alpha, s.base_connection) and np.array_equal(phi, s.higgs)
    assert np.array_equal(alpha, tr.final_state.base_connection)
    e = tr.energies
    assert all(b < a for a, b in zip(e, e[1:]))
    assert tr.converged and tr.steps[-1][2] < 1e-6
    assert tr.limit_report.max_spread < 1e-4


def test_flow_is_reproducible():
    a = heat_flow_run(random_state(6, 2, 5), 1e-6, 3000).to_csv()
    b = heat_flow_run(random_state(6, 2, 5), 1e-6, 3000).to_csv()
    assert a == b and a.splitlines()[0] == "time,energy,gradient_norm,step"


def test_abelian_flow_matches_fourier_oracle():
    N = 8
    rng = np.random.default_rng(3)
    s0 = zero_state(N, 1, spacing=0.5)
    log_h = 1e-4 * rng.standard_normal((N, N))
    s0 = s0.with_metric(np.exp(log_h)[..., None, None].astype(complex))
    tr = heat_flow_run(s0, 1e-30, max_steps=40)
    pred = abelian_linear_prediction(s0, tr.accepted_steps)
    got = np.log(tr.final_state.metric[..., 0, 0].real)
    assert tr.steps[-1][0] > 0
    assert np.max(np.abs(pred - got)) < 1e-6


def test_positive_definiteness_loss_is_reported():
    s = zero_state(3, 2)
    bad = s.metric.copy()
    bad[0, 0] = -np.eye(2)
    with pytest.raises(NumericalError, match="positive definite"):
        ymh_energy(s.with_metric(bad))


def test_bad_arguments():
    with pytest.raises(ValidationError):
        heat_flow_run(zero_state(3, 2), tolerance=0)
    with pytest.raises(ValidationError):
        zero_state(3, 3, group_tag="slr")
    with pytest.raises(ValidationError):
        ymh_energy(zero_state(3, 2), "other")


@pytest.mark.parametrize("tag", ["slr", "sp"])
@pytest.mark.parametrize("seed", range(2))
def test_restriction_twin_run(tag, seed):
    s = random_state(8, 2, seed, group_tag=tag, metric_amplitude=0.2)
    assert constraint_deviation(tag, s.metric) < 1e-12
    r = restriction_check(tag, s, 1.0)
    assert r.steps > 0 and r.per_unit_time < 1e-8


def test_restriction_detector_fires_on_broken_data():
    s = random_state(8, 2, 0, group_tag="slr")
    phi = s.higgs.copy()
    phi[..., 0, 1] += 0.3
    r = restriction_check("slr", replace(s, higgs=phi), 1.0)
    assert r.constraint_deviation > 1e-3


def test_restriction_at_critical_state_is_zero():
    r = restriction_check("sp", zero_state(4, 2, group_tag="sp"), 1.0)
    assert r.constraint_deviation == 0.0 and r.twin_distance == 0.0


def test_state_text_roundtrip():
    s = random_state(3, 2, 1, metric_amplitude=0.2)
    s.flux = np.array([0.25, -0.5])
    back = state_from_text(state_to_text(s))
    for name in ("base_connection", "higgs", "metric", "flux"):
        assert np.array_equal(getattr(back, name), getattr(s, name))
    assert back.group_tag == s.group_tag and back.geometry == s.geometry
