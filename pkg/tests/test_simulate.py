import io
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from phtune import energy_check, gain_for_zeta, integrate, linearize, oscillator, response_metrics
from phtune import errors
from phtune.simulate import Trajectory, final_states, log_decrement_zeta

from helpers import random_linear_system


def test_equilibrium_is_constant(arm):
    traj = integrate(arm, np.eye(2), (arm.q_star, np.zeros(2)), 1.0, 1e-2)
    np.testing.assert_array_equal(traj.q, np.tile(arm.q_star, (101, 1)))
    np.testing.assert_array_equal(traj.p, 0)
    rep = energy_check(arm, np.eye(2), traj)
    assert rep.max_rise == 0.0 and rep.dissipation_consistent


def test_critically_damped_oscillator():
    traj = integrate(oscillator(), [[2.0]], np.array([1.0, 0.0]), 20.0, 1e-3)
    q = traj.q[:, 0]
    assert abs(q[-1]) <= 1e-6
    assert np.all(q > 0)
    # closed form (1 + t) e^{-t}
    np.testing.assert_allclose(q, (1 + traj.times) * np.exp(-traj.times), atol=1e-11)


def test_log_decrement_recovers_pole_damping():
    traj = integrate(oscillator(), [[math.sqrt(2)]], np.array([1.0, 0.0]), 20.0, 1e-3)
    m = response_metrics(traj, [0.0])
    assert m.n_peaks[0] >= 2
    assert m.empirical_zeta[0] == pytest.approx(1 / math.sqrt(2), abs=0.02)


def test_log_decrement_formula():
    zeta = 0.3
    delta = 2 * math.pi * zeta / math.sqrt(1 - zeta ** 2)
    peaks = np.exp(-0.5 * delta * np.arange(5))
    assert log_decrement_zeta(peaks) == pytest.approx(zeta, rel=1e-12)
    assert log_decrement_zeta([1.0]) is None


def test_monotone_response_metrics():
    t = np.linspace(0, 10, 1001)
    q = (1 - np.exp(-t))[:, None]
    traj = Trajectory(t, q, np.zeros_like(q), np.zeros_like(t), np.zeros((1, 1)), 0.01)
    m = response_metrics(traj, [1.0])
    assert m.overshoot == [0.0]
    assert m.empirical_zeta == [None]
    assert m.settling_time[0] == pytest.approx(-math.log(0.02), abs=0.011)


def test_degenerate_step_reported_absent(arm):
    traj = integrate(arm, np.eye(2), (np.array([0.8, 0.0]), np.zeros(2)), 0.5, 1e-3)
    m = response_metrics(traj, arm.q_star)
    assert m.overshoot[0] is None and m.settling_time[0] is None
    assert m.overshoot[1] is not None


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_matches_matrix_exponential(seed, n):
    rng = np.random.default_rng(seed)
    sys = random_linear_system(rng, n)
    K = rng.uniform(0, 2) * np.eye(n)
    lin = linearize(sys, K)
    dx = rng.uniform(-1, 1, 2 * n)
    x_star = np.concatenate([sys.q_star, np.zeros(n)])
    traj = integrate(sys, K, x_star + dx, 1.0, 1e-3)
    ref = x_star + scipy.linalg.expm(lin.A) @ dx
    np.testing.assert_allclose(traj.states[-1], ref, atol=1e-6)


def test_step_halving_order(arm):
    ends = [integrate(arm, np.zeros((2, 2)), np.zeros(4), 1.0, h).states[-1] for h in (4e-3, 2e-3, 1e-3)]
    order = math.log2(np.linalg.norm(ends[0] - ends[1]) / np.linalg.norm(ends[1] - ends[2]))
    assert order >= 3.5


def test_batch_matches_single(arm, arm_crit, rng):
    X0 = np.concatenate([arm.q_star, np.zeros(2)]) + 0.05 * rng.standard_normal((5, 4))
    batch = final_states(arm, arm_crit.K_t, X0, 0.5, 1e-3)
    for k in range(5):
        single = integrate(arm, arm_crit.K_t, X0[k], 0.5, 1e-3).states[-1]
        np.testing.assert_allclose(batch[k], single, rtol=1e-12, atol=1e-14)


def test_blow_up_reports_time(arm, arm_crit):
    with pytest.raises(errors.NonFiniteState) as info:
        integrate(arm, 1e3 * np.eye(2), np.zeros(4), 1.0, 1e-2)
    assert info.value.step is not None and info.value.time > 0


def test_bad_grid():
    with pytest.raises(errors.ValidationError):
        integrate(oscillator(), [[1.0]], np.array([1.0, 0.0]), 1.0, 0.0)
    with pytest.raises(errors.DimensionMismatch):
        integrate(oscillator(), [[1.0]], np.array([1.0, 0.0, 0.0]), 1.0, 0.1)


def test_damped_oscillator_energy_rate():
    traj = integrate(oscillator(d=0.5), [[1.0]], np.array([1.0, 0.0]), 10.0, 1e-3)
    rep = energy_check(oscillator(d=0.5), [[1.0]], traj)
    assert rep.dissipation_consistent and rep.max_rel_error <= 1e-3
    # closed form dH/dt = -R v^2 with v = p for unit mass
    dH = np.gradient(traj.energies, traj.step)[1:-1]
    np.testing.assert_allclose(dH, -1.5 * traj.p[1:-1, 0] ** 2, atol=1e-3 * np.abs(dH).max())


def test_csv_layout(arm):
    traj = integrate(arm, np.eye(2), np.zeros(4), 0.01, 1e-3)
    text = traj.to_csv()
    header, *rows = text.strip().splitlines()
    assert header == "time,q1,q2,p1,p2,H"
    assert len(rows) == 11
    data = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1)
    np.testing.assert_allclose(data[:, -1], traj.energies, rtol=1e-11)


def _max_over(values):
    return max(v for v in values if v is not None)


def test_demo_overshoot_ordering(demo_cases):
    os_k0 = _max_over(demo_cases["kt0"].metrics.overshoot)
    os_07 = _max_over(demo_cases["zeta0.7"].metrics.overshoot)
    os_1 = _max_over(demo_cases["zeta1"].metrics.overshoot)
    assert os_1 < 0.5
    assert os_k0 > os_07 > os_1


def test_demo_settling_ordering(arm, arm_lin0, demo_cases):
    over = gain_for_zeta(arm_lin0, 1.0).kappa * 3 * np.eye(2)
    traj = integrate(arm, over, np.zeros(4), 10.0, 1e-3)
    t_over = response_metrics(traj, arm.q_star).max_settling_time
    t_07 = demo_cases["zeta0.7"].metrics.max_settling_time
    t_1 = demo_cases["zeta1"].metrics.max_settling_time
    assert t_07 < t_1 < t_over


def test_untuned_demo_oscillates(demo_cases):
    m = demo_cases["kt0"].metrics
    assert max(m.n_peaks) >= 2
    # empirical damping close to the dominant pole's damping ratio
    assert min(z for z in m.empirical_zeta if z is not None) == pytest.approx(0.178, abs=0.02)
    assert np.allclose(demo_cases["kt0"].trajectory.q[-1], [0.8, 0.8], atol=0.05)


def test_demo_energy_decreasing_while_moving(demo_cases):
    for label in ("zeta1", "zeta0.7"):
        tr = demo_cases[label].trajectory
        moving = np.linalg.norm(tr.p[1:], axis=1) > 1e-3
        assert np.all(np.diff(tr.energies)[moving] < 0)
        assert demo_cases[label].energy.monotone
