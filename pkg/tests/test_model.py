import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phtune import ManipulatorParams, closed_loop_field, hamiltonian, oscillator, planar_manipulator, power_balance
from phtune import errors
from phtune.model import MechanicalSystem, dH_dq

from helpers import random_manipulator

# inertia arithmetic from the default parameters: a1 = m1 r1^2 + m2 l1^2 + I1, a2 = m2 r2^2 + I2, b = m2 l1 r2
A1, A2, B = 0.147649, 0.0725, 0.08575


def test_inertia_constants():
    p = ManipulatorParams()
    assert p.a1 == pytest.approx(A1, abs=1e-15)
    assert p.a2 == pytest.approx(A2, abs=1e-15)
    assert p.b == pytest.approx(B, abs=1e-15)


def test_mass_at_right_angle(arm):
    np.testing.assert_allclose(arm.mass(np.array([0.3, math.pi / 2])),
                               [[A1 + A2, A2], [A2, A2]], atol=1e-15)


def test_mass_lower_right_is_constant(arm):
    for q2 in (0.0, 0.8, 2.5, -3.0):
        assert arm.mass(np.array([0.0, q2]))[1, 1] == A2


def test_mass_positive_definite_on_grid(arm):
    q2 = np.linspace(-math.pi, math.pi, 1001)
    M = arm.mass(np.column_stack([np.zeros_like(q2), q2]))
    np.testing.assert_array_equal(M, np.swapaxes(M, -1, -2))
    assert np.linalg.det(M).min() >= 1e-3
    assert np.linalg.eigvalsh(M).min() > 0


def test_hamiltonian_examples(arm):
    assert hamiltonian(arm, arm.q_star, np.zeros(2)) == 0.0
    assert hamiltonian(arm, np.zeros(2), np.zeros(2)) == pytest.approx(12.8, abs=1e-12)
    assert hamiltonian(oscillator(), np.array([1.0]), np.array([1.0])) == pytest.approx(1.0)


def test_field_examples(arm):
    K = 2 * np.eye(2)
    qdot, pdot = closed_loop_field(arm, K, arm.q_star, np.zeros(2))
    np.testing.assert_array_equal(qdot, 0)
    np.testing.assert_array_equal(pdot, 0)
    qdot, pdot = closed_loop_field(oscillator(), [[2.0]], np.array([1.0]), np.array([0.0]))
    assert qdot[0] == 0.0 and pdot[0] == -1.0
    qdot, pdot = closed_loop_field(arm, np.zeros((2, 2)), np.zeros(2), np.zeros(2))
    np.testing.assert_allclose(qdot, 0, atol=0)
    np.testing.assert_allclose(pdot, [16.0, 16.0], rtol=1e-14)


def test_power_examples(arm):
    assert power_balance(arm, np.eye(2), np.zeros(2), np.zeros(2)) == 0.0
    assert power_balance(oscillator(), [[2.0]], np.array([0.0]), np.array([1.0])) == -2.0
    p = np.array([0.1, 0.1])
    v = np.linalg.solve(arm.mass(np.zeros(2)), p)
    pw = power_balance(arm, np.zeros((2, 2)), np.zeros(2), p)
    assert pw < 0
    assert pw == pytest.approx(-v @ v, rel=1e-12)


def test_invalid_params():
    with pytest.raises(errors.InvalidParams):
        planar_manipulator(ManipulatorParams(m1=-1.0))
    with pytest.raises(errors.InvalidParams):
        planar_manipulator(ManipulatorParams(Kp=((1.0, 2.0), (2.0, 1.0))))


def test_singular_mass_detected():
    sys = MechanicalSystem(n=1, mass=lambda q: np.array([[0.0]]), potential=lambda q: 0.5 * q @ q,
                           potential_grad=lambda q: q, q_star=np.zeros(1))
    with pytest.raises(errors.SingularMass):
        hamiltonian(sys, np.zeros(1), np.ones(1))


def test_finite_difference_mass_gradient(arm):
    fd_arm = replace(arm, mass_grad=None)
    for q in ([0.0, 0.0], [0.3, 0.8], [1.0, 2.0]):
        np.testing.assert_allclose(fd_arm.dM(np.array(q)), arm.dM(np.array(q)), atol=1e-8)


states = st.lists(st.floats(-3, 3), min_size=4, max_size=4)


def _fd_grad(f, q, rel=1e-6):
    g = np.empty(q.size)
    for i in range(q.size):
        h = rel * (1 + abs(q[i]))
        e = np.zeros(q.size)
        e[i] = h
        g[i] = (f(q + e) - f(q - e)) / (2 * h)
    return g


@settings(max_examples=80, deadline=None)
@given(states)
def test_gradient_consistency(x):
    arm = planar_manipulator()
    q, p = np.array(x[:2]), np.array(x[2:])
    gV = _fd_grad(arm.potential, q)
    assert np.allclose(arm.potential_grad(q), gV, rtol=1e-6, atol=1e-6 * (1 + np.abs(gV).max()))
    gH = _fd_grad(lambda qq: hamiltonian(arm, qq, p), q)
    assert np.allclose(dH_dq(arm, q, p), gH, rtol=1e-5, atol=1e-5 * (1 + np.abs(gH).max()))


@settings(max_examples=80, deadline=None)
@given(states, st.floats(0.0, 10.0))
def test_passivity(x, kappa):
    arm = planar_manipulator()
    q, p = np.array(x[:2]), np.array(x[2:])
    pw = power_balance(arm, kappa * np.eye(2), q, p)
    assert pw <= 0.0
    if np.linalg.norm(p) > 1e-100:  # v^T v underflows below this
        assert pw < 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_equilibrium_is_fixed_point(seed):
    rng = np.random.default_rng(seed)
    sys = random_manipulator(rng)
    K = rng.uniform(0, 5) * np.eye(2)
    qdot, pdot = closed_loop_field(sys, K, sys.q_star, np.zeros(2))
    assert np.all(qdot == 0) and np.allclose(pdot, 0, atol=1e-14)


def test_batched_evaluation_matches_loop(arm, rng):
    q = rng.uniform(-2, 2, (7, 2))
    p = rng.uniform(-1, 1, (7, 2))
    K = 3 * np.eye(2)
    qb, pb = closed_loop_field(arm, K, q, p)
    for k in range(7):
        qk, pk = closed_loop_field(arm, K, q[k], p[k])
        np.testing.assert_allclose(qb[k], qk, rtol=1e-14)
        np.testing.assert_allclose(pb[k], pk, rtol=1e-13, atol=1e-14)
    np.testing.assert_allclose(hamiltonian(arm, q, p), [hamiltonian(arm, q[k], p[k]) for k in range(7)])
