"""Fully actuated port-Hamiltonian mechanical systems.

The open-loop model is

    qdot =  dH/dp
    pdot = -dH/dq - D(q, p) dH/dp + u,     H = 1/2 p^T M(q)^{-1} p + V(q),

and damping injection closes the loop with ``u = -K_t dH/dp``.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import errors
from ._linalg import as_matrix, check_positive_definite, check_positive_semidefinite

FD_REL_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class MechanicalSystem:
    """A mechanical system described by callables of ``q`` (and ``p``).

    ``mass_grad(q)`` returns an ``(n, n, n)`` array whose slice ``[i]`` is
    ``dM/dq_i``; when absent it is replaced by central differences of
    ``mass``.  ``potential_hess`` falls back to differences of
    ``potential_grad`` in the same way.  ``damping`` defaults to zero.

    When ``vectorized`` is set every callable broadcasts over leading axes of
    ``q`` (and ``p``), which the batch integrator exploits.
    """
    n: int
    mass: Callable
    potential: Callable
    potential_grad: Callable
    q_star: np.ndarray
    damping: Optional[Callable] = None
    potential_hess: Optional[Callable] = None
    mass_grad: Optional[Callable] = None
    vectorized: bool = False
    description: Optional[dict] = field(default=None, compare=False)

    def D(self, q, p):
        if self.damping is None:
            return np.zeros((self.n, self.n))
        return np.asarray(self.damping(q, p), dtype=float)

    def hessian_V(self, q):
        q = np.asarray(q, dtype=float)
        if self.potential_hess is not None:
            return np.asarray(self.potential_hess(q), dtype=float)
        H = np.empty((self.n, self.n))
        for i in range(self.n):
            h = 1e-5 * (1.0 + abs(q[i]))
            e = np.zeros(self.n)
            e[i] = h
            H[:, i] = (self.potential_grad(q + e) - self.potential_grad(q - e)) / (2 * h)
        return 0.5 * (H + H.T)

    def dM(self, q):
        q = np.asarray(q, dtype=float)
        if self.mass_grad is not None:
            return np.asarray(self.mass_grad(q), dtype=float)
        out = np.empty((self.n, self.n, self.n))
        for i in range(self.n):
            h = FD_REL_STEP * (1.0 + abs(q[i]))
            e = np.zeros(self.n)
            e[i] = h
            out[i] = (self.mass(q + e) - self.mass(q - e)) / (2 * h)
        return out


def velocity(sys, q, p):
    """``dH/dp = M(q)^{-1} p``; raises :class:`SingularMass` if M fails to factor.

    Like the other evaluation functions this accepts a leading batch axis
    when the system is ``vectorized``.
    """
    M = np.asarray(sys.mass(q), dtype=float)
    try:
        np.linalg.cholesky(M)
    except np.linalg.LinAlgError as exc:
        raise errors.SingularMass(f"mass matrix not positive definite at q={q}") from exc
    return np.linalg.solve(M, p[..., None])[..., 0]


def hamiltonian(sys, q, p):
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    v = velocity(sys, q, p)
    H = 0.5 * np.einsum("...i,...i->...", p, v) + np.asarray(sys.potential(q), dtype=float)
    return float(H) if H.ndim == 0 else H


def dH_dq(sys, q, p, v=None):
    """Configuration gradient of H, including the ``M(q)`` dependence.

    Uses ``d(M^{-1})/dq_i = -M^{-1} (dM/dq_i) M^{-1}`` so the kinetic part is
    ``-1/2 v^T (dM/dq_i) v`` with ``v = M^{-1} p``.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if v is None:
        v = velocity(sys, q, p)
    g = np.asarray(sys.potential_grad(q), dtype=float)
    if np.any(v):
        g = g - 0.5 * np.einsum("...j,...ijk,...k->...i", v, sys.dM(q), v)
    return g


def closed_loop_field(sys, K, q, p):
    """Right-hand side ``(qdot, pdot)`` of the damping-injected closed loop."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    v = velocity(sys, q, p)
    pdot = -dH_dq(sys, q, p, v) - ((sys.D(q, p) + K) @ v[..., None])[..., 0]
    return v, pdot


def power_balance(sys, K, q, p):
    """Rate of change of H along the closed loop: ``-v^T (D + K_t) v``."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    v = velocity(sys, q, p)
    out = -np.einsum("...i,...ij,...j->...", v, sys.D(q, p) + K, v)
    return float(out) if out.ndim == 0 else out


def as_gain(K, n, allow_zero=True):
    """Validate a damping-injection gain.

    The tuning rules always return positive definite gains; ``K_t = 0`` (the
    untuned baseline) is admitted unless ``allow_zero`` is False.
    """
    K = as_matrix(K, "K_t")
    if K.shape != (n, n):
        raise errors.DimensionMismatch(f"K_t must be {n}x{n}, got {K.shape}")
    if allow_zero:
        check_positive_semidefinite(K, "K_t")
    else:
        check_positive_definite(K, "K_t")
    return 0.5 * (K + K.T)


# -- builtin models -----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ManipulatorParams:
    """2-DoF planar arm, already energy-shaped to a quadratic potential.

    Defaults are the reference arm used throughout the tests (SI units, angles in rad).
    """
    m1: float = 0.5
    m2: float = 1.0
    I1: float = 0.01
    I2: float = 0.01
    r1: float = 0.2
    r2: float = 0.25
    l1: float = 0.343
    l2: float = 0.275
    Kp: tuple = ((20.0, 0.0), (0.0, 20.0))
    Kd: tuple = ((1.0, 0.0), (0.0, 1.0))
    q_star: tuple = (0.8, 0.8)

    @property
    def a1(self):
        return self.m1 * self.r1 ** 2 + self.m2 * self.l1 ** 2 + self.I1

    @property
    def a2(self):
        return self.m2 * self.r2 ** 2 + self.I2

    @property
    def b(self):
        return self.m2 * self.l1 * self.r2

    def validate(self):
        for name in ("m1", "m2", "I1", "I2", "r1", "r2", "l1", "l2"):
            if not getattr(self, name) > 0:
                raise errors.InvalidParams(f"{name} must be positive")
        try:
            check_positive_definite(np.asarray(self.Kp, dtype=float), "Kp")
            check_positive_definite(np.asarray(self.Kd, dtype=float), "Kd")
        except errors.ValidationError as exc:
            raise errors.InvalidParams(str(exc)) from exc
        if np.shape(self.Kp) != (2, 2) or np.shape(self.Kd) != (2, 2) or len(self.q_star) != 2:
            raise errors.InvalidParams("Kp, Kd must be 2x2 and q_star length 2")
        if self.a1 * self.a2 <= self.b ** 2:
            raise errors.InvalidParams("mass matrix is singular for some q2")


def _quadratic(Kp, qs):
    def V(q):
        e = np.asarray(q, dtype=float) - qs
        return 0.5 * np.einsum("...i,ij,...j->...", e, Kp, e)
    return V


def planar_manipulator(params=None):
    params = params or ManipulatorParams()
    params.validate()
    a1, a2, b = params.a1, params.a2, params.b
    Kp = np.asarray(params.Kp, dtype=float)
    Kd = np.asarray(params.Kd, dtype=float)
    qs = np.asarray(params.q_star, dtype=float)

    def mass(q):
        c = np.cos(np.asarray(q)[..., 1])
        M = np.empty(c.shape + (2, 2))
        M[..., 0, 0] = a1 + a2 + 2 * b * c
        M[..., 0, 1] = M[..., 1, 0] = a2 + b * c
        M[..., 1, 1] = a2
        return M

    def mass_grad(q):
        s = np.sin(np.asarray(q)[..., 1])
        out = np.zeros(s.shape + (2, 2, 2))
        out[..., 1, 0, 0] = -2 * b * s
        out[..., 1, 0, 1] = out[..., 1, 1, 0] = -b * s
        return out

    desc = {"type": "planar_manipulator"}
    for name in ("m1", "m2", "I1", "I2", "r1", "r2", "l1", "l2"):
        desc[name] = float(getattr(params, name))
    desc.update(Kp=Kp.tolist(), Kd=Kd.tolist(), q_star=qs.tolist())
    return MechanicalSystem(
        n=2,
        mass=mass,
        potential=_quadratic(Kp, qs),
        potential_grad=lambda q: (q - qs) @ Kp,
        potential_hess=lambda q: Kp.copy(),
        damping=lambda q, p: Kd,
        mass_grad=mass_grad,
        vectorized=True,
        q_star=qs,
        description=desc,
    )


def linear_mechanical(M, Kp, Kd=None, q_star=None):
    """Constant-mass system with ``V = 1/2 (q-q*)^T Kp (q-q*)`` and ``D = Kd``."""
    M = as_matrix(M, "M")
    n = M.shape[0]
    Kp = as_matrix(Kp, "Kp")
    Kd = np.zeros((n, n)) if Kd is None else as_matrix(Kd, "Kd")
    qs = np.zeros(n) if q_star is None else np.atleast_1d(np.asarray(q_star, dtype=float))
    if Kp.shape != (n, n) or Kd.shape != (n, n) or qs.shape != (n,):
        raise errors.InvalidParams("M, Kp, Kd, q_star dimensions disagree")
    try:
        check_positive_definite(M, "M")
        check_positive_definite(Kp, "Kp")
        check_positive_semidefinite(Kd, "Kd")
    except errors.ValidationError as exc:
        raise errors.InvalidParams(str(exc)) from exc
    return MechanicalSystem(
        n=n,
        mass=lambda q: np.broadcast_to(M, np.shape(q)[:-1] + (n, n)),
        potential=_quadratic(Kp, qs),
        potential_grad=lambda q: (q - qs) @ Kp,
        potential_hess=lambda q: Kp.copy(),
        damping=lambda q, p: Kd,
        mass_grad=lambda q: np.zeros(np.shape(q)[:-1] + (n, n, n)),
        vectorized=True,
        q_star=qs,
        description={"type": "linear_mechanical", "M": M.tolist(), "Kp": Kp.tolist(),
                     "Kd": Kd.tolist(), "q_star": qs.tolist()},
    )


def oscillator(m=1.0, k=1.0, d=0.0, q_star=0.0):
    """1-DoF mass-spring-damper."""
    return linear_mechanical([[m]], [[k]], [[d]], [q_star])
