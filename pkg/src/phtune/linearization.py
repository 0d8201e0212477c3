"""Linearized closed loop at ``(q*, 0)`` and its saddle-point similar form.

With ``M*^{-1} = phi_M^T phi_M`` and ``P = phi_P^T phi_P`` the transform
``W = [[0, phi_M], [phi_P, 0]]`` maps ``x = (q - q*, p)`` to ``z = W x`` and
``zdot = -N z`` with

    N = -W A W^{-1} = [[phi_M R phi_M^T, phi_M phi_P^T],
                       [-phi_P phi_M^T,  0            ]].
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import errors
from ._linalg import (check_positive_definite, check_positive_semidefinite,
                      is_positive_definite, sym, upper_cholesky)
from .model import as_gain
from .saddle import assemble_saddle

TRANSFORM_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class Linearization:
    Mstar: np.ndarray
    Mstar_inv: np.ndarray
    P: np.ndarray
    D_star: np.ndarray
    K: np.ndarray
    R: np.ndarray
    A: np.ndarray
    phi_M: np.ndarray
    phi_P: np.ndarray
    W: np.ndarray

    @property
    def n(self):
        return self.Mstar.shape[0]

    @property
    def ZtZ(self):
        Z = self.phi_P @ self.phi_M.T
        return sym(Z.T @ Z)

    @cached_property
    def N(self):
        return saddle_transform(self)

    def with_gain(self, K):
        """Same operating point, different damping-injection gain."""
        return _build(self.Mstar, self.P, self.D_star, as_gain(K, self.n), self.phi_M, self.phi_P)


def state_matrix(Mstar_inv, P, R):
    n = P.shape[0]
    return np.block([[np.zeros((n, n)), Mstar_inv],
                     [-P, -R @ Mstar_inv]])


def factorize(Mstar_inv, P):
    """Upper-triangular factors with ``phi_M^T phi_M = M*^{-1}``, ``phi_P^T phi_P = P``."""
    return upper_cholesky(Mstar_inv, "M*^-1"), upper_cholesky(P, "P")


def _build(Mstar, P, D_star, K, phi_M=None, phi_P=None):
    n = Mstar.shape[0]
    Mstar_inv = sym(np.linalg.inv(Mstar))
    R = sym(D_star + K)
    try:
        check_positive_semidefinite(R, "D(q*, 0) + K_t")
    except errors.ValidationError as exc:
        raise errors.IndefiniteR(str(exc)) from exc
    if phi_M is None:
        phi_M, phi_P = factorize(Mstar_inv, P)
    A = state_matrix(Mstar_inv, P, R)
    W = np.block([[np.zeros((n, n)), phi_M], [phi_P, np.zeros((n, n))]])
    return Linearization(Mstar=Mstar, Mstar_inv=Mstar_inv, P=P, D_star=D_star, K=K,
                         R=R, A=A, phi_M=phi_M, phi_P=phi_P, W=W)


def linearize(sys, K):
    """Linearize the closed loop of ``sys`` under gain ``K`` about ``(q*, 0)``.

    The configuration Hessian of H at ``p = 0`` equals the potential Hessian
    because the kinetic term is quadratic in ``p``.
    """
    n = sys.n
    K = as_gain(K, n)
    qs = np.asarray(sys.q_star, dtype=float)
    g = np.asarray(sys.potential_grad(qs), dtype=float)
    P = sym(sys.hessian_V(qs))
    if np.linalg.norm(g) > 1e-8 * (1.0 + np.abs(P).max()):
        raise errors.NotAnEquilibrium(f"potential gradient at q* is {g}")
    check_positive_definite(P, "potential Hessian at q*", exc=errors.IndefiniteHessian)
    Mstar = sym(np.asarray(sys.mass(qs), dtype=float))
    if not is_positive_definite(Mstar):
        raise errors.SingularMass("M(q*) is not positive definite")
    D_star = sym(sys.D(qs, np.zeros(n)))
    check_positive_semidefinite(D_star, "D(q*, 0)")
    return _build(Mstar, P, D_star, K)


def saddle_transform(lin):
    """Saddle-point form of ``-A``, checked through ``N W + W A = 0``.

    ``W`` is never inverted.  Needs ``R`` positive definite; an undamped
    linearization is still usable as the starting point of the tuning rules.
    """
    if not is_positive_definite(lin.R):
        raise errors.IndefiniteR("D(q*, 0) + K_t is not positive definite")
    phi_M, phi_P = lin.phi_M, lin.phi_P
    X = sym(phi_M @ lin.R @ phi_M.T)
    Z = phi_P @ phi_M.T
    N = assemble_saddle(X, Z, np.zeros_like(X))
    mismatch = np.linalg.norm(N.full() @ lin.W + lin.W @ lin.A)
    scale = np.linalg.norm(lin.W) * np.linalg.norm(lin.A)
    if mismatch > TRANSFORM_RTOL * scale:
        raise errors.TransformMismatch(
            f"N W + W A residual {mismatch:.3g} exceeds tolerance")
    return N
