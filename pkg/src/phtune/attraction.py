"""Quadratic-Lyapunov estimate of the domain of attraction of ``(q*, 0)``.

With ``P A + A^T P = -Q`` and the closed loop written as
``xdot = A x + f_r(x)``, any ``gamma < lambda_min(Q) / (2 ||P||)`` gives

    Vdot <= -(lambda_min(Q) - 2 gamma ||P||) ||x||**2 < 0

wherever ``||f_r(x)|| < gamma ||x||``.  If that holds on the ball of radius
``rho`` then the sublevel set ``{x^T P x <= c}`` with ``c < lambda_min(P) rho**2``
lies inside the ball and estimates the domain of attraction.

The radius is found by sampling, so the result is an estimate rather than
a proof.
"""
import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import norm, qmc

from . import errors
from ._linalg import lambda_max, lambda_min, sym
from .model import closed_loop_field

LYAP_RTOL = 1e-10
GAMMA_SAFETY = 0.9
LEVEL_SAFETY = 0.99


def default_seed():
    return int(os.environ.get("PHTUNE_SEED", "42"))


@dataclass(frozen=True)
class SamplingConfig:
    n_dirs: int = 256
    n_radii: int = 32
    rho_cap: float = 2.0
    decades: float = 6.0
    seed: int = 42


def is_hurwitz(A):
    return bool(np.max(np.linalg.eigvals(A).real) < 0.0)


def solve_lyapunov(A, Q):
    """Symmetric positive definite ``P`` with ``P A + A^T P = -Q``."""
    A = np.asarray(A, dtype=float)
    Q = sym(np.asarray(Q, dtype=float))
    if not is_hurwitz(A):
        raise errors.NotHurwitz("state matrix is not Hurwitz")
    try:
        P = scipy.linalg.solve_continuous_lyapunov(A.T, -Q)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise errors.SolveFailure(str(exc)) from exc
    P = sym(P)
    res = np.linalg.norm(P @ A + A.T @ P + Q)
    if not res <= LYAP_RTOL * np.linalg.norm(Q):
        raise errors.SolveFailure(f"Lyapunov residual {res:.3g} too large")
    if lambda_min(P) <= 0.0:
        raise errors.SolveFailure("Lyapunov solution is not positive definite")
    return P


def lyapunov_residual(P, A, Q):
    """Relative Frobenius residual of the Lyapunov equation."""
    return float(np.linalg.norm(P @ A + A.T @ P + Q) / np.linalg.norm(Q))


def remainder_field(sys, K, lin, x):
    """Nonlinear remainder ``f_r(x) = F((q*, 0) + x) - A x`` (batch over rows)."""
    x = np.asarray(x, dtype=float)
    n = sys.n
    qs = np.asarray(sys.q_star, dtype=float)
    if sys.vectorized or x.ndim == 1:
        qdot, pdot = closed_loop_field(sys, K, qs + x[..., :n], x[..., n:])
        F = np.concatenate([qdot, pdot], axis=-1)
    else:
        F = np.array([np.concatenate(closed_loop_field(sys, K, qs + r[:n], r[n:])) for r in x])
    return F - x @ lin.A.T


def sphere_directions(dim, n_dirs, seed):
    """Deterministic directions on the unit sphere: coordinate axes plus scrambled Halton points."""
    eye = np.eye(dim)
    u = qmc.Halton(d=dim, scramble=True, seed=seed).random(n_dirs)
    g = norm.ppf(np.clip(u, 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return np.vstack([eye, -eye, g])


@dataclass(frozen=True, eq=False)
class DoAEstimate:
    P_lyap: np.ndarray
    Q: np.ndarray
    gamma: float
    gamma_max: float
    rho: float
    c: float
    lambda_min_P: float
    samples_checked: int
    margin: float

    @property
    def decay_rate(self):
        """Guaranteed ``lambda_min(Q) - 2 gamma ||P||`` in the decrease bound."""
        return lambda_min(self.Q) - 2.0 * self.gamma * lambda_max(self.P_lyap)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.P_lyap, x)

    def contains(self, x):
        return self.value(x) <= self.c

    def sample_inside(self, count, rng):
        """Points drawn uniformly from the ellipsoid ``{x^T P x <= c}``."""
        d = self.P_lyap.shape[0]
        g = rng.standard_normal((count, d))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        y = g * np.sqrt(self.c) * rng.uniform(size=(count, 1)) ** (1.0 / d)
        L = np.linalg.cholesky(self.P_lyap)
        return scipy.linalg.solve_triangular(L, y.T, lower=True, trans="T").T

    def to_dict(self):
        return {
            "gamma": self.gamma,
            "gamma_max": self.gamma_max,
            "rho": self.rho,
            "c": self.c,
            "lambda_min_P": self.lambda_min_P,
            "margin": self.margin,
            "samples_checked": self.samples_checked,
            "note": "sampling-based estimate, not a proof",
        }


def estimate_domain(sys, K, lin, Q=None, sampling=None):
    """Largest sampled radius on which the remainder stays below ``gamma ||x||``.

    Radii are log-spaced over ``sampling.decades`` decades up to
    ``sampling.rho_cap`` and accepted from the smallest upwards; the first
    shell with a violation stops the search.
    """
    sampling = sampling or SamplingConfig()
    dim = 2 * sys.n
    Q = np.eye(dim) if Q is None else sym(np.asarray(Q, dtype=float))
    if Q.shape != (dim, dim):
        raise errors.DimensionMismatch(f"Q must be {dim}x{dim}")
    P = solve_lyapunov(lin.A, Q)
    gamma_max = lambda_min(Q) / (2.0 * lambda_max(P))
    gamma = GAMMA_SAFETY * gamma_max
    dirs = sphere_directions(dim, sampling.n_dirs, sampling.seed)
    top = np.log10(sampling.rho_cap)
    radii = np.logspace(top - sampling.decades, top, sampling.n_radii)
    rho, margin, checked = None, np.inf, 0
    for r in radii:
        x = r * dirs
        slack = gamma * r - np.linalg.norm(remainder_field(sys, K, lin, x), axis=1)
        if np.any(slack <= 0.0):
            break
        rho, margin, checked = r, min(margin, float(slack.min())), checked + len(x)
    if rho is None:
        raise errors.NoValidRadius(
            f"remainder bound fails already at radius {radii[0]:.3g}")
    lmin = lambda_min(P)
    return DoAEstimate(P_lyap=P, Q=Q, gamma=float(gamma), gamma_max=float(gamma_max),
                       rho=float(rho), c=float(LEVEL_SAFETY * lmin * rho ** 2),
                       lambda_min_P=float(lmin), samples_checked=int(checked),
                       margin=float(margin))


def validate_by_simulation(sys, K, est, count=20, horizon=20.0, step=1e-3, seed=None):
    """Distances to the equilibrium after ``horizon`` for initial states in the level set."""
    from .simulate import final_states

    rng = np.random.default_rng(default_seed() if seed is None else seed)
    offsets = est.sample_inside(count, rng)
    x_star = np.concatenate([sys.q_star, np.zeros(sys.n)])
    xf = final_states(sys, K, x_star + offsets, horizon, step)
    return offsets, np.linalg.norm(xf - x_star, axis=1)
