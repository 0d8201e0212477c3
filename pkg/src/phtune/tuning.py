"""Damping-injection gain selection.

All rules return ``K_t = kappa * I``.  With ``R = D* + K_t`` the damping
ratio of the slowest mode is lower-bounded through

    lambda_min(R) = 2 * zeta * sqrt(lambda_max(M*) * lambda_max(P)),

which at ``zeta = 1`` is the critical-damping gain of the mechanical bound.
The conservative rule instead enforces
``lambda_min(X)**2 >= 4 lambda_max(Z^T Z)`` on the saddle-point blocks.
"""
import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import errors
from ._linalg import lambda_max, lambda_min, sym
from .linearization import _build
from .saddle import check_real_spectrum, dominant_damping

KAPPA_FLOOR = 1e-6
KAPPA_CAP = 1e6
BISECT_TOL = 1e-9


class TuningRule(str, enum.Enum):
    CONSERVATIVE = "conservative"
    MECHANICAL_BOUND = "mechanical_bound"
    DAMPING_RATIO = "damping_ratio"
    # lambda_min(X)**2 = 4 lambda_min(Z^T Z): variant used for the manipulator study
    SPECTRAL_MIN = "spectral_min"


@dataclass(frozen=True, eq=False)
class TuningResult:
    K_t: np.ndarray
    kappa: float
    zeta_target: float
    lambda_min_R_required: float
    lambda_min_R_achieved: float
    rule: TuningRule
    achieved_dominant_zeta: float
    all_real: bool
    already_overdamped: bool = False

    def to_dict(self):
        return {
            "rule": self.rule.value,
            "kappa": float(self.kappa),
            "K_t": np.asarray(self.K_t).tolist(),
            "zeta_target": float(self.zeta_target),
            "lambda_min_R_required": float(self.lambda_min_R_required),
            "lambda_min_R_achieved": float(self.lambda_min_R_achieved),
            "achieved_dominant_zeta": float(self.achieved_dominant_zeta),
            "all_real": bool(self.all_real),
            "already_overdamped": bool(self.already_overdamped),
        }


def _at_damping(lin, D_star):
    if D_star is None:
        return lin
    D_star = sym(np.asarray(D_star, dtype=float))
    return _build(lin.Mstar, lin.P, D_star, lin.K, lin.phi_M, lin.phi_P)


def _result(lin, kappa, zeta_target, required, rule, overdamped=False):
    K = kappa * np.eye(lin.n)
    tuned = lin.with_gain(K)
    report = check_real_spectrum(tuned.N)
    return TuningResult(
        K_t=K, kappa=float(kappa), zeta_target=float(zeta_target),
        lambda_min_R_required=float(required),
        lambda_min_R_achieved=lambda_min(tuned.R),
        rule=rule, achieved_dominant_zeta=float(report.dominant_zeta),
        all_real=report.all_real, already_overdamped=overdamped)


def required_lambda_min_R(lin, zeta):
    return 2.0 * zeta * math.sqrt(lambda_max(lin.Mstar) * lambda_max(lin.P))


def gain_for_zeta(lin, zeta, D_star=None, strict=False):
    """Scalar gain placing the damping-ratio bound at ``zeta``.

    ``D_star`` overrides the open-loop damping at the equilibrium (defaults to
    the one stored in ``lin``).  If that damping alone already meets the
    target, a floor gain ``KAPPA_FLOOR * I`` is returned with
    ``already_overdamped`` set, or :class:`AlreadyOverdamped` is raised when
    ``strict``.
    """
    if not (0.0 < zeta <= 1.0) or not math.isfinite(zeta):
        raise errors.InvalidZeta(f"zeta must lie in (0, 1], got {zeta}")
    lin = _at_damping(lin, D_star)
    required = required_lambda_min_R(lin, zeta)
    kappa = required - lambda_min(lin.D_star)
    overdamped = kappa <= KAPPA_FLOOR
    if overdamped:
        if strict:
            raise errors.AlreadyOverdamped(
                f"open-loop damping {lambda_min(lin.D_star):.6g} already exceeds "
                f"required {required:.6g}")
        warnings.warn("open-loop damping already meets the target; using floor gain",
                      RuntimeWarning, stacklevel=2)
        kappa = KAPPA_FLOOR
    rule = TuningRule.MECHANICAL_BOUND if zeta == 1.0 else TuningRule.DAMPING_RATIO
    return _result(lin, kappa, zeta, required, rule, overdamped)


def _smallest_kappa(condition):
    """Smallest ``kappa >= KAPPA_FLOOR`` with ``condition(kappa)`` true (monotone)."""
    if condition(KAPPA_FLOOR):
        return KAPPA_FLOOR
    lo, hi = KAPPA_FLOOR, 1.0
    while not condition(hi):
        lo, hi = hi, 2.0 * hi
        if hi > KAPPA_CAP:
            raise errors.BracketFailure(
                f"no admissible gain below {KAPPA_CAP:g}; model may be ill-scaled")
    while hi - lo > BISECT_TOL * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if condition(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _x_min(lin, kappa):
    return lambda_min(lin.phi_M @ (lin.D_star + kappa * np.eye(lin.n)) @ lin.phi_M.T)


def conservative_gain(lin, D_star=None):
    """Smallest scalar gain with ``lambda_min(X)**2 >= 4 lambda_max(Z^T Z)``."""
    lin = _at_damping(lin, D_star)
    ztz_max = lambda_max(lin.ZtZ)
    kappa = _smallest_kappa(lambda k: _x_min(lin, k) ** 2 >= 4.0 * ztz_max)
    res = _result(lin, kappa, 1.0, lambda_min(lin.D_star) + kappa, TuningRule.CONSERVATIVE)
    if not res.all_real:
        raise errors.NumericalError("conservative gain did not produce a real spectrum")
    return res


def spectral_min_gain(lin, D_star=None):
    """Smallest scalar gain with ``lambda_min(X)**2 >= 4 lambda_min(Z^T Z)``.

    Less demanding than :func:`conservative_gain`; for ``R`` and ``P``
    proportional to the identity it coincides with the critical gain.
    """
    lin = _at_damping(lin, D_star)
    ztz_min = lambda_min(lin.ZtZ)
    kappa = _smallest_kappa(lambda k: _x_min(lin, k) ** 2 >= 4.0 * ztz_min)
    return _result(lin, kappa, 1.0, lambda_min(lin.D_star) + kappa, TuningRule.SPECTRAL_MIN)


def predicted_damping(lin, K):
    """``(zeta_bound, zeta_achieved)`` for gain ``K``.

    The bound is ``min(1, lambda_min(R) / (2 sqrt(lambda_max(M*) lambda_max(P))))``;
    the achieved value is the damping ratio of the slowest closed-loop pole.
    """
    tuned = lin.with_gain(K)
    bound = 0.5 * lambda_min(tuned.R) / math.sqrt(lambda_max(lin.Mstar) * lambda_max(lin.P))
    _, achieved = dominant_damping(check_real_spectrum(tuned.N))
    return min(1.0, bound), achieved


def damping_sweep(lin, kappas):
    """Achieved dominant damping ratio for each ``K_t = kappa * I``."""
    return np.array([predicted_damping(lin, k * np.eye(lin.n))[1] for k in kappas])
