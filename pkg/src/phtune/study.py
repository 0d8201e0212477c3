"""Untuned vs. tuned closed loops of the planar manipulator."""
from dataclasses import dataclass

import numpy as np

from .linearization import linearize
from .model import planar_manipulator
from .simulate import energy_check, integrate, response_metrics
from .tuning import gain_for_zeta, spectral_min_gain


@dataclass(frozen=True)
class StudyConfig:
    horizon: float = 10.0
    step: float = 1e-3
    zeta_under: float = 0.7
    # reproduce the lambda_min(Z^T Z) variant of the no-overshoot gain
    spectral_min_variant: bool = False


@dataclass(frozen=True, eq=False)
class StudyCase:
    label: str
    gain: np.ndarray
    trajectory: object
    metrics: object
    energy: object
    tuning: object = None

    def summary(self):
        out = {
            "label": self.label,
            "kappa": self.tuning.kappa if self.tuning is not None else 0.0,
            "K_t": self.gain,
            "metrics": self.metrics.to_dict(),
            "energy": self.energy.to_dict(),
        }
        if self.tuning is not None:
            out["tuning"] = self.tuning.to_dict()
        return out


def run_study(sys=None, config=None, x0=None):
    """Simulate ``K_t = 0``, the no-overshoot gain and the underdamped gain.

    Returns cases keyed ``"kt0"``, ``"zeta1"`` and ``"zeta<z>"``.
    """
    sys = sys or planar_manipulator()
    config = config or StudyConfig()
    n = sys.n
    x0 = (np.zeros(n), np.zeros(n)) if x0 is None else x0
    lin = linearize(sys, np.zeros((n, n)))
    crit = spectral_min_gain(lin) if config.spectral_min_variant else gain_for_zeta(lin, 1.0)
    under = gain_for_zeta(lin, config.zeta_under)
    plan = [("kt0", np.zeros((n, n)), None), ("zeta1", crit.K_t, crit),
            (f"zeta{config.zeta_under:g}", under.K_t, under)]
    cases = {}
    for label, K, tuned in plan:
        traj = integrate(sys, K, x0, config.horizon, config.step)
        cases[label] = StudyCase(label, K, traj, response_metrics(traj, sys.q_star),
                                 energy_check(sys, K, traj), tuned)
    return cases


def plot_table(cases):
    """Columns ``time, q1_<label>, q2_<label>, ...`` for all cases on a shared grid."""
    first = next(iter(cases.values())).trajectory
    cols, header = [first.times], ["time"]
    for label, case in cases.items():
        for i in range(case.trajectory.q.shape[1]):
            cols.append(case.trajectory.q[:, i])
            header.append(f"q{i + 1}_{label}")
    return header, np.column_stack(cols)
