"""Damping ratio of the slowest pole as the scalar gain grows.

Compares the eigenvalue-based achieved ratio with the mass/stiffness bound
and marks the gains chosen by each tuning rule.
"""
import argparse
import csv
import sys
from dataclasses import dataclass

import numpy as np

from phtune import (check_real_spectrum, conservative_gain, gain_for_zeta, linearize,
                    planar_manipulator, predicted_damping)
from phtune.tuning import spectral_min_gain


@dataclass(frozen=True)
class SweepConfig:
    kappa_max: float = 30.0
    points: int = 61


def main(cfg, out=sys.stdout):
    arm = planar_manipulator()
    lin = linearize(arm, np.zeros((2, 2)))
    marks = {
        "zeta=1": gain_for_zeta(lin, 1.0).kappa,
        "zeta=0.7": gain_for_zeta(lin, 0.7).kappa,
        "conservative": conservative_gain(lin).kappa,
        "spectral_min": spectral_min_gain(lin).kappa,
    }
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["kappa", "zeta_bound", "zeta_achieved", "all_real"])
    for kappa in np.linspace(0.0, cfg.kappa_max, cfg.points):
        tuned = lin.with_gain(kappa * np.eye(2))
        bound, achieved = predicted_damping(lin, tuned.K)
        w.writerow([f"{kappa:.6g}", f"{bound:.9g}", f"{achieved:.9g}",
                    int(check_real_spectrum(tuned.N).all_real)])
    for name, kappa in marks.items():
        print(f"# {name}: kappa = {kappa:.9g}", file=sys.stderr)


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kappa-max", type=float, default=SweepConfig.kappa_max)
    ap.add_argument("--points", type=int, default=SweepConfig.points)
    a = ap.parse_args()
    main(SweepConfig(a.kappa_max, a.points))
