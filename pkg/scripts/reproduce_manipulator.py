"""Untuned vs. tuned step responses of the planar arm.

Writes one CSV per case plus a metrics table to ``--out``.
"""
import argparse
import os
from dataclasses import dataclass

import numpy as np

from phtune.study import StudyConfig, plot_table, run_study
from phtune.systems_io import dumps


@dataclass(frozen=True)
class Config:
    out: str = "results/manipulator"
    study: StudyConfig = StudyConfig()


def main(cfg):
    cases = run_study(config=cfg.study)
    os.makedirs(cfg.out, exist_ok=True)
    for label, case in cases.items():
        case.trajectory.to_csv(os.path.join(cfg.out, f"trajectory_{label}.csv"))
    header, table = plot_table(cases)
    np.savetxt(os.path.join(cfg.out, "plot_data.csv"), table, delimiter=",",
               header=",".join(header), comments="", fmt="%.12g")
    with open(os.path.join(cfg.out, "metrics.json"), "w") as fh:
        fh.write(dumps({k: c.summary() for k, c in cases.items()}))
    print(f"{'case':10s} {'kappa':>9s} {'overshoot %':>22s} {'settling s':>18s}")
    for label, case in cases.items():
        m = case.metrics
        kappa = case.tuning.kappa if case.tuning else 0.0
        print(f"{label:10s} {kappa:9.4f} {m.overshoot[0]:10.3f} {m.overshoot[1]:10.3f}   "
              f"{m.settling_time[0] or float('nan'):8.3f} {m.settling_time[1] or float('nan'):8.3f}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=Config.out)
    ap.add_argument("--zeta", type=float, default=0.7, help="underdamped comparison target")
    ap.add_argument("--step", type=float, default=1e-3)
    ap.add_argument("--horizon", type=float, default=10.0)
    ap.add_argument("--spectral-min", action="store_true")
    a = ap.parse_args()
    main(Config(a.out, StudyConfig(a.horizon, a.step, a.zeta, a.spectral_min)))
