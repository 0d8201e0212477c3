"""Domain-of-attraction estimate for the critically tuned arm, checked by simulation."""
import argparse
from dataclasses import dataclass

import numpy as np

from phtune import estimate_domain, gain_for_zeta, linearize, planar_manipulator
from phtune.attraction import SamplingConfig, default_seed, validate_by_simulation
from phtune.simulate import final_states


@dataclass(frozen=True)
class DoAConfig:
    zeta: float = 1.0
    q_scale: float = 1.0
    samples: int = 20
    horizon: float = 20.0
    step: float = 1e-3
    sampling: SamplingConfig = SamplingConfig()


def main(cfg):
    arm = planar_manipulator()
    K = gain_for_zeta(linearize(arm, np.zeros((2, 2))), cfg.zeta).K_t
    lin = linearize(arm, K)
    est = estimate_domain(arm, K, lin, cfg.q_scale * np.eye(4), cfg.sampling)
    for key, val in est.to_dict().items():
        print(f"{key:16s} {val}")
    offsets, dist = validate_by_simulation(arm, K, est, count=cfg.samples,
                                           horizon=cfg.horizon, step=cfg.step)
    print(f"{cfg.samples} starts, |x0| up to {np.linalg.norm(offsets, axis=1).max():.3g}, "
          f"max |x(T) - x*| = {dist.max():.3g}")
    # outside the certified set: how far can the sampled bound be pushed?
    scale = np.array([2.0, 10.0, 100.0])
    far = offsets[:1] * scale[:, None] * np.sqrt(1.0 / est.value(offsets[:1]) * est.c)
    x_star = np.concatenate([arm.q_star, np.zeros(2)])
    xf = final_states(arm, K, x_star + far, cfg.horizon, cfg.step)
    for s, d in zip(scale, np.linalg.norm(xf - x_star, axis=1)):
        print(f"start at {s:5.0f} x boundary: final distance {d:.3g}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--zeta", type=float, default=1.0)
    ap.add_argument("--q-scale", type=float, default=1.0)
    ap.add_argument("--samples", type=int, default=20)
    ap.add_argument("--seed", type=int, default=default_seed())
    a = ap.parse_args()
    main(DoAConfig(a.zeta, a.q_scale, a.samples, sampling=SamplingConfig(seed=a.seed)))
