"""Random problem generators shared by the test modules."""
import numpy as np

from phtune import assemble_saddle, linear_mechanical, linearize
from phtune.model import ManipulatorParams, planar_manipulator


def spd(rng, n, lo=0.2, hi=5.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (Q * rng.uniform(lo, hi, n)) @ Q.T


def psd(rng, n, hi=2.0):
    B = rng.standard_normal((n, n))
    D = B @ B.T
    return D * hi / max(np.linalg.eigvalsh(D)[-1], 1e-12)


def random_saddle(rng, n=None, m=None):
    n = n or int(rng.integers(1, 6))
    m = m or int(rng.integers(1, n + 1))
    X = spd(rng, n, 0.1, 4.0)
    Z = rng.standard_normal((m, n))
    return assemble_saddle(X, Z, np.zeros((m, m)))


def random_linear_system(rng, n=None):
    n = n or int(rng.integers(1, 6))
    return linear_mechanical(spd(rng, n, 0.3, 3.0), spd(rng, n, 0.5, 5.0),
                             psd(rng, n, 1.0), rng.uniform(-1, 1, n))


def random_manipulator(rng):
    params = ManipulatorParams(
        m1=rng.uniform(0.3, 1.5), m2=rng.uniform(0.3, 1.5),
        I1=rng.uniform(0.005, 0.05), I2=rng.uniform(0.005, 0.05),
        r1=rng.uniform(0.1, 0.3), r2=rng.uniform(0.1, 0.3),
        l1=rng.uniform(0.25, 0.45), l2=0.3,
        Kp=tuple(map(tuple, spd(rng, 2, 5.0, 30.0))),
        Kd=tuple(map(tuple, spd(rng, 2, 0.2, 2.0))),
        q_star=tuple(rng.uniform(-1.5, 1.5, 2)))
    try:
        return planar_manipulator(params)
    except ValueError:
        return planar_manipulator()


def random_linearization(rng, n=None):
    sys = random_linear_system(rng, n)
    return sys, linearize(sys, spd(rng, sys.n, 0.1, 3.0))


def match_spectra(a, b):
    """Largest distance under the optimal one-to-one pairing of two eigenvalue sets."""
    from scipy.optimize import linear_sum_assignment
    a, b = np.asarray(a), np.asarray(b)
    cost = np.abs(a[:, None] - b[None, :])
    r, c = linear_sum_assignment(cost)
    return float(cost[r, c].max())


def fd_jacobian(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    cols = []
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        cols.append((f(x + e) - f(x - e)) / (2 * h))
    return np.column_stack(cols)


ACCEPTANCE_LINES = []


def report(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok
