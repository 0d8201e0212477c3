"""Fixed-step RK4 integration of the closed loop and transient metrics."""
import io
import math
from dataclasses import dataclass

import numpy as np

from . import errors
from .model import as_gain, closed_loop_field, hamiltonian, power_balance

SETTLING_BAND = 0.02
PEAK_FLOOR = 1e-6  # peaks below this fraction of the step are ignored


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    energies: np.ndarray
    gain: np.ndarray
    step: float
    order: int = 4

    @property
    def states(self):
        return np.hstack([self.q, self.p])

    def to_csv(self, path_or_buf=None):
        n = self.q.shape[1]
        header = ["time"] + [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)] + ["H"]
        data = np.column_stack([self.times, self.q, self.p, self.energies])
        buf = io.StringIO()
        np.savetxt(buf, data, delimiter=",", header=",".join(header), comments="", fmt="%.12g")
        text = buf.getvalue()
        if path_or_buf is None:
            return text
        if hasattr(path_or_buf, "write"):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w", newline="") as fh:
                fh.write(text)
        return text


def _split_state(sys, x0):
    if isinstance(x0, tuple) and len(x0) == 2:
        q0, p0 = (np.atleast_1d(np.asarray(a, dtype=float)) for a in x0)
    else:
        x0 = np.asarray(x0, dtype=float).ravel()
        q0, p0 = x0[:sys.n], x0[sys.n:]
    if q0.shape != (sys.n,) or p0.shape != (sys.n,):
        raise errors.DimensionMismatch(f"initial state must have 2*{sys.n} entries")
    return q0, p0


def rhs(sys, K):
    """Stacked-state vector field ``x -> f(x)`` of the closed loop."""
    n = sys.n

    def f(x):
        v, pdot = closed_loop_field(sys, K, x[..., :n], x[..., n:])
        return np.concatenate([v, pdot], axis=-1)
    return f


def _rk4(f, x0, n_steps, h, record=True):
    X = np.empty((n_steps + 1,) + x0.shape) if record else None
    x = x0.copy()
    if record:
        X[0] = x
    for k in range(n_steps):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise errors.NonFiniteState(
                f"state became non-finite at step {k + 1} (t={(k + 1) * h:.6g})",
                step=k + 1, time=(k + 1) * h)
        if record:
            X[k + 1] = x
    return X if record else x


def _check_grid(horizon, step):
    if not step > 0 or not horizon >= step:
        raise errors.ValidationError("need step > 0 and horizon >= step")
    return int(round(horizon / step)), float(step)


def integrate(sys, K, x0, horizon, step):
    """Classical RK4 with fixed step ``step`` over ``[0, horizon]``.

    ``x0`` is either ``(q0, p0)`` or a stacked ``2n`` vector.  The number of
    steps is ``round(horizon / step)``.
    """
    n_steps, h = _check_grid(horizon, step)
    K = as_gain(K, sys.n)
    q0, p0 = _split_state(sys, x0)
    n = sys.n
    X = _rk4(rhs(sys, K), np.concatenate([q0, p0]), n_steps, h)
    times = np.arange(n_steps + 1) * h
    q, p = X[:, :n].copy(), X[:, n:].copy()
    if sys.vectorized:
        energies = np.asarray(hamiltonian(sys, q, p), dtype=float)
    else:
        energies = np.array([hamiltonian(sys, q[k], p[k]) for k in range(n_steps + 1)])
    return Trajectory(times, q, p, energies, K, h)


def final_states(sys, K, X0, horizon, step):
    """End states of many trajectories started from the rows of ``X0``.

    Vectorized systems are advanced as one batch; others one at a time.
    """
    n_steps, h = _check_grid(horizon, step)
    K = as_gain(K, sys.n)
    X0 = np.atleast_2d(np.asarray(X0, dtype=float))
    if X0.shape[1] != 2 * sys.n:
        raise errors.DimensionMismatch(f"initial states must have 2*{sys.n} columns")
    f = rhs(sys, K)
    if sys.vectorized:
        return _rk4(f, X0, n_steps, h, record=False)
    return np.array([_rk4(f, x0, n_steps, h, record=False) for x0 in X0])


@dataclass(frozen=True)
class ResponseMetrics:
    """Per-coordinate transient metrics; ``None`` marks an undefined entry."""
    overshoot: list
    settling_time: list
    empirical_zeta: list
    n_peaks: list
    steady_state_error: list

    @property
    def max_settling_time(self):
        if any(t is None for t in self.settling_time):
            return None
        return max(self.settling_time)

    def to_dict(self):
        d = {k: list(v) for k, v in self.__dict__.items()}
        d["max_settling_time"] = self.max_settling_time
        return d


def _refined_peaks(e):
    """Local maxima of ``e`` with parabolic sub-sample refinement of the value."""
    k = np.flatnonzero((e[1:-1] > e[:-2]) & (e[1:-1] >= e[2:])) + 1
    a, b, c = e[k - 1], e[k], e[k + 1]
    curv = a - 2.0 * b + c
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = np.where(curv < 0, b - (c - a) ** 2 / (8.0 * curv), b)
    return k, vals


def log_decrement_zeta(peaks):
    """Damping ratio from successive peaks of ``|error|`` (half a period apart)."""
    peaks = np.asarray(peaks, dtype=float)
    if peaks.size < 2:
        return None
    delta_half = math.log(peaks[0] / peaks[-1]) / (peaks.size - 1)
    delta = 2.0 * delta_half
    return delta / math.sqrt(4.0 * math.pi ** 2 + delta ** 2)


def response_metrics(traj, q_star):
    """Overshoot (% of step), 2 % settling time, log-decrement damping ratio."""
    q_star = np.asarray(q_star, dtype=float)
    overshoot, settling, zetas, npk, sse = [], [], [], [], []
    for i in range(traj.q.shape[1]):
        qi = traj.q[:, i]
        err = qi - q_star[i]
        sse.append(float(abs(err[-1])))
        step = q_star[i] - qi[0]
        if step == 0.0:
            overshoot.append(None)
            settling.append(None)
            zetas.append(None)
            npk.append(0)
            continue
        s = math.copysign(1.0, step)
        overshoot.append(float(max(0.0, np.max(s * err)) / abs(step) * 100.0))
        outside = np.flatnonzero(np.abs(err) > SETTLING_BAND * abs(step))
        if outside.size == 0:
            settling.append(0.0)
        elif outside[-1] == err.size - 1:
            settling.append(None)
        else:
            settling.append(float(traj.times[outside[-1] + 1]))
        _, vals = _refined_peaks(np.abs(err))
        vals = vals[vals > PEAK_FLOOR * abs(step)]
        npk.append(int(vals.size))
        z = log_decrement_zeta(vals)
        zetas.append(None if z is None else float(z))
    return ResponseMetrics(overshoot, settling, zetas, npk, sse)


@dataclass(frozen=True)
class EnergyReport:
    max_rise: float
    max_rel_error: float
    dissipation_consistent: bool
    monotone: bool

    def to_dict(self):
        return dict(self.__dict__)


def energy_check(sys, K, traj, rise_tol=1e-9, rel_tol=1e-3):
    """Audit H along a trajectory.

    ``max_rise`` is the largest single-step increase of H.  ``dH/dt`` is
    estimated at interior samples by a sixth-order central stencil and
    compared with the power balance there; the error is relative to the peak
    dissipated power along the trajectory.  The high order matters: the
    fast mode of a tuned arm decays within a few steps at ``h = 1e-3``.
    """
    H = traj.energies
    h = traj.step
    max_rise = float(max(0.0, np.diff(H).max(initial=0.0)))
    power = np.array([power_balance(sys, K, traj.q[k], traj.p[k]) for k in range(H.size)])
    if H.size >= 7:
        fd = (H[6:] - 9.0 * H[5:-1] + 45.0 * H[4:-2]
              - 45.0 * H[2:-4] + 9.0 * H[1:-5] - H[:-6]) / (60.0 * h)
        ref = power[3:-3]
    else:
        fd = (H[2:] - H[:-2]) / (2.0 * h)
        ref = power[1:-1]
    scale = np.abs(power).max(initial=0.0)
    gap = float(np.abs(fd - ref).max(initial=0.0))
    rel = gap if scale == 0.0 else gap / scale
    return EnergyReport(max_rise, float(rel), bool(rel <= rel_tol), bool(max_rise <= rise_tol))
