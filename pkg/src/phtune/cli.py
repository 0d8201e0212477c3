"""``phtune`` command line.

Exit status: 0 on success, 1 on invalid input, 2 on numerical failure.
"""
import argparse
import csv
import io
import json
import os
import sys as _sys
from dataclasses import replace

import numpy as np

from . import errors
from ._linalg import parse_matrix_spec
from .attraction import SamplingConfig, default_seed, estimate_domain, validate_by_simulation
from .linearization import linearize
from .saddle import check_real_spectrum
from .simulate import energy_check, integrate, response_metrics
from .study import StudyConfig, plot_table, run_study
from .systems_io import builtin, dumps, jsonable, load_system, system_to_dict
from .tuning import conservative_gain, gain_for_zeta, predicted_damping, spectral_min_gain


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(_sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--system", default="planar_manipulator",
                     help="builtin system name (planar_manipulator, oscillator)")
    src.add_argument("--file", help="JSON system definition")
    common.add_argument("--kt", help="gain K_t: scalar (times I) or row-major list")
    common.add_argument("--zeta", type=float, help="target damping ratio in (0, 1]")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("json", "csv"), default="json",
                        help="format written to stdout")
    common.add_argument("--save-system", metavar="PATH",
                        help="also write the resolved system definition as JSON")

    p = _Parser(prog="phtune", description="Damping-injection tuning for PH mechanical systems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("analyze", parents=[common],
                   help="linearize, transform to saddle form and report the spectrum")

    t = sub.add_parser("tune", parents=[common], help="select K_t")
    t.add_argument("--conservative", action="store_true",
                   help="use the eigenvalue-bound rule on the saddle blocks")
    t.add_argument("--spectral-min", action="store_true",
                   help="no-overshoot gain from lambda_min(X)^2 = 4 lambda_min(Z^T Z)")

    s = sub.add_parser("simulate", parents=[common], help="integrate the nonlinear closed loop")
    s.add_argument("--x0", help="initial state q1..qn,p1..pn (default: zeros)")
    s.add_argument("--horizon", type=float, default=10.0)
    s.add_argument("--step", type=float, default=1e-3)

    d = sub.add_parser("doa", parents=[common], help="estimate the domain of attraction")
    d.add_argument("--Q", default="1", help="Lyapunov weight: scalar or row-major list")
    d.add_argument("--rho-cap", type=float, default=2.0)
    d.add_argument("--n-dirs", type=int, default=256)
    d.add_argument("--n-radii", type=int, default=32)
    d.add_argument("--validate", type=int, default=0, metavar="COUNT",
                   help="simulate COUNT initial states from the level set")

    m = sub.add_parser("demo-manipulator", parents=[common],
                       help="K_t = 0 vs. zeta = 1 vs. zeta = 0.7 on the planar arm")
    m.add_argument("--horizon", type=float, default=10.0)
    m.add_argument("--step", type=float, default=1e-3)
    m.add_argument("--spectral-min", action="store_true",
                   help="choose the zeta = 1 gain by the lambda_min(Z^T Z) variant")
    return p


def _system(args):
    return load_system(args.file) if args.file else builtin(args.system)


def _gain(args, sys, lin0, default_zeta=None):
    if args.kt is not None and args.zeta is not None:
        raise errors.ValidationError("give either --kt or --zeta, not both")
    if args.kt is not None:
        return parse_matrix_spec(args.kt, sys.n, "K_t")
    zeta = args.zeta if args.zeta is not None else default_zeta
    if zeta is not None:
        return gain_for_zeta(lin0, zeta).K_t
    return np.zeros((sys.n, sys.n))


def _emit(args, name, payload, csv_text=None):
    text = dumps(payload)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, f"{name}.json"), "w") as fh:
            fh.write(text)
    if args.format == "csv":
        _sys.stdout.write(csv_text if csv_text is not None else _flat_csv(payload))
    else:
        _sys.stdout.write(text)


def _flat_csv(payload):
    """``key,value`` rows for nested payloads; non-scalar values stay JSON."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])

    def walk(obj, key):
        if isinstance(obj, dict):
            for k in sorted(obj):
                walk(obj[k], f"{key}.{k}" if key else k)
        else:
            w.writerow([key, json.dumps(jsonable(obj), separators=(",", ":"))])
    walk(payload, "")
    return buf.getvalue()


def cmd_analyze(args, sys):
    lin0 = linearize(sys, np.zeros((sys.n, sys.n)))
    K = _gain(args, sys, lin0)
    lin = lin0.with_gain(K)
    report = check_real_spectrum(lin.N)
    bound, achieved = predicted_damping(lin0, K)
    eig_A = sorted(np.linalg.eigvals(lin.A), key=lambda z: (z.real, z.imag))
    return {
        "K_t": K, "Mstar": lin.Mstar, "P": lin.P, "R": lin.R, "A": lin.A,
        "phi_M": lin.phi_M, "phi_P": lin.phi_P, "X": lin.N.X, "Z": lin.N.Z,
        "eig_A": [[z.real, z.imag] for z in eig_A],
        "spectrum": report.to_dict(),
        "zeta_bound": bound, "zeta_achieved": achieved,
    }


def cmd_tune(args, sys):
    lin0 = linearize(sys, np.zeros((sys.n, sys.n)))
    if args.kt is not None:
        raise errors.ValidationError("tune selects K_t; --kt is not accepted")
    chosen = [args.conservative, args.spectral_min, args.zeta is not None]
    if sum(chosen) != 1:
        raise errors.ValidationError("give exactly one of --zeta, --conservative, --spectral-min")
    if args.conservative:
        return conservative_gain(lin0).to_dict()
    if args.spectral_min:
        return spectral_min_gain(lin0).to_dict()
    return gain_for_zeta(lin0, args.zeta).to_dict()


def _parse_x0(text, n):
    if text is None:
        return np.zeros(2 * n)
    vals = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    if len(vals) != 2 * n:
        raise errors.DimensionMismatch(f"--x0 needs {2 * n} values, got {len(vals)}")
    return np.array(vals)


def cmd_simulate(args, sys):
    lin0 = linearize(sys, np.zeros((sys.n, sys.n)))
    K = _gain(args, sys, lin0)
    traj = integrate(sys, K, _parse_x0(args.x0, sys.n), args.horizon, args.step)
    payload = {
        "K_t": K, "step": traj.step, "horizon": float(traj.times[-1]),
        "metrics": response_metrics(traj, sys.q_star).to_dict(),
        "energy": energy_check(sys, K, traj).to_dict(),
    }
    out = args.out or "phtune_out"
    os.makedirs(out, exist_ok=True)
    traj.to_csv(os.path.join(out, "trajectory.csv"))
    args.out = out
    return payload, traj.to_csv()


def cmd_doa(args, sys):
    lin0 = linearize(sys, np.zeros((sys.n, sys.n)))
    K = _gain(args, sys, lin0, default_zeta=1.0)
    lin = lin0.with_gain(K)
    Q = parse_matrix_spec(args.Q, 2 * sys.n, "Q")
    sampling = SamplingConfig(n_dirs=args.n_dirs, n_radii=args.n_radii,
                              rho_cap=args.rho_cap, seed=default_seed())
    est = estimate_domain(sys, K, lin, Q, sampling)
    payload = dict(est.to_dict(), K_t=K)
    if args.validate:
        _, dist = validate_by_simulation(sys, K, est, count=args.validate)
        payload["validation"] = {"count": args.validate, "max_final_distance": float(dist.max())}
    return payload


def cmd_demo(args, sys):
    if args.kt is not None:
        raise errors.ValidationError("demo-manipulator chooses its own gains")
    config = StudyConfig(horizon=args.horizon, step=args.step,
                         spectral_min_variant=args.spectral_min)
    if args.zeta is not None:
        if not 0.0 < args.zeta < 1.0:
            raise errors.InvalidZeta("the underdamped demo case needs zeta in (0, 1)")
        config = replace(config, zeta_under=args.zeta)
    cases = run_study(sys, config)
    out = args.out or "demo_out"
    os.makedirs(out, exist_ok=True)
    for label, case in cases.items():
        case.trajectory.to_csv(os.path.join(out, f"trajectory_{label}.csv"))
    header, table = plot_table(cases)
    np.savetxt(os.path.join(out, "plot_data.csv"), table, delimiter=",",
               header=",".join(header), comments="", fmt="%.12g")
    args.out = out
    return {"q_star": sys.q_star, "cases": {k: c.summary() for k, c in cases.items()},
            "config": config.__dict__}


COMMANDS = {
    "analyze": cmd_analyze,
    "tune": cmd_tune,
    "simulate": cmd_simulate,
    "doa": cmd_doa,
    "demo-manipulator": cmd_demo,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    name = "demo" if args.command == "demo-manipulator" else args.command
    try:
        sys = _system(args)
        if args.save_system:
            with open(args.save_system, "w") as fh:
                fh.write(dumps(system_to_dict(sys)))
        result = COMMANDS[args.command](args, sys)
        if isinstance(result, tuple):
            payload, csv_text = result
        else:
            payload, csv_text = result, None
        _emit(args, "metrics" if name in ("simulate", "demo") else name, payload, csv_text)
    except errors.ValidationError as exc:
        print(f"phtune: invalid input: {exc}", file=_sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"phtune: invalid input: {exc}", file=_sys.stderr)
        return 1
    except errors.NumericalError as exc:
        print(f"phtune: numerical failure: {exc}", file=_sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
