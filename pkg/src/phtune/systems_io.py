"""JSON system definitions and deterministic output formatting.

Two system types are understood (SI units, angles in rad)::

    {"type": "planar_manipulator", "m1": ..., "m2": ..., "I1": ..., "I2": ...,
     "r1": ..., "r2": ..., "l1": ..., "l2": ..., "Kp": [[..]], "Kd": [[..]],
     "q_star": [..]}
    {"type": "linear_mechanical", "M": [[..]], "Kp": [[..]], "Kd": [[..]],
     "q_star": [..]}

Omitted manipulator fields take the builtin defaults.
"""
import json
import math
from dataclasses import fields

import numpy as np

from . import errors
from .model import ManipulatorParams, linear_mechanical, oscillator, planar_manipulator

SIG_DIGITS = 12

BUILTINS = {
    "planar_manipulator": planar_manipulator,
    "oscillator": oscillator,
}


def builtin(name):
    try:
        return BUILTINS[name]()
    except KeyError:
        raise errors.ValidationError(
            f"unknown builtin system {name!r}; choose from {sorted(BUILTINS)}") from None


def _tuple2(a):
    return tuple(tuple(float(x) for x in row) for row in a)


def system_from_dict(d):
    kind = d.get("type")
    if kind == "planar_manipulator":
        known = {f.name for f in fields(ManipulatorParams)}
        extra = set(d) - known - {"type"}
        if extra:
            raise errors.InvalidParams(f"unknown manipulator fields {sorted(extra)}")
        kw = {k: v for k, v in d.items() if k != "type"}
        for key in ("Kp", "Kd"):
            if key in kw:
                kw[key] = _tuple2(kw[key])
        if "q_star" in kw:
            kw["q_star"] = tuple(float(x) for x in kw["q_star"])
        return planar_manipulator(ManipulatorParams(**kw))
    if kind == "linear_mechanical":
        try:
            return linear_mechanical(d["M"], d["Kp"], d.get("Kd"), d.get("q_star"))
        except KeyError as exc:
            raise errors.InvalidParams(f"linear_mechanical needs field {exc}") from None
    raise errors.InvalidParams(f"unknown system type {kind!r}")


def load_system(path):
    try:
        with open(path) as fh:
            d = json.load(fh)
    except FileNotFoundError:
        raise errors.ValidationError(f"system file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise errors.ValidationError(f"invalid JSON in {path}: {exc}") from None
    return system_from_dict(d)


def system_to_dict(sys):
    if sys.description is None:
        raise errors.ValidationError("system has no declarative description to export")
    return json.loads(json.dumps(sys.description))


def round_sig(x, digits=SIG_DIGITS):
    if x == 0.0 or not math.isfinite(x):
        return x
    return float(f"{x:.{digits}g}")


def jsonable(obj):
    """Recursively convert to JSON types, rounding floats to 12 significant digits."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = round_sig(float(obj))
        return None if not math.isfinite(x) else x
    if isinstance(obj, complex):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj):
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"
