"""Small dense linear-algebra helpers shared across modules."""
import numpy as np
import scipy.linalg

from . import errors

SYM_RTOL = 1e-10


def as_matrix(a, name="matrix"):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.ndim != 2:
        raise errors.DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    return a


def check_square(a, name="matrix"):
    if a.shape[0] != a.shape[1]:
        raise errors.DimensionMismatch(f"{name} must be square, got shape {a.shape}")


def check_symmetric(a, name="matrix", rtol=SYM_RTOL):
    check_square(a, name)
    scale = max(1.0, np.abs(a).max(initial=0.0))
    if np.abs(a - a.T).max(initial=0.0) > rtol * scale:
        raise errors.NotSymmetric(f"{name} is not symmetric")


def sym(a):
    return 0.5 * (a + a.T)


def eigvalsh(a):
    return np.linalg.eigvalsh(sym(a))


def lambda_min(a):
    return float(eigvalsh(a)[0])


def lambda_max(a):
    return float(eigvalsh(a)[-1])


def is_positive_definite(a):
    try:
        np.linalg.cholesky(sym(a))
    except np.linalg.LinAlgError:
        return False
    return True


def check_positive_definite(a, name="matrix", exc=errors.NotPositiveDefinite):
    check_symmetric(a, name)
    if not is_positive_definite(a):
        raise exc(f"{name} is not positive definite "
                  f"(smallest eigenvalue {lambda_min(a):.3g})")


def check_positive_semidefinite(a, name="matrix", atol=1e-12):
    check_symmetric(a, name)
    w = eigvalsh(a)
    scale = max(1.0, abs(w).max(initial=0.0))
    if w.size and w[0] < -atol * scale:
        raise errors.NotPositiveSemidefinite(
            f"{name} is not positive semidefinite (smallest eigenvalue {w[0]:.3g})")


def upper_cholesky(a, name="matrix"):
    """Upper-triangular ``U`` with positive diagonal and ``U.T @ U == a``."""
    check_symmetric(a, name)
    try:
        return scipy.linalg.cholesky(sym(a), lower=False)
    except np.linalg.LinAlgError as exc:
        raise errors.NotPositiveDefinite(f"{name} is not positive definite") from exc


def parse_matrix_spec(spec, n, name="matrix"):
    """Scalar shorthand ``k`` means ``k * I``; otherwise an n*n row-major list."""
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("["):
            import json
            spec = json.loads(text)
        else:
            parts = [s for s in text.replace(";", ",").split(",") if s.strip()]
            try:
                spec = [float(s) for s in parts]
            except ValueError as exc:
                raise errors.ValidationError(f"cannot parse {name}: {text!r}") from exc
            if len(spec) == 1:
                spec = spec[0]
    arr = np.asarray(spec, dtype=float)
    if arr.ndim == 0:
        return float(arr) * np.eye(n)
    if arr.size != n * n:
        raise errors.DimensionMismatch(
            f"{name} needs 1 or {n * n} entries, got {arr.size}")
    return arr.reshape(n, n)
