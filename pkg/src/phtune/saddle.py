"""Spectra of saddle-point matrices ``[[X, Z^T], [-Z, Y]]``.

For the ``Y = 0`` class every eigenpair ``(lam, [v; w])`` satisfies the
scalar quadratic

    lam**2 - a*lam + b = 0,   a = v*Xv / v*v,   b = v*(Z^T Z)v / v*v,

so realness of ``lam`` is decided by the sign of ``a**2 - 4b``.  This module
exposes the eigen-decomposition, realness classification, dominant-pole
damping ratio and the residuals of the Rayleigh-quotient identities.
"""
from dataclasses import dataclass, field

import numpy as np

from . import errors
from ._linalg import as_matrix, check_symmetric, is_positive_definite, sym

# |Im(lam)| <= IMAG_RTOL * (1 + |lam|) counts as real.
IMAG_RTOL = 1e-9
# a**2 - 4b >= -DISC_RTOL * a**2 counts as a (numerically coalesced) real pair.
DISC_RTOL = 1e-9
RESIDUAL_RTOL = 1e-8


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SaddlePointMatrix:
    X: np.ndarray
    Z: np.ndarray
    Y: np.ndarray

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def m(self):
        return self.Y.shape[0]

    @property
    def y_is_zero(self):
        return not np.any(self.Y)

    def full(self):
        """Materialize the ``(n+m) x (n+m)`` matrix."""
        return np.block([[self.X, self.Z.T], [-self.Z, self.Y]])

    @property
    def ZtZ(self):
        return sym(self.Z.T @ self.Z)


def assemble_saddle(X, Z, Y=None):
    """Validate blocks and build a :class:`SaddlePointMatrix`.

    ``Y`` defaults to the zero block of matching size.
    """
    X = as_matrix(X, "X")
    Z = as_matrix(Z, "Z")
    if Y is None:
        Y = np.zeros((Z.shape[0], Z.shape[0]))
    Y = as_matrix(Y, "Y")
    n, m = X.shape[0], Y.shape[0]
    if X.shape != (n, n) or Y.shape != (m, m) or Z.shape != (m, n):
        raise errors.DimensionMismatch(
            f"inconsistent blocks X{X.shape}, Z{Z.shape}, Y{Y.shape}")
    if m > n:
        raise errors.DimensionMismatch(f"need m <= n, got m={m}, n={n}")
    check_symmetric(X, "X")
    check_symmetric(Y, "Y")
    if not is_positive_definite(X):
        raise errors.NotPositiveDefiniteX("X is not positive definite")
    wy = np.linalg.eigvalsh(sym(Y))
    if wy[0] < -1e-12 * max(1.0, abs(wy).max()):
        raise errors.NotPositiveSemidefinite("Y is not positive semidefinite")
    if np.linalg.matrix_rank(Z) < m:
        raise errors.RankDeficientZ(f"Z does not have full row rank {m}")
    return SaddlePointMatrix(_frozen(sym(X)), _frozen(Z), _frozen(sym(Y)))


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Eigenvalue ``lam`` of the saddle matrix with blocks of its unit eigenvector.

    ``lam_raw`` is the solver's value; ``lam`` differs from it only when a
    conjugate pair has been recognised as a coalesced real double root.
    """
    lam: complex
    v: np.ndarray
    w: np.ndarray
    lam_raw: complex = None
    residual: float = 0.0

    @property
    def eta(self):
        return np.concatenate([self.v, self.w])

    @property
    def is_real(self):
        return is_real_value(self.lam)


def is_real_value(lam, rtol=IMAG_RTOL):
    return abs(complex(lam).imag) <= rtol * (1.0 + abs(lam))


def rayleigh(A, v):
    """Real Rayleigh quotient ``v*Av / v*v`` of a Hermitian ``A``."""
    v = np.asarray(v)
    return float(np.real(np.vdot(v, A @ v)) / np.real(np.vdot(v, v)))


def eigen_pairs(N):
    """All ``n + m`` eigenpairs of ``N``, eigenvectors scaled to unit norm.

    For ``Y = 0`` a conjugate pair whose Rayleigh discriminant is zero to
    round-off is reported as a real double root: defective critical-damping
    points otherwise leave imaginary parts of order ``sqrt(eps)``.
    """
    full = N.full()
    try:
        lams, vecs = np.linalg.eig(full)
    except np.linalg.LinAlgError as exc:
        raise errors.EigenSolverFailure(str(exc)) from exc
    if not np.all(np.isfinite(lams)):
        raise errors.EigenSolverFailure("eigensolver returned non-finite values")
    scale = max(np.linalg.norm(full, 2), np.finfo(float).tiny)
    ztz = N.ZtZ
    snap = N.y_is_zero
    pairs = []
    for k in range(lams.size):
        lam = complex(lams[k])
        eta = vecs[:, k] / np.linalg.norm(vecs[:, k])
        res = float(np.linalg.norm(full @ eta - lam * eta))
        if res > RESIDUAL_RTOL * scale:
            raise errors.EigenSolverFailure(
                f"eigenpair {k} residual {res:.3g} exceeds tolerance")
        v, w = eta[:N.n], eta[N.n:]
        reported = lam
        if snap and not is_real_value(lam):
            a = rayleigh(N.X, v)
            b = rayleigh(ztz, v)
            if a * a - 4.0 * b >= -DISC_RTOL * a * a:
                reported = complex(lam.real, 0.0)
        pairs.append(EigenPair(reported, v, w, lam_raw=lam, residual=res))
    return pairs


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    pairs: list
    all_real: bool
    dominant: complex
    dominant_zeta: float
    per_pair_discriminants: list = field(default_factory=list)

    @property
    def eigenvalues(self):
        return np.array([p.lam for p in self.pairs])

    def to_dict(self):
        lams = sorted(self.eigenvalues, key=lambda z: (z.real, z.imag))
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in lams],
            "all_real": bool(self.all_real),
            "dominant": [float(self.dominant.real), float(self.dominant.imag)],
            "dominant_zeta": float(self.dominant_zeta),
            "discriminants": [float(d) for d in self.per_pair_discriminants],
        }


def _require_zero_y(N):
    if not N.y_is_zero:
        raise errors.NonzeroY("operation requires Y = 0")


def discriminant(N, pair):
    a = rayleigh(N.X, pair.v)
    return a * a - 4.0 * rayleigh(N.ZtZ, pair.v)


def check_real_spectrum(N):
    """Classify the spectrum of a ``Y = 0`` saddle matrix via Rayleigh discriminants."""
    _require_zero_y(N)
    pairs = eigen_pairs(N)
    discs = [discriminant(N, p) for p in pairs]
    all_real = all(d >= -DISC_RTOL * rayleigh(N.X, p.v) ** 2
                   for d, p in zip(discs, pairs))
    lam_p, zeta_p = dominant_damping(pairs)
    return SpectrumReport(pairs, all_real, lam_p, zeta_p, discs)


def damping_ratio(lam):
    lam = complex(lam)
    if is_real_value(lam):
        return 1.0
    return abs(lam.real) / abs(lam)


def dominant_damping(spectrum):
    """Slowest eigenvalue (minimal real part) and its damping ratio.

    ``spectrum`` may be a :class:`SpectrumReport`, a list of
    :class:`EigenPair` or a plain iterable of eigenvalues.  Ties in the
    real part go to the pair with larger ``|Im|`` (lower damping ratio).
    The returned eigenvalue has non-negative imaginary part.
    """
    if isinstance(spectrum, SpectrumReport):
        spectrum = spectrum.pairs
    lams = [complex(getattr(s, "lam", s)) for s in spectrum]
    if not lams:
        raise errors.ValidationError("empty spectrum")
    if any(z.real <= 0.0 for z in lams):
        raise errors.UnstableSpectrum("spectrum not in the open right half-plane")
    lo = min(z.real for z in lams)
    tol = IMAG_RTOL * (1.0 + max(abs(z) for z in lams))
    tied = [z for z in lams if z.real - lo <= tol]
    lam_p = max(tied, key=lambda z: abs(z.imag))
    lam_p = complex(lam_p.real, abs(lam_p.imag))
    return lam_p, damping_ratio(lam_p)


def prop2_residuals(N):
    """Residuals of the real-part and modulus identities for non-real eigenpairs.

    Returns a list of ``(r1, r2)`` with ``r1 = |a - 2 Re(lam)|`` and
    ``r2 = |b - |lam|**2|``; empty when the spectrum is real.
    """
    _require_zero_y(N)
    ztz = N.ZtZ
    out = []
    for p in eigen_pairs(N):
        if p.is_real:
            continue
        lam = p.lam
        r1 = abs(rayleigh(N.X, p.v) - 2.0 * lam.real)
        r2 = abs(rayleigh(ztz, p.v) - (lam.real ** 2 + lam.imag ** 2))
        out.append((r1, r2))
    return out


def quadratic_residual(N, pair):
    """``|lam**2 - a*lam + b|`` for one eigenpair of a ``Y = 0`` saddle matrix."""
    lam = pair.lam_raw if pair.lam_raw is not None else pair.lam
    return abs(lam * lam - rayleigh(N.X, pair.v) * lam + rayleigh(N.ZtZ, pair.v))
