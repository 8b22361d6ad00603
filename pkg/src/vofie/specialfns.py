"""Gamma-family special functions and the Mittag-Leffler series.

Everything here is pure and stateless. Gamma and digamma are thin wrappers
around scipy.special with argument validation matching the solver's needs
(kernel arguments stay inside (0, 2), where these routines are accurate to
machine precision). The Mittag-Leffler function is summed directly from its
defining series; it is only used as an analytic oracle at moderate arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special


class MittagLefflerConvergenceError(RuntimeError):
    """Raised when the Mittag-Leffler series fails to meet tolerance."""


ML_MAX_TERMS = 10_000


def gamma(x):
    """Gamma function. Rejects the poles at non-positive integers.

    Accepts scalars or arrays.
    """
    xa = np.asarray(x, dtype=float)
    if np.any((xa <= 0) & (xa == np.floor(xa))):
        raise ValueError("gamma is undefined at non-positive integers")
    out = special.gamma(xa)
    return float(out) if np.isscalar(x) or xa.ndim == 0 else out


def digamma(x):
    """Digamma function psi(x) = Gamma'(x)/Gamma(x) for x > 0.

    Accepts scalars or arrays.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("digamma requires x > 0")
    out = special.psi(xa)
    return float(out) if np.isscalar(x) or xa.ndim == 0 else out


@dataclass(frozen=True)
class MLParams:
    """Parameters of the two-parameter Mittag-Leffler function E_{p,q}."""

    p: float
    q: float = 1.0
    tol: float = 1e-12

    def __post_init__(self):
        if self.p <= 0:
            raise ValueError(f"MLParams.p must be positive, got {self.p}")
        if self.tol <= 0:
            raise ValueError(f"MLParams.tol must be positive, got {self.tol}")


def mittag_leffler(params: MLParams, z: float) -> float:
    """Evaluate E_{p,q}(z) = sum_k z^k / Gamma(p k + q) by direct summation.

    Terms are accumulated until the next one falls below
    tol * (1 + |partial sum|). Intended for |z| <= 50, where the series is
    usable at double precision. Reciprocal gamma handles the poles of
    Gamma(p k + q) (those terms vanish).
    """
    p, q, tol = params.p, params.q, params.tol
    total = 0.0
    zk = 1.0
    for k in range(ML_MAX_TERMS):
        term = zk * special.rgamma(p * k + q)
        total += term
        if not np.isfinite(total):
            raise MittagLefflerConvergenceError(
                f"Mittag-Leffler series overflowed at term {k} (p={p}, q={q}, z={z})"
            )
        if abs(term) <= tol * (1.0 + abs(total)) and k > 0:
            return total
        zk *= z
    raise MittagLefflerConvergenceError(
        f"Mittag-Leffler series did not converge within {ML_MAX_TERMS} terms "
        f"(p={p}, q={q}, z={z})"
    )
