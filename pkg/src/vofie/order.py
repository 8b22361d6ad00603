"""Variable fractional order alpha(t): representation, families, validation.

The order carries its derivative explicitly because the differentiated kernel
needs alpha'(s) and numerical differentiation would pollute kernel accuracy.
Evaluation callables must be pure and accept numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass(frozen=True)
class VariableOrder:
    """The order function alpha(t) on [0, T] with its derivative.

    is_linear declares that alpha is an affine function of t; it gates the
    translation-invariant fast assembly path and is never inferred.
    """

    alpha: Callable
    dalpha: Callable
    alpha0: float
    alphaT: float
    lower_bound: float
    T: float = 1.0
    is_linear: bool = False

    def __call__(self, t):
        return self.alpha(t)


def make_sine_order(a0: float, a1: float, T: float = 1.0) -> VariableOrder:
    """Order family alpha(t) = a1 + (a0-a1)((1-t) - sin(2 pi (1-t))/(2 pi)).

    Defined on [0, 1] (T is kept for interface symmetry and must be 1).
    Monotone between a0 = alpha(0) and a1 = alpha(1), with alpha'(0) =
    alpha'(1) = 0 analytically.
    """
    if not (0 < a0 <= 1):
        raise ValueError(f"a0 must lie in (0, 1], got {a0}")
    if not (0 < a1 < 1):
        raise ValueError(f"a1 must lie in (0, 1), got {a1}")
    if T != 1.0:
        raise ValueError("the sine order family is defined on [0, 1]")

    def alpha(t):
        s = 1.0 - np.asarray(t, dtype=float)
        return a1 + (a0 - a1) * (s - np.sin(2 * np.pi * s) / (2 * np.pi))

    def dalpha(t):
        s = 1.0 - np.asarray(t, dtype=float)
        return (a0 - a1) * (-1.0 + np.cos(2 * np.pi * s))

    return VariableOrder(
        alpha=alpha,
        dalpha=dalpha,
        alpha0=a0,
        alphaT=a1,
        lower_bound=min(a0, a1),
        T=1.0,
    )


def make_constant_order(value: float, T: float = 1.0) -> VariableOrder:
    """Constant order alpha(t) = value, value in (0, 1]."""
    if not (0 < value <= 1):
        raise ValueError(f"constant order must lie in (0, 1], got {value}")

    def alpha(t):
        return np.full_like(np.asarray(t, dtype=float), value)

    def dalpha(t):
        return np.zeros_like(np.asarray(t, dtype=float))

    return VariableOrder(
        alpha=alpha,
        dalpha=dalpha,
        alpha0=value,
        alphaT=value,
        lower_bound=value,
        T=T,
        is_linear=True,
    )


def make_linear_order(start: float, end: float, T: float = 1.0) -> VariableOrder:
    """Affine order alpha(t) = start + (end - start) t / T."""
    if not (0 < start <= 1) or not (0 < end <= 1):
        raise ValueError(
            f"linear order endpoints must lie in (0, 1], got ({start}, {end})"
        )
    slope = (end - start) / T

    def alpha(t):
        return start + slope * np.asarray(t, dtype=float)

    def dalpha(t):
        return np.full_like(np.asarray(t, dtype=float), slope)

    return VariableOrder(
        alpha=alpha,
        dalpha=dalpha,
        alpha0=start,
        alphaT=end,
        lower_bound=min(start, end),
        T=T,
        is_linear=True,
    )


def make_custom_order(
    alpha: Callable,
    dalpha: Callable,
    alpha0: float,
    T: float = 1.0,
    lower_bound: float | None = None,
    is_linear: bool = False,
) -> VariableOrder:
    """Wrap user-supplied (alpha, alpha') callables.

    The derivative is required explicitly; alpha0 must equal alpha(0).
    """
    a0 = float(alpha(0.0))
    if abs(a0 - alpha0) > 1e-14:
        raise ValueError(f"declared alpha0={alpha0} but alpha(0)={a0}")
    if lower_bound is None:
        ts = np.linspace(0.0, T, 1001)
        lower_bound = float(np.min(alpha(ts)))
    return VariableOrder(
        alpha=alpha,
        dalpha=dalpha,
        alpha0=alpha0,
        alphaT=float(alpha(T)),
        lower_bound=lower_bound,
        T=T,
        is_linear=is_linear,
    )


@dataclass(frozen=True)
class OrderValidationReport:
    """Sampled check of the admissibility conditions on alpha."""

    samples: int
    alpha_min: float
    alpha_max: float
    max_deriv_discrepancy: float
    bounds_ok: bool
    deriv_ok: bool
    case_i_eligible: bool
    smoothness_warning: bool  # alpha(0)=1 with alpha'(0) != 0
    notes: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return self.bounds_ok and self.deriv_ok


def validate_assumption_a(order: VariableOrder, samples: int = 1001) -> OrderValidationReport:
    """Sample-based admissibility report for a variable order.

    Checks 0 < alpha(t) <= 1 with alpha(t) < 1 required strictly for t > 0
    (alpha(0) = 1 is permitted: that is the smooth-solution configuration),
    and cross-checks the declared derivative against central differences.
    Report-only; never raises on a failing order.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    ts = np.linspace(0.0, order.T, samples)
    vals = np.asarray(order.alpha(ts), dtype=float)
    amin, amax = float(np.min(vals)), float(np.max(vals))

    notes = []
    interior = vals[1:]
    bounds_ok = bool(amin > 0 and np.all(interior < 1.0 + 1e-12) and amax <= 1.0 + 1e-12)
    if np.any(interior >= 1.0 + 1e-12):
        notes.append("alpha(t) >= 1 at some sampled t > 0")
    if amin <= 0:
        notes.append("alpha(t) <= 0 at some sampled t")

    h = 1e-6 * order.T
    ti = np.linspace(h, order.T - h, 100)
    fd = (np.asarray(order.alpha(ti + h)) - np.asarray(order.alpha(ti - h))) / (2 * h)
    disc = float(np.max(np.abs(fd - np.asarray(order.dalpha(ti)))))
    deriv_ok = disc <= 1e-6

    d0 = float(order.dalpha(0.0))
    at0 = float(order.alpha(0.0))
    case_i = abs(at0 - 1.0) <= 1e-14 and abs(d0) <= 1e-12
    warn = abs(at0 - 1.0) <= 1e-14 and abs(d0) > 1e-12
    if warn:
        notes.append(
            "alpha(0)=1 with alpha'(0) != 0: outside both smooth-case regimes"
        )
    return OrderValidationReport(
        samples=samples,
        alpha_min=amin,
        alpha_max=amax,
        max_deriv_discrepancy=disc,
        bounds_ok=bounds_ok,
        deriv_ok=deriv_ok,
        case_i_eligible=case_i,
        smoothness_warning=warn,
        notes=tuple(notes),
    )
