"""Graded and uniform partitions of [0, T]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .order import VariableOrder


@dataclass(frozen=True)
class Mesh:
    """Partition t_i = T (i/N)^r, i = 0..N, with step sizes tau_i.

    r = 1 is the uniform mesh; r > 1 clusters nodes near t = 0. Steps are
    nondecreasing for r >= 1 and max tau_i <= r T / N.
    """

    T: float
    N: int
    r: float
    nodes: np.ndarray
    steps: np.ndarray

    @property
    def is_uniform(self) -> bool:
        return self.r == 1.0


def make_mesh(T: float, N: int, r: float = 1.0) -> Mesh:
    """Build the graded mesh t_i = T (i/N)^r.

    Nodes come straight from the closed form per index (no cumulative
    summation), so t_0 = 0 and t_N = T exactly.
    """
    if T <= 0:
        raise ValueError(f"horizon T must be positive, got {T}")
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if r < 1:
        raise ValueError(f"grading exponent r must be >= 1, got {r}")
    i = np.arange(N + 1, dtype=float)
    nodes = T * (i / N) ** r
    steps = np.diff(nodes)
    return Mesh(T=float(T), N=int(N), r=float(r), nodes=nodes, steps=steps)


def grading_for_case(order: VariableOrder, case: str) -> float:
    """Mesh grading exponent for the three convergence regimes.

    (I)   alpha(0) = 1, uniform mesh, r = 1;
    (II)  alpha(0) < 1, graded mesh, r = 1/alpha(0);
    (III) alpha(0) < 1, uniform mesh, r = 1 (sub-optimal rate regime).
    """
    case = case.upper()
    if case not in ("I", "II", "III"):
        raise ValueError(f"case must be one of I, II, III, got {case!r}")
    a0 = order.alpha0
    if case == "I":
        if a0 != 1.0:
            raise ValueError(f"case I requires alpha(0) = 1, got alpha(0) = {a0}")
        return 1.0
    if a0 >= 1.0:
        raise ValueError(f"case {case} requires alpha(0) < 1, got alpha(0) = {a0}")
    return 1.0 / a0 if case == "II" else 1.0
