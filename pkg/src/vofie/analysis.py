"""Convergence studies, rate fitting, and initial-layer diagnostics."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .assembly import QuadratureRule, gauss_nodes
from .mesh import Mesh, grading_for_case, make_mesh
from .solver import NewtonConfig, Problem, Solution, solve


class InsufficientDataError(RuntimeError):
    """Not enough resolved nodes near t = 0 to fit an exponent."""


PREDICTED_RATES = {"I": 2.0, "II": 2.0}  # case III: 2*alpha(0), set per order


@dataclass
class ConvergenceReport:
    """Errors against a fine reference and fitted rates between N levels."""

    config_id: str
    case: str
    Ns: list
    ref_N: int
    r: float
    errors: np.ndarray
    rates: np.ndarray
    predicted_rate: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("N,error,rate\n")
            for j, N in enumerate(self.Ns):
                rate = "" if j == 0 else f"{self.rates[j - 1]:.17g}"
                fh.write(f"{N},{self.errors[j]:.17g},{rate}\n")

    def format_table(self) -> str:
        lines = [
            f"config: {self.config_id}   case {self.case}, r = {self.r:g}, "
            f"reference N = {self.ref_N}, predicted rate = {self.predicted_rate:g}",
            f"{'1/N':>8} {'error':>12} {'rate':>8}",
        ]
        for j, N in enumerate(self.Ns):
            rate = "" if j == 0 else f"{self.rates[j - 1]:8.2f}"
            lines.append(f"{'1/' + str(N):>8} {self.errors[j]:12.3e} {rate}")
        return "\n".join(lines)


def fit_rate(errors, Ns) -> np.ndarray:
    """Pairwise rates kappa_j = ln(e_j / e_{j+1}) / ln(N_{j+1} / N_j)."""
    errors = np.asarray(errors, dtype=float)
    Ns = np.asarray(Ns, dtype=float)
    if len(errors) != len(Ns) or len(errors) < 2:
        raise ValueError("need equal-length arrays with at least two entries")
    if np.any(errors <= 0):
        raise ValueError("rate fitting requires positive errors")
    return np.log(errors[:-1] / errors[1:]) / np.log(Ns[1:] / Ns[:-1])


def _solve_at(args):
    problem, N, r, rule, cfg = args
    mesh = make_mesh(problem.T, N, r)
    return solve(problem, mesh, rule, cfg)


def run_convergence(
    problem: Problem,
    case: str,
    N_list=(48, 72, 96, 120),
    ref_N: int = 1440,
    rule: QuadratureRule | None = None,
    cfg: NewtonConfig | None = None,
    config_id: str = "",
    workers: int = 1,
) -> ConvergenceReport:
    """Solve at each N and at ref_N on the same grading; report nodal errors.

    Every N must divide ref_N so each coarse node is shared with the
    reference mesh (errors are exact nodal comparisons, no interpolation).
    """
    N_list = list(N_list)
    for N in N_list:
        if ref_N % N != 0:
            raise ValueError(f"N = {N} does not divide ref_N = {ref_N}")
    r = grading_for_case(problem.order, case)
    if rule is None:
        rule = gauss_nodes()
    if cfg is None:
        cfg = NewtonConfig()

    jobs = [(problem, N, r, rule, cfg) for N in N_list]
    if workers > 1:
        # threads, not processes: assembly is numpy-bound (GIL released) and
        # problems may carry closures that do not pickle
        with ThreadPoolExecutor(max_workers=workers) as pool:
            coarse = list(pool.map(_solve_at, jobs))
    else:
        coarse = [_solve_at(j) for j in jobs]
    ref = _solve_at((problem, ref_N, r, rule, cfg))

    errors = np.empty(len(N_list))
    for j, (N, sol) in enumerate(zip(N_list, coarse)):
        m = ref_N // N
        errors[j] = np.max(np.abs(sol.values - ref.values[::m]))
    rates = fit_rate(errors, N_list)

    a0 = problem.order.alpha0
    predicted = 2.0 * a0 if case.upper() == "III" else 2.0
    return ConvergenceReport(
        config_id=config_id,
        case=case.upper(),
        Ns=N_list,
        ref_N=ref_N,
        r=r,
        errors=errors,
        rates=rates,
        predicted_rate=predicted,
    )


def singularity_exponent(solution: Solution, max_fraction: float = 0.1) -> float:
    """Fitted power of the solution's derivative near t = 0.

    Least-squares slope of ln |difference quotient| against ln t over the
    early nodes (first max_fraction of the mesh, skipping the first cell).
    For a solution behaving like u' ~ t^beta this returns beta, which is
    alpha(0) - 1 for the singular regime and ~0 for the smooth one.
    """
    mesh = solution.mesh
    n_hi = max(8, int(mesh.N * max_fraction))
    idx = np.arange(2, min(n_hi, mesh.N) + 1)
    dq = (solution.values[idx] - solution.values[idx - 1]) / mesh.steps[idx - 1]
    tm = 0.5 * (mesh.nodes[idx] + mesh.nodes[idx - 1])
    keep = np.abs(dq) > 0
    if np.count_nonzero(keep) < 8:
        raise InsufficientDataError(
            "need at least 8 nonzero difference quotients near t = 0"
        )
    slope = np.polyfit(np.log(tm[keep]), np.log(np.abs(dq[keep])), 1)[0]
    return float(slope)
