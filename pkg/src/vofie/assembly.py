"""Collocation coefficient assembly.

Two coefficient families are built per collocation row n:

* history weights h[n][i]: integrals of K_s(t_n, .) against the piecewise
  linear hat functions, computed by an open Gauss-Legendre rule per cell
  (the diagonal cell gets geometric sub-panels toward the log singularity);
* singular moments wL/wR: integrals of the two hat pieces on each cell
  against the weakly singular weight (t_n - s)^{alpha(t_n)-1}/Gamma(alpha(t_n)),
  in closed form (product integration), with a quadrature-based variant
  behind a flag for comparison.

For an affine order on a uniform mesh the history weights are translation
invariant, h[n][i] = h[n+1][i+1]; the fast path stores just two O(N)
generating sequences instead of the dense lower triangle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .kernel import kernel_Ks
from .mesh import Mesh
from .order import VariableOrder

# Geometric subdivision of the diagonal cell toward s = t_n: the log
# singularity is integrable, but a single open panel leaves ~1e-7 errors
# that the scheme would then inherit.
DIAG_PANELS = 6
DIAG_RATIO = 0.15


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes/weights mapped to the open unit interval."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def count(self) -> int:
        return len(self.nodes)


def gauss_nodes(count: int = 80) -> QuadratureRule:
    """Gauss-Legendre rule on (0, 1); exact for degree <= 2*count - 1."""
    if count < 1:
        raise ValueError(f"need at least one quadrature node, got {count}")
    x, w = np.polynomial.legendre.leggauss(count)
    return QuadratureRule(nodes=(x + 1.0) / 2.0, weights=w / 2.0)


def _diag_edges(lo: float, hi: float) -> np.ndarray:
    """Panel edges from lo to hi accumulating geometrically toward hi."""
    tau = hi - lo
    inner = hi - tau * DIAG_RATIO ** np.arange(1, DIAG_PANELS, dtype=float)
    return np.concatenate(([lo], inner, [hi]))


def _moment_row(order: VariableOrder, mesh: Mesh, n: int):
    """Closed-form hat moments for all cells i = 1..n of row n.

    Substituting v = t_n - s with a = t_n - t_i, b = t_n - t_{i-1} and
    writing al = alpha(t_n):

        wL = [(b^{al+1} - a^{al+1})/(al+1) - a (b^al - a^al)/al] / (tau_i G),
        wR = [b (b^al - a^al)/al - (b^{al+1} - a^{al+1})/(al+1)] / (tau_i G),

    with G = Gamma(al). wL multiplies the nodal value at t_{i-1}, wR the
    one at t_i; both are nonnegative and sum to the cell's singular mass.
    """
    tn = mesh.nodes[n]
    al = float(order.alpha(tn))
    a = tn - mesh.nodes[1 : n + 1]
    b = tn - mesh.nodes[:n]
    tau = mesh.steps[:n]
    pa = b**al - a**al
    pa1 = b ** (al + 1.0) - a ** (al + 1.0)
    g = special.gamma(al)
    wl = (pa1 / (al + 1.0) - a * pa / al) / (tau * g)
    wr = (b * pa / al - pa1 / (al + 1.0)) / (tau * g)
    return wl, wr


def singular_moments(order: VariableOrder, mesh: Mesh, n: int, i: int):
    """Closed-form (wL, wR) for cell i of row n; see _moment_row."""
    if not (1 <= i <= n <= mesh.N):
        raise IndexError(f"need 1 <= i <= n <= N, got i={i}, n={n}, N={mesh.N}")
    wl, wr = _moment_row(order, mesh, n)
    return float(wl[i - 1]), float(wr[i - 1])


def _moment_row_quadrature(order: VariableOrder, mesh: Mesh, rule: QuadratureRule, n: int):
    """Quadrature variant of the hat moments (comparison path).

    Applies the open rule to hat * weight on every smooth cell; the diagonal
    cell's algebraic singularity is removed first by the substitution
    v = (t_n - s), u = v^alpha, after which the rule sees a smooth integrand.
    """
    tn = mesh.nodes[n]
    al = float(order.alpha(tn))
    g = special.gamma(al)
    x, w = rule.nodes, rule.weights
    wl = np.empty(n)
    wr = np.empty(n)
    for i in range(1, n):
        lo, hi = mesh.nodes[i - 1], mesh.nodes[i]
        tau = hi - lo
        s = lo + tau * x
        wgt = (tn - s) ** (al - 1.0) / g
        wl[i - 1] = tau * np.sum(w * wgt * (hi - s)) / tau
        wr[i - 1] = tau * np.sum(w * wgt * (s - lo)) / tau
    # diagonal cell: v^{al-1} dv = du/al with u = v^al, integrand smooth in u
    tau = mesh.steps[n - 1]
    umax = tau**al
    v = (umax * x) ** (1.0 / al)
    wl[n - 1] = umax * np.sum(w * v / tau) / (al * g)
    wr[n - 1] = umax * np.sum(w * (1.0 - v / tau)) / (al * g)
    return wl, wr


def _half_hat_integrals(order, t_eval, lo, hi, rule, singular_at_hi=False):
    """(I_left, I_right): K_s(t_eval, .) against the two hat halves on [lo, hi].

    I_left carries the descending piece (hi - s)/tau, I_right the ascending
    piece (s - lo)/tau. With singular_at_hi the cell is split into geometric
    panels accumulating toward hi (log singularity of K_s at s = t_eval).
    """
    tau = hi - lo
    x, w = rule.nodes, rule.weights
    edges = _diag_edges(lo, hi) if singular_at_hi else np.array([lo, hi])
    il = ir = 0.0
    for a_, b_ in zip(edges[:-1], edges[1:]):
        s = a_ + (b_ - a_) * x
        vals = kernel_Ks(order, t_eval, s)
        il += (b_ - a_) * np.sum(w * vals * (hi - s)) / tau
        ir += (b_ - a_) * np.sum(w * vals * (s - lo)) / tau
    return il, ir


def history_weights(order: VariableOrder, mesh: Mesh, rule: QuadratureRule, n: int):
    """History row (h[n][1..n], h0[n]) of the K_s term.

    h[n][i] collects the integrals of K_s(t_n, .) against hat_i over its one
    or two supporting cells; h0[n] is the u0 coefficient from the descending
    hat on [t_0, t_1]. Returned as (row, h0) with row[0] unused (zero).
    """
    if not (1 <= n <= mesh.N):
        raise IndexError(f"need 1 <= n <= N, got n={n}, N={mesh.N}")
    tn = mesh.nodes[n]
    x, w = rule.nodes, rule.weights
    row = np.zeros(n + 1)

    if n > 1:
        # all non-diagonal cells in one vectorized sweep
        lo = mesh.nodes[: n - 1]
        tau = mesh.steps[: n - 1]
        S = lo[:, None] + tau[:, None] * x[None, :]
        vals = kernel_Ks(order, tn, S)
        il = tau * np.sum(vals * ((1.0 - x) * w)[None, :], axis=1)
        ir = tau * np.sum(vals * (x * w)[None, :], axis=1)
        h0 = il[0]
        row[1:n] += ir
        row[1 : n - 1] += il[1:]
        il_d, ir_d = _half_hat_integrals(
            order, tn, mesh.nodes[n - 1], tn, rule, singular_at_hi=True
        )
        row[n - 1] += il_d
        row[n] = ir_d
    else:
        il_d, ir_d = _half_hat_integrals(
            order, tn, 0.0, tn, rule, singular_at_hi=True
        )
        h0 = il_d
        row[1] = ir_d
    return row, float(h0)


@dataclass
class WeightTable:
    """All collocation coefficients for one (order, mesh, rule) triple.

    Dense mode stores the full lower-triangular history table h[n][i] plus
    h0[n]; invariant mode (fast path) stores the two generating sequences
    gen_left[k], gen_right[k] with

        h[n][i] = gen_right[n-i] + gen_left[n-i-1]  (1 <= i < n),
        h[n][n] = gen_right[0],      h0[n] = gen_left[n-1],

    valid because K_s depends on t - s only for affine order on a uniform
    mesh. Singular moments wL/wR are always dense (they depend on
    alpha(t_n) row by row).
    """

    N: int
    invariant_mode: bool
    wL: np.ndarray
    wR: np.ndarray
    h0: np.ndarray
    h: np.ndarray | None = None
    gen_left: np.ndarray | None = None
    gen_right: np.ndarray | None = None
    f_term: str = "moments"

    def history_row(self, n: int) -> np.ndarray:
        """Row h[n][0..n] (entry 0 is zero; the u0 hat lives in h0)."""
        if self.invariant_mode:
            row = np.zeros(n + 1)
            if n >= 1:
                k = n - np.arange(1, n)
                row[1:n] = self.gen_right[k] + self.gen_left[k - 1]
                row[n] = self.gen_right[0]
            return row
        return self.h[n, : n + 1].copy()

    def h_entry(self, n: int, i: int) -> float:
        if not (1 <= i <= n <= self.N):
            raise IndexError(f"need 1 <= i <= n <= N, got i={i}, n={n}")
        if self.invariant_mode:
            if i == n:
                return float(self.gen_right[0])
            return float(self.gen_right[n - i] + self.gen_left[n - i - 1])
        return float(self.h[n, i])

    def history_storage_entries(self) -> int:
        """Number of stored history coefficients (structural footprint)."""
        if self.invariant_mode:
            return len(self.gen_left) + len(self.gen_right)
        return self.N * (self.N + 1) // 2

    def dump_csv(self, path) -> None:
        """Row-major dump (n, i, h, wL, wR) at 17 significant digits."""
        with open(path, "w", newline="") as fh:
            fh.write("n,i,h,wL,wR\n")
            for n in range(1, self.N + 1):
                row = self.history_row(n)
                for i in range(1, n + 1):
                    fh.write(
                        f"{n},{i},{row[i]:.17g},"
                        f"{self.wL[n, i]:.17g},{self.wR[n, i]:.17g}\n"
                    )


def assemble(
    order: VariableOrder,
    mesh: Mesh,
    rule: QuadratureRule | None = None,
    fast_path: bool = False,
    f_term: str = "moments",
) -> WeightTable:
    """Build the full weight table.

    fast_path requires a uniform mesh and a declared-affine order; it
    computes the O(N) generating sequences of the translation-invariant
    history weights instead of the dense O(N^2) triangle. f_term selects
    closed-form singular moments ("moments", default) or the open-rule
    quadrature variant ("quadrature") for the right-hand-side weights.
    """
    if rule is None:
        rule = gauss_nodes()
    if f_term not in ("moments", "quadrature"):
        raise ValueError(f"f_term must be 'moments' or 'quadrature', got {f_term!r}")
    N = mesh.N

    wL = np.zeros((N + 1, N + 1))
    wR = np.zeros((N + 1, N + 1))
    for n in range(1, N + 1):
        if f_term == "moments":
            wl, wr = _moment_row(order, mesh, n)
        else:
            wl, wr = _moment_row_quadrature(order, mesh, rule, n)
        wL[n, 1 : n + 1] = wl
        wR[n, 1 : n + 1] = wr

    if fast_path:
        if not mesh.is_uniform:
            raise ValueError("fast_path requires a uniform mesh (r = 1)")
        if not order.is_linear:
            raise ValueError("fast_path requires a declared-linear order")
        gen_left, gen_right = _generating_sequences(order, mesh, rule)
        return WeightTable(
            N=N,
            invariant_mode=True,
            wL=wL,
            wR=wR,
            h0=np.concatenate(([0.0], gen_left)),
            gen_left=gen_left,
            gen_right=gen_right,
            f_term=f_term,
        )

    h = np.zeros((N + 1, N + 1))
    h0 = np.zeros(N + 1)
    for n in range(1, N + 1):
        row, h0n = history_weights(order, mesh, rule, n)
        h[n, : n + 1] = row
        h0[n] = h0n
    return WeightTable(
        N=N, invariant_mode=False, wL=wL, wR=wR, h0=h0, h=h, f_term=f_term
    )


def _generating_sequences(order: VariableOrder, mesh: Mesh, rule: QuadratureRule):
    """Half-hat integrals of K_s over cells indexed by gap k = (t_n - s)/tau.

    gen_left[k] integrates K_s(T, T - v) (v - k tau)/tau over v in
    [k tau, (k+1) tau]; gen_right[k] integrates ((k+1) tau - v)/tau there.
    K_s is a function of the gap alone for affine order, so any evaluation
    point t works; we use t = T.
    """
    N = mesh.N
    tau = mesh.T / N
    T = mesh.T
    x, w = rule.nodes, rule.weights
    gen_left = np.empty(N)
    gen_right = np.empty(N)

    # k = 0 cell touches the singularity at v = 0 (s = T)
    edges = T - _diag_edges(T - tau, T)[::-1]  # panels of [0, tau] toward 0
    gl = gr = 0.0
    for a_, b_ in zip(edges[:-1], edges[1:]):
        v = a_ + (b_ - a_) * x
        vals = kernel_Ks(order, T, T - v)
        gl += (b_ - a_) * np.sum(w * vals * (v / tau))
        gr += (b_ - a_) * np.sum(w * vals * (1.0 - v / tau))
    gen_left[0], gen_right[0] = gl, gr

    if N > 1:
        k = np.arange(1, N, dtype=float)
        V = k[:, None] * tau + tau * x[None, :]
        vals = kernel_Ks(order, T, T - V)
        gen_left[1:] = tau * np.sum(vals * (x * w)[None, :], axis=1)
        gen_right[1:] = tau * np.sum(vals * ((1.0 - x) * w)[None, :], axis=1)
    return gen_left, gen_right
