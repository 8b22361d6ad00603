import math

import numpy as np
import pytest
from scipy.integrate import quad

from vofie.assembly import (
    assemble,
    gauss_nodes,
    history_weights,
    singular_moments,
)
from vofie.kernel import kernel_Ks
from vofie.mesh import make_mesh
from vofie.order import (
    make_constant_order,
    make_linear_order,
    make_sine_order,
)


class TestGaussNodes:
    def test_midpoint(self):
        rule = gauss_nodes(1)
        np.testing.assert_allclose(rule.nodes, [0.5])
        np.testing.assert_allclose(rule.weights, [1.0])

    def test_two_point(self):
        rule = gauss_nodes(2)
        np.testing.assert_allclose(
            rule.nodes, [(1 - 1 / math.sqrt(3)) / 2, (1 + 1 / math.sqrt(3)) / 2], rtol=1e-15
        )
        np.testing.assert_allclose(rule.weights, [0.5, 0.5], rtol=1e-15)

    def test_degree_seven_exactness(self):
        rule = gauss_nodes(4)
        got = float(np.sum(rule.weights * rule.nodes**6))
        assert got == pytest.approx(1.0 / 7.0, abs=1e-14)
        got7 = float(np.sum(rule.weights * rule.nodes**7))
        assert got7 == pytest.approx(1.0 / 8.0, abs=1e-14)

    def test_normalized(self):
        for count in (2, 20, 80):
            rule = gauss_nodes(count)
            assert float(np.sum(rule.weights)) == pytest.approx(1.0, abs=1e-13)
            assert np.all(np.diff(rule.nodes) > 0)
            assert rule.nodes[0] > 0 and rule.nodes[-1] < 1

    def test_count_validation(self):
        with pytest.raises(ValueError):
            gauss_nodes(0)


class TestSingularMoments:
    def test_classical_trapezoid(self):
        # alpha = 1 reduces the weight to 1, so the hat moments are tau/2
        order = make_constant_order(1.0)
        mesh = make_mesh(1.0, 5, 1.0)
        for n, i in [(1, 1), (3, 2), (5, 5)]:
            wl, wr = singular_moments(order, mesh, n, i)
            assert wl == pytest.approx(0.1, rel=1e-13)
            assert wr == pytest.approx(0.1, rel=1e-13)

    def test_beta_integral_cell(self):
        # single cell [0, 1], alpha = 0.5: total = 2/sqrt(pi),
        # ascending hat gets B(1/2, 2)/Gamma(1/2) = 4/(3 sqrt(pi))
        order = make_constant_order(0.5)
        mesh = make_mesh(1.0, 1, 1.0)
        wl, wr = singular_moments(order, mesh, 1, 1)
        assert wl + wr == pytest.approx(2 / math.sqrt(math.pi), rel=1e-13)
        assert wr == pytest.approx(4 / (3 * math.sqrt(math.pi)), rel=1e-13)

    def test_partition_of_unity(self):
        order = make_sine_order(0.6, 0.1)
        mesh = make_mesh(1.0, 12, 1.5)
        for n in (3, 8, 12):
            al = float(order.alpha(mesh.nodes[n]))
            for i in range(1, n + 1):
                wl, wr = singular_moments(order, mesh, n, i)
                a = mesh.nodes[n] - mesh.nodes[i]
                b = mesh.nodes[n] - mesh.nodes[i - 1]
                direct = (b**al - a**al) / (al * math.gamma(al))
                assert wl + wr == pytest.approx(direct, abs=1e-13)

    def test_positivity(self):
        order = make_sine_order(0.4, 0.2)
        mesh = make_mesh(1.0, 20, 2.5)
        for n in range(1, 21):
            for i in range(1, n + 1):
                wl, wr = singular_moments(order, mesh, n, i)
                assert wl > 0
                assert wr > 0

    def test_index_errors(self):
        order = make_constant_order(0.5)
        mesh = make_mesh(1.0, 4, 1.0)
        with pytest.raises(IndexError):
            singular_moments(order, mesh, 2, 3)
        with pytest.raises(IndexError):
            singular_moments(order, mesh, 5, 1)


class TestHistoryWeights:
    def test_constant_order_row_is_zero(self):
        order = make_constant_order(0.5)
        mesh = make_mesh(1.0, 8, 1.0)
        row, h0 = history_weights(order, mesh, gauss_nodes(20), 8)
        np.testing.assert_allclose(row, 0.0, atol=1e-15)
        assert h0 == 0.0

    def test_against_adaptive_quadrature(self):
        order = make_sine_order(0.6, 0.1)
        mesh = make_mesh(1.0, 8, 1.0)
        n = 8
        tn = mesh.nodes[n]
        row, h0 = history_weights(order, mesh, gauss_nodes(80), n)

        def hat_i(i, s):
            tl, tc = mesh.nodes[i - 1], mesh.nodes[i]
            tr = mesh.nodes[i + 1] if i < n else tc
            s = np.asarray(s, dtype=float)
            up = (s - tl) / (tc - tl)
            down = (tr - s) / (tr - tc) if i < n else 0.0
            return np.where(s <= tc, up, down)

        for i in range(1, n + 1):
            hi = mesh.nodes[min(i + 1, n)]
            kwargs = {"points": [mesh.nodes[i]]} if i < n else {}
            oracle, _ = quad(
                lambda s: kernel_Ks(order, tn, s) * hat_i(i, s),
                mesh.nodes[i - 1],
                hi,
                limit=400,
                epsabs=1e-9,
                **kwargs,
            )
            assert row[i] == pytest.approx(oracle, abs=1e-8)
        oracle0, _ = quad(
            lambda s: kernel_Ks(order, tn, s) * (mesh.nodes[1] - s) / mesh.steps[0],
            0.0,
            mesh.nodes[1],
            limit=400,
            epsabs=1e-9,
        )
        assert h0 == pytest.approx(oracle0, abs=1e-8)

    def test_row_sum_identity(self):
        # sum_i h[n][i] + h0[n] = 1 - t_n^{da} / Gamma(1 + da)
        order = make_sine_order(0.6, 0.1)
        mesh = make_mesh(1.0, 16, 1.0)
        rule = gauss_nodes(80)
        for n in (4, 16):
            row, h0 = history_weights(order, mesh, rule, n)
            tn = mesh.nodes[n]
            da = float(order.alpha(tn)) - order.alpha0
            expected = 1.0 - tn**da / math.gamma(1.0 + da)
            assert float(np.sum(row)) + h0 == pytest.approx(expected, abs=1e-9)

    def test_refinement_convergence(self):
        order = make_sine_order(0.6, 0.1)
        mesh = make_mesh(1.0, 8, 1.0)
        n = 8
        row40, h0_40 = history_weights(order, mesh, gauss_nodes(40), n)
        row80, h0_80 = history_weights(order, mesh, gauss_nodes(80), n)
        np.testing.assert_allclose(row40[1 : n - 1], row80[1 : n - 1], atol=1e-10)
        assert abs(h0_40 - h0_80) <= 1e-10
        # the diagonal cell carries the log singularity
        assert abs(row40[n] - row80[n]) <= 1e-6
        assert abs(row40[n - 1] - row80[n - 1]) <= 1e-6


class TestAssemble:
    def test_dense_vs_fast_path(self):
        order = make_linear_order(0.9, 0.4)
        mesh = make_mesh(1.0, 16, 1.0)
        rule = gauss_nodes(80)
        dense = assemble(order, mesh, rule)
        fast = assemble(order, mesh, rule, fast_path=True)
        for n in range(1, 17):
            for i in range(1, n + 1):
                assert abs(dense.h_entry(n, i) - fast.h_entry(n, i)) <= 1e-12
            assert abs(dense.h0[n] - fast.h0[n]) <= 1e-12
        np.testing.assert_allclose(dense.wL, fast.wL)
        np.testing.assert_allclose(dense.wR, fast.wR)

    def test_translation_invariance_dense(self):
        order = make_linear_order(0.9, 0.4)
        mesh = make_mesh(1.0, 16, 1.0)
        dense = assemble(order, mesh, gauss_nodes(80))
        worst = max(
            abs(dense.h_entry(n, i) - dense.h_entry(n + 1, i + 1))
            for n in range(1, 16)
            for i in range(1, n + 1)
        )
        assert worst <= 1e-12

    def test_storage_footprint(self):
        order = make_linear_order(0.9, 0.4)
        mesh = make_mesh(1.0, 32, 1.0)
        dense = assemble(order, mesh, gauss_nodes(20))
        fast = assemble(order, mesh, gauss_nodes(20), fast_path=True)
        assert dense.history_storage_entries() == 32 * 33 // 2
        assert fast.history_storage_entries() == 2 * 32

    def test_constant_order_all_zero(self):
        order = make_constant_order(0.5)
        mesh = make_mesh(1.0, 8, 1.0)
        dense = assemble(order, mesh, gauss_nodes(20))
        fast = assemble(order, mesh, gauss_nodes(20), fast_path=True)
        np.testing.assert_allclose(dense.h, 0.0, atol=1e-15)
        np.testing.assert_allclose(fast.gen_left, 0.0, atol=1e-15)
        np.testing.assert_allclose(fast.gen_right, 0.0, atol=1e-15)

    def test_fast_path_preconditions(self):
        rule = gauss_nodes(10)
        with pytest.raises(ValueError):
            assemble(make_sine_order(0.6, 0.1), make_mesh(1.0, 8, 1.0), rule, fast_path=True)
        with pytest.raises(ValueError):
            assemble(make_linear_order(0.9, 0.4), make_mesh(1.0, 8, 2.0), rule, fast_path=True)

    def test_f_term_quadrature_matches_moments(self):
        order = make_sine_order(0.6, 0.1)
        mesh = make_mesh(1.0, 8, 1.0)
        rule = gauss_nodes(80)
        mom = assemble(order, mesh, rule, f_term="moments")
        qua = assemble(order, mesh, rule, f_term="quadrature")
        np.testing.assert_allclose(qua.wL, mom.wL, atol=1e-7)
        np.testing.assert_allclose(qua.wR, mom.wR, atol=1e-7)
        with pytest.raises(ValueError):
            assemble(order, mesh, rule, f_term="simpson")

    def test_csv_dump(self, tmp_path):
        order = make_linear_order(0.9, 0.4)
        mesh = make_mesh(1.0, 4, 1.0)
        table = assemble(order, mesh, gauss_nodes(10))
        path = tmp_path / "weights.csv"
        table.dump_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "n,i,h,wL,wR"
        assert len(lines) == 1 + 4 * 5 // 2
