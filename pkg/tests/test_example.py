import numpy as np
import pytest

from skewchain.chains import Reading, compute_chain
from skewchain.errors import CompletenessError
from skewchain.example import (
    CSV_HEADER,
    ExampleParams,
    closed_forms,
    discrepancy_report,
    example_channels,
    rho_theta,
    row_hard_failures,
    sweep,
    write_discrepancy_csv,
    write_sweep_csv,
)
from skewchain.linalg import max_abs
from skewchain.objects import Convention, completeness_residual


class TestRhoTheta:
    def test_midpoint_is_maximally_mixed(self):
        assert max_abs(rho_theta(0.5).rho - np.eye(4) / 4) == 0.0

    def test_endpoint_spectrum(self):
        for theta in (0.0, 1.0):
            eigs = np.linalg.eigvalsh(rho_theta(theta).rho)
            assert np.allclose(eigs, [0, 0, 0.5, 0.5], atol=1e-12)

    def test_off_diagonals(self):
        dm = rho_theta(0.75)
        assert dm.rho[0, 1] == pytest.approx(0.5 / 4)
        assert dm.rho[2, 3] == pytest.approx(0.5 / 4)
        assert dm.rho[0, 2] == 0.0

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            rho_theta(1.2)
        with pytest.raises(ValueError):
            rho_theta(-0.1)


class TestExampleChannels:
    def test_p_zero_first_operator_is_identity(self):
        n1, _ = example_channels(0.0, 0.5)
        assert max_abs(n1.operators[0] - np.eye(4)) == 0.0
        assert max_abs(n1.operators[1]) == 0.0

    def test_q_one_first_operator(self):
        _, n2 = example_channels(0.5, 1.0)
        assert max_abs(n2.operators[0] - np.diag([0.0, 1.0, 0.0, 1.0])) == 0.0

    def test_row_sum_validation_at_interior_point(self):
        n1, n2 = example_channels(0.5, 0.5)
        assert completeness_residual(n1.operators, Convention.ROW_SUM) <= 1e-12
        assert completeness_residual(n2.operators, Convention.ROW_SUM) <= 1e-12

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            example_channels(1.5, 0.5)
        with pytest.raises(ValueError):
            example_channels(0.5, -0.5)

    def test_whole_unit_square_validates(self):
        for p in np.linspace(0, 1, 6):
            for q in np.linspace(0, 1, 6):
                example_channels(float(p), float(q))  # raises CompletenessError on failure


class TestClosedForms:
    def test_worked_point(self):
        forms = closed_forms(ExampleParams(theta=1.0, p=0.5, q=0.5))
        assert forms.eq20 == pytest.approx(0.02144660940672623, abs=1e-12)
        assert forms.eq21 == pytest.approx(0.5857864376269049, abs=1e-12)
        assert forms.eq22 == pytest.approx(0.0031407832308854556, abs=1e-12)
        assert forms.eq23 == pytest.approx(0.016870152862766035, abs=1e-12)
        assert forms.eq24 == pytest.approx(0.015142074130636667, abs=1e-12)
        assert forms.eq25 == pytest.approx(0.00763593008667648, abs=1e-12)

    def test_incoherent_point_vanishes(self):
        forms = closed_forms(ExampleParams(theta=0.5, p=0.3, q=0.8))
        for name in ("eq20", "eq21", "eq22", "eq23"):
            assert getattr(forms, name) == pytest.approx(0.0, abs=1e-15)

    def test_eq20_matches_pipeline_product_on_grid(self):
        for theta in (0.0, 0.2, 0.7, 1.0):
            for p in (0.0, 0.4, 1.0):
                for q in (0.1, 0.9):
                    rho = rho_theta(theta)
                    n1, n2 = example_channels(p, q)
                    chain = compute_chain(rho, n1, n2)
                    forms = closed_forms(ExampleParams(theta=theta, p=p, q=q))
                    assert chain.product == pytest.approx(forms.eq20, abs=1e-10)
                    assert chain.cross_term == pytest.approx(forms.eq22, abs=1e-10)

    def test_eq21_is_twice_the_pipeline_sum(self):
        rho = rho_theta(1.0)
        n1, n2 = example_channels(0.5, 0.5)
        chain = compute_chain(rho, n1, n2)
        forms = closed_forms(ExampleParams(theta=1.0, p=0.5, q=0.5))
        assert chain.sum == pytest.approx(0.2928932188134524, abs=1e-12)
        assert forms.eq21 == pytest.approx(2.0 * chain.sum, abs=1e-12)

    def test_eq23_matches_product_reading_s21(self):
        rho = rho_theta(0.9)
        n1, n2 = example_channels(0.3, 0.6)
        chain = compute_chain(rho, n1, n2, Reading.PRODUCT)
        forms = closed_forms(ExampleParams(theta=0.9, p=0.3, q=0.6))
        assert chain.s_values[(2, 1)] == pytest.approx(forms.eq23, abs=1e-10)


class TestSymmetries:
    def test_theta_reflection_invariance(self):
        for theta in (0.0, 0.15, 0.4):
            a = compute_chain(rho_theta(theta), *example_channels(0.35, 0.8))
            b = compute_chain(rho_theta(1.0 - theta), *example_channels(0.35, 0.8))
            assert a.product == pytest.approx(b.product, abs=1e-10)
            assert a.sum == pytest.approx(b.sum, abs=1e-10)
            assert a.cross_term == pytest.approx(b.cross_term, abs=1e-10)

    def test_pq_swap_invariance_of_product(self):
        # swapping (p, q) together with the channel roles fixes the product;
        # the cross term is not symmetric and must not be asserted here
        rho = rho_theta(1.0)
        n1a, n2a = example_channels(0.3, 0.7)
        n1b, n2b = example_channels(0.7, 0.3)
        a = compute_chain(rho, n1a, n2a)
        b = compute_chain(rho, n1b, n2b)
        assert a.product == pytest.approx(b.product, abs=1e-10)


class TestSweep:
    def test_row_order_is_lexicographic(self):
        table = sweep([0.0, 1.0, 0.5], [0.2, 0.8], [0.1], t_grid=[0.0, 1.0])
        keys = [(r.params.theta, r.params.p, r.params.q, r.params.t) for r in table.rows]
        assert keys == sorted(keys)
        assert len(table) == 3 * 2 * 1 * 2

    def test_single_point_matches_direct_computation(self):
        table = sweep([1.0], [0.5], [0.5])
        assert len(table) == 1
        row = table.rows[0]
        assert row.chain.product == pytest.approx(0.02144660940672623, abs=1e-12)
        assert row.chain.cross_term == pytest.approx(0.0031407832308854556, abs=1e-12)
        assert row.perm_opt >= row.chain.s_values[(2, 1)] - 1e-12
        assert not row_hard_failures(row)

    def test_theta_midpoint_row_is_all_zero(self):
        table = sweep([0.5], [0.5], [0.5])
        row = table.rows[0]
        assert row.chain.product == 0.0
        assert row.chain.sum == 0.0
        assert row.perm_opt == 0.0
        assert not row_hard_failures(row)

    def test_theta_curve_extremes(self):
        thetas = [i / 10 for i in range(11)]
        table = sweep(thetas, [0.5], [0.5])
        products = {r.params.theta: r.chain.product for r in table.rows}
        sums = {r.params.theta: r.chain.sum for r in table.rows}
        assert products[0.5] == 0.0 and sums[0.5] == 0.0
        assert max(products.values()) == pytest.approx(products[0.0], abs=1e-12)
        assert max(products.values()) == pytest.approx(products[1.0], abs=1e-12)

    def test_hard_invariants_hold_on_coarse_grid(self):
        grid = [i / 4 for i in range(5)]
        table = sweep([1.0], grid, grid)
        for row in table.rows:
            assert not row_hard_failures(row, tol=1e-9)

    def test_rows_satisfy_full_verification(self):
        from skewchain.chains import verify_chain

        table = sweep([0.0, 0.7, 1.0], [0.3, 1.0], [0.0, 0.6])
        for row in table.rows:
            n1, n2 = example_channels(row.params.p, row.params.q)
            verdict = verify_chain(rho_theta(row.params.theta), n1, n2, tol=1e-9)
            assert verdict.hard_passed

    def test_rejects_empty_or_out_of_range(self):
        with pytest.raises(ValueError):
            sweep([], [0.5], [0.5])
        with pytest.raises(ValueError):
            sweep([1.5], [0.5], [0.5])


class TestSweepCsv:
    def test_header_and_roundtrip(self, tmp_path):
        table = sweep([1.0], [0.0, 0.5], [0.5], t_grid=[1.0])
        path = tmp_path / "sweep.csv"
        write_sweep_csv(table, path)
        lines = path.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert len(lines) == 1 + len(table)
        for line in lines[1:]:
            fields = line.split(",")
            assert len(fields) == len(CSV_HEADER.split(","))
            [float(f) for f in fields]  # every field parses as a number

    def test_twelve_significant_digits(self, tmp_path):
        table = sweep([1.0], [0.5], [0.5])
        path = tmp_path / "sweep.csv"
        write_sweep_csv(table, path)
        row = path.read_text().splitlines()[1].split(",")
        product = float(row[CSV_HEADER.split(",").index("product")])
        assert product == pytest.approx(0.02144660940672623, abs=1e-11)

    def test_deterministic_bytes(self, tmp_path):
        table1 = sweep([1.0], [0.0, 1.0], [0.5], seed=3)
        table2 = sweep([1.0], [0.0, 1.0], [0.5], seed=3)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        write_sweep_csv(table1, p1)
        write_sweep_csv(table2, p2)
        assert p1.read_bytes() == p2.read_bytes()


class TestDiscrepancyReport:
    def test_structure_and_ratios(self):
        grid = [ExampleParams(theta=t, p=p, q=q)
                for t in (0.0, 0.3, 1.0) for p in (0.2, 0.8) for q in (0.4, 0.9)]
        report = discrepancy_report(grid)
        assert len(report.rows) == len(grid) * 6
        # eq20/eq22/eq23 agree with the pipeline, eq21 runs at exactly twice it
        assert report.fitted_ratios["eq20"] == pytest.approx(1.0, abs=1e-9)
        assert report.fitted_ratios["eq22"] == pytest.approx(1.0, abs=1e-9)
        assert report.fitted_ratios["eq23"] == pytest.approx(1.0, abs=1e-9)
        assert report.fitted_ratios["eq21"] == pytest.approx(2.0, abs=1e-9)
        # eq24/eq25 are not a constant multiple of the pipeline values
        assert "eq24" not in report.fitted_ratios
        assert "eq25" not in report.fitted_ratios

    def test_eq20_deviation_small_everywhere(self):
        grid = [ExampleParams(theta=t, p=p, q=p)
                for t in np.linspace(0, 1, 5) for p in np.linspace(0, 1, 5)]
        report = discrepancy_report(grid)
        for row in report.rows_for("eq20"):
            assert row.abs_dev <= 1e-10
        for row in report.rows_for("eq22"):
            assert row.abs_dev <= 1e-10

    def test_csv_emission(self, tmp_path):
        report = discrepancy_report([ExampleParams(theta=1.0, p=0.5, q=0.5)])
        path = tmp_path / "disc.csv"
        write_discrepancy_csv(report, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("formula,theta,p,q,numeric,printed")
        assert len(lines) == 1 + 6
        eq21 = next(line for line in lines if line.startswith("eq21"))
        fields = eq21.split(",")
        assert float(fields[-1]) == pytest.approx(2.0, abs=1e-9)

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            discrepancy_report([])
