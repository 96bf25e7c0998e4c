import pytest
import sys
import os
from unittest.mock import patch

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from polarsuborbits.errors import CapExceededError, GeometryError
from polarsuborbits.geometry import space_new
from polarsuborbits.lambda_graph import VertexTable, basepoint
from polarsuborbits.qsrg import (
    QsrgParams,
    census,
    census_checks,
    derived_lambda,
    derived_mu_by_label,
    mu,
    qsrg_params,
    stated_discrepancies,
)
from polarsuborbits.suborbits import SuborbitLabel, label_table, representative


class TestParams:
    def test_q3_nu2(self):
        params = qsrg_params(3, 2)
        assert params == QsrgParams(n=243, k=32, lambda_=14, c_values=(0, 9, 8, 12))

    def test_q5_nu2(self):
        params = qsrg_params(5, 2)
        assert (params.n, params.k, params.lambda_) == (3125, 144, 44)
        assert set(params.c_values) == {0, 25, 24, 30}

    def test_to_dict(self):
        assert qsrg_params(3, 2).to_dict() == {'n': 243, 'k': 32, 'lambda': 14, 'c_values': [0, 9, 8, 12]}

    def test_nu1_rejected(self):
        with pytest.raises(GeometryError):
            qsrg_params(3, 1)


class TestDerived:
    @pytest.mark.parametrize('q, value', [(3, 7), (5, 23), (7, 47)])
    def test_lambda(self, q, value):
        assert derived_lambda(q) == value

    def test_mu_by_label_q3(self):
        assert derived_mu_by_label(3, 2) == {
            'phi1(1)': 0,
            'phi3(1;a=0)': 3,
            'phi3(1;a=1)': 3,
            'phi4(0)': 4,
            'phi7(1;b=1)': 4,
        }

    def test_mu_by_label_q5(self):
        table = derived_mu_by_label(5, 2)
        assert table['phi3(1;a=1)'] == 5
        assert table['phi7(1;b=1)'] == table['phi7(1;b=2)'] == 6

    def test_mu_by_label_needs_nu2(self):
        with pytest.raises(GeometryError):
            derived_mu_by_label(3, 3)

    def test_stated_discrepancies(self):
        observed = {'degree': {32: 243}, 'lambda_hist': {7: 3888}, 'mu_hist': {0: 243, 3: 7776, 4: 17496}}
        rows = stated_discrepancies(qsrg_params(3, 2).to_dict(), observed)
        assert rows == [
            {'quantity': 'lambda', 'stated': 14, 'observed': [7]},
            {'quantity': 'c_values', 'stated': [0, 8, 9, 12], 'observed': [0, 3, 4]},
        ]

    def test_no_discrepancy_when_values_agree(self):
        observed = {'degree': {32: 243}, 'lambda_hist': {14: 3888}, 'mu_hist': {0: 1, 8: 1, 9: 1, 12: 1}}
        assert stated_discrepancies(qsrg_params(3, 2).to_dict(), observed) == []


class TestMu:
    def setup_method(self):
        self.space = space_new(3, 2)
        self.p1 = basepoint(self.space)

    @pytest.mark.parametrize('a', [0, 1])
    def test_phi3_gives_q(self, a):
        assert mu(self.space, self.p1, representative(self.space, SuborbitLabel(3, 1, a=a))) == 3

    @pytest.mark.parametrize('label, value', [
        (SuborbitLabel(1, 1), 0),
        (SuborbitLabel(4, 0), 4),
        (SuborbitLabel(7, 1, b=1), 4),
    ])
    def test_codimension_2_values(self, label, value):
        assert mu(self.space, self.p1, representative(self.space, label)) == value

    def test_edge_gives_lambda(self):
        assert mu(self.space, self.p1, representative(self.space, SuborbitLabel(2, 0, a=1))) == 7

    def test_self_is_degree(self):
        assert mu(self.space, self.p1, self.p1) == 32


class TestCensus:
    def setup_method(self):
        self.space = space_new(3, 2)
        self.table = VertexTable(self.space)

    def test_exhaustive_q3_nu2(self):
        report = census(self.space, self.table, label_table(self.space, self.table))
        observed = report['observed']
        assert report['mode'] == 'exhaustive'
        assert report['pairs'] == 243 * 242 // 2
        assert observed['degree'] == {32: 243}
        assert observed['lambda_hist'] == {7: 3888}
        assert observed['mu_hist'] == {0: 243, 3: 7776, 4: 17496}
        assert sum(observed['mu_hist'].values()) + 3888 == report['pairs']
        assert observed['mu_by_label'] == derived_mu_by_label(3, 2)
        assert report['sample_mismatches'] == []
        assert set(report['suborbit_mu_spread'].values()) == {1}

        checks = census_checks(self.space, report)
        assert all(c.passed for c in checks), [c.to_dict() for c in checks if not c.passed]

    def test_stated_values_are_reported_not_failed(self):
        report = census(self.space, self.table)
        assert [row['quantity'] for row in report['discrepancies']] == ['lambda', 'c_values']
        assert report['derived']['lambda'] == 7
        assert all(c.passed for c in census_checks(self.space, report))

    def test_per_label_mode_matches_exhaustive(self):
        exhaustive = census(self.space, self.table)
        per_label = census(self.space, self.table, pair_cap=10)
        assert per_label['mode'] == 'per-label'
        assert per_label['observed']['lambda_hist'] == exhaustive['observed']['lambda_hist']
        assert per_label['observed']['mu_hist'] == exhaustive['observed']['mu_hist']
        assert per_label['observed']['mu_by_label'] == exhaustive['observed']['mu_by_label']

    def test_per_label_halves_once_over_all_labels(self):
        # with every length forced to 1, n * 1 is odd; each value is shared by two labels
        with patch('polarsuborbits.qsrg.suborbit_size', return_value=1):
            report = census(self.space, self.table, pair_cap=10)
        assert report['observed']['lambda_hist'] == {7: 243}
        assert report['observed']['mu_hist'][3] == 243
        assert report['observed']['mu_hist'][4] == 243

    def test_vertex_cap(self):
        with pytest.raises(CapExceededError):
            census(self.space, pair_cap=10, vertex_cap=10)

    def test_requires_delta_2(self):
        with pytest.raises(GeometryError):
            census(space_new(3, 2, delta=1))

    def test_failed_check_is_reported(self):
        report = census(self.space, self.table)
        report['observed']['lambda_hist'] = {6: 1, 7: 3887}
        checks = {c.name: c for c in census_checks(self.space, report)}
        assert not checks['lambda constant on edges'].passed
        assert not checks['lambda equals q^2 - 2'].passed
        assert checks['regular of degree k'].passed

    def test_wrong_mu_table_fails(self):
        report = census(self.space, self.table)
        report['observed']['mu_by_label']['phi4(0)'] = 3
        checks = {c.name: c for c in census_checks(self.space, report)}
        assert not checks['mu on codimension-2 suborbits'].passed

    @pytest.mark.slow
    def test_q5_nu2(self):
        space = space_new(5, 2)
        report = census(space, samples=10)
        assert report['mode'] == 'per-label'
        assert report['observed']['degree'] == {144: 3125}
        assert report['observed']['lambda_hist'] == {23: 3125 * 144 // 2}
        assert set(report['observed']['mu_hist']) == {0, 5, 6}
        assert report['observed']['mu_by_label'] == derived_mu_by_label(5, 2)
        checks = census_checks(space, report)
        assert all(c.passed for c in checks), [c.to_dict() for c in checks if not c.passed]

    @pytest.mark.slow
    def test_q3_nu3(self):
        space = space_new(3, 3)
        report = census(space, samples=10)
        checks = census_checks(space, report)
        assert all(c.passed for c in checks), [c.to_dict() for c in checks if not c.passed]
        assert list(report['observed']['lambda_hist']) == [7]
        assert 'mu_by_label' not in report['derived']
