import pytest
import sys
import os

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from polarsuborbits.errors import CapExceededError, GeometryError
from polarsuborbits.geometry import is_isometry, order_gl, order_o, space_new
from polarsuborbits.lambda_graph import VertexTable
from polarsuborbits.oracle import (
    OrbitPartition,
    cross_validate,
    cross_validate_alt,
    g01_generators,
    g0_generators,
    group_closure,
    o_i_generators,
    orbits_from_permutations,
    orbits_on_alt,
    orbits_on_lambda,
    pair_orbits,
)


class TestOrbitPartition:
    def test_from_index_numbers_by_first_appearance(self):
        partition = OrbitPartition.from_index(np.array([5, 5, 2, 7, 2]))
        assert partition.classes == [[0, 1], [2, 4], [3]]
        assert partition.index.tolist() == [0, 0, 1, 2, 1]
        assert partition.sizes() == [2, 2, 1]
        assert len(partition) == 3
        assert partition.to_json() == {'points': 5, 'classes': [[0, 1], [2, 4], [3]]}

    def test_orbits_from_permutations(self):
        swap = np.array([1, 0, 2, 3])
        cycle = np.array([0, 1, 3, 2])
        partition = orbits_from_permutations([swap], 4)
        assert partition.classes == [[0, 1], [2], [3]]
        assert orbits_from_permutations([swap, cycle], 4).classes == [[0, 1], [2, 3]]

    def test_no_generators(self):
        assert orbits_from_permutations([], 3).sizes() == [1, 1, 1]


class TestGenerators:
    def setup_method(self):
        self.space = space_new(3, 2)

    def test_generators_are_isometries(self):
        for g in g0_generators(self.space):
            assert is_isometry(self.space, g.full)

    def test_g01_closure_order(self):
        closure = group_closure(self.space, g01_generators(self.space), cap=1000)
        assert len(closure) == order_gl(2, 3) * order_o(2, 3) == 384

    def test_g01_closure_nu1(self):
        space = space_new(3, 1)
        assert len(group_closure(space, g01_generators(space), cap=1000)) == 2 * 8

    def test_closure_cap(self):
        with pytest.raises(CapExceededError):
            group_closure(self.space, g01_generators(self.space), cap=50)

    def test_o_i_generators_shape(self):
        for T in o_i_generators(self.space, 1):
            assert T.shape == (2, 2)
            assert T[0, 1] == 0
        with pytest.raises(GeometryError):
            o_i_generators(self.space, 3)
        with pytest.raises(GeometryError):
            o_i_generators(space_new(3, 1), 2)

    def test_generators_need_delta_2(self):
        with pytest.raises(GeometryError):
            g01_generators(space_new(3, 2, delta=1))


class TestOrbitsOnLambda:
    def test_q3_nu2(self):
        partition = orbits_on_lambda(space_new(3, 2))
        assert len(partition) == 8
        assert sorted(partition.sizes()) == [1, 2, 16, 16, 32, 32, 48, 96]
        assert partition.classes[0] == [0]

    @pytest.mark.parametrize('q', [3, 5, 7])
    def test_nu1(self, q):
        partition = orbits_on_lambda(space_new(q, 1))
        assert sorted(partition.sizes()) == [1, (q * q - 1) // 2, (q * q - 1) // 2]

    def test_cap(self):
        with pytest.raises(CapExceededError):
            orbits_on_lambda(space_new(3, 2), cap=100)

    def test_cross_validate_q3_nu2(self):
        checks, data = cross_validate(space_new(3, 2))
        assert all(c.passed for c in checks), [c.to_dict() for c in checks if not c.passed]
        assert data['orbits'] == 8
        assert data['group_order'] == 384
        assert data['labels']['phi7(1;b=1)'] == 96

    @pytest.mark.slow
    def test_cross_validate_q5_nu2(self):
        space = space_new(5, 2)
        checks, data = cross_validate(space, VertexTable(space), threads=4)
        assert all(c.passed for c in checks)
        assert data['orbits'] == 9

    @pytest.mark.slow
    def test_cross_validate_q3_nu3(self):
        checks, data = cross_validate(space_new(3, 3), threads=4)
        assert all(c.passed for c in checks)
        assert data['orbits'] == 12


class TestOrbitsOnAlternate:
    @pytest.mark.parametrize('nu, i, count', [(2, 1, 2), (2, 2, 2), (3, 1, 3), (3, 2, 3), (4, 2, 6)])
    def test_orbit_counts(self, nu, i, count):
        assert len(orbits_on_alt(space_new(3, nu), i)) == count

    @pytest.mark.parametrize('nu', [2, 3, 4])
    def test_cross_validate(self, nu):
        space = space_new(3, nu)
        for i in (1, 2):
            checks = cross_validate_alt(space, i)
            assert len(checks) == 3
            assert all(c.passed for c in checks), [c.to_dict() for c in checks if not c.passed]
            assert checks[0].suite == f'alt-O{i}'

    def test_cap(self):
        with pytest.raises(CapExceededError):
            orbits_on_alt(space_new(3, 4), 1, cap=10)


class TestPairOrbits:
    def test_q3_nu2_has_eight_classes(self):
        partition = pair_orbits(space_new(3, 2))
        assert partition.points == 243 * 243
        assert len(partition) == 8
        assert sorted(partition.sizes()) == sorted(243 * k for k in (1, 2, 16, 16, 32, 32, 48, 96))

    def test_cap(self):
        with pytest.raises(CapExceededError):
            pair_orbits(space_new(3, 2), cap=1000)
