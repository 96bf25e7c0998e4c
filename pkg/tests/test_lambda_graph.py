import io
import json
import pytest
import sys
import os

import networkx as nx
from hypothesis import given, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from polarsuborbits import matspace as ms
from polarsuborbits.errors import CapExceededError, ConfigError, PolarSuborbitsError, VertexError
from polarsuborbits.geometry import is_totally_isotropic, space_new
from polarsuborbits.lambda_graph import (
    Vertex,
    VertexTable,
    a_block,
    adjacent,
    basepoint,
    build_graph,
    degree,
    enumerate_vertices,
    export_graph,
    joint_dim,
    neighbors,
    realize,
    vertex_at,
    vertex_count,
    vertex_from_matrix,
    vertex_index,
)


class TestVertices:
    def setup_method(self):
        self.space = space_new(3, 2)

    def test_counts(self):
        assert vertex_count(3, 1) == 9
        assert vertex_count(3, 2) == 243
        assert vertex_count(5, 2) == 3125
        assert vertex_count(3, 3) == 19683

    def test_enumeration_order(self):
        vertices = enumerate_vertices(self.space)
        assert len(vertices) == 243
        assert vertices[0] == basepoint(self.space)
        assert [vertex_index(self.space, v) for v in vertices] == list(range(243))
        assert len(set(vertices)) == 243

    def test_vertex_at_range(self):
        with pytest.raises(VertexError):
            vertex_at(self.space, 243)

    def test_every_vertex_is_totally_isotropic(self):
        for v in enumerate_vertices(self.space):
            M = realize(self.space, v)
            assert is_totally_isotropic(self.space, M)
            assert vertex_from_matrix(self.space, M) == v

    def test_rejects_non_alternate_x(self):
        with pytest.raises(VertexError):
            Vertex(ms.identity(self.space.field, 2), ms.zeros(self.space.field, 2, 2))

    def test_rejects_mismatched_z(self):
        with pytest.raises(VertexError):
            Vertex(ms.zeros(self.space.field, 2, 2), ms.zeros(self.space.field, 3, 2))

    def test_vertex_from_matrix_rejects_outsiders(self):
        spec = self.space.field
        P0 = ms.hconcat(spec, [ms.identity(spec, 2), ms.zeros(spec, 2, 4)])
        with pytest.raises(VertexError):
            vertex_from_matrix(self.space, P0)
        with pytest.raises(VertexError):
            vertex_from_matrix(self.space, ms.zeros(spec, 2, 6))

    def test_a_block_of_phi2_representative(self):
        v = Vertex.from_json(self.space, {'X': [0, 0, 0, 0], 'Z': [1, 1, 0, 0]})
        # -1/2 (1 - z) = 2 over F_3
        assert int(a_block(self.space, v)[0, 0]) == 2


class TestVertexJson:
    def setup_method(self):
        self.space = space_new(3, 2)

    def test_from_json_string(self):
        v = Vertex.from_json(self.space, '{"X": [0, 1, 2, 0], "Z": [1, 0, 0, 2]}')
        assert v.to_json() == {'X': [0, 1, 2, 0], 'Z': [1, 0, 0, 2]}
        assert v.key == (1, 1, 0, 0, 2)

    @pytest.mark.parametrize('payload', [
        'not json',
        '{"X": [0, 0, 0, 0]}',
        '{"X": [0, 0, 0], "Z": [0, 0, 0, 0]}',
        '{"X": [0, 0, 0, 0], "Z": [0, 0, 0, 3]}',
        '{"X": [0, 1, 1, 0], "Z": [0, 0, 0, 0]}',
        '{"X": [0, "a", 0, 0], "Z": [0, 0, 0, 0]}',
        '[1, 2]',
    ])
    def test_from_json_rejects(self, payload):
        with pytest.raises(VertexError):
            Vertex.from_json(self.space, payload)


class TestAdjacency:
    def setup_method(self):
        self.space = space_new(3, 2)

    def test_degree_formula(self):
        assert degree(self.space) == 32
        assert degree(space_new(5, 2)) == 144
        assert degree(space_new(3, 1)) == 8

    def test_neighbors_of_basepoint(self):
        p1 = basepoint(self.space)
        found = neighbors(self.space, p1)
        assert len(found) == 32
        assert len(set(found)) == 32
        assert all(adjacent(self.space, p1, w) for w in found)
        assert not adjacent(self.space, p1, p1)

    @settings(deadline=None, max_examples=30)
    @given(st.integers(0, 242))
    def test_neighbors_are_adjacent_and_symmetric(self, index):
        v = vertex_at(self.space, index)
        found = neighbors(self.space, v)
        assert len(set(found)) == degree(self.space)
        for w in found:
            assert adjacent(self.space, w, v)
            assert joint_dim(self.space, v, w) == 3

    def test_joint_dim_of_identical_vertices(self):
        v = vertex_at(self.space, 77)
        assert joint_dim(self.space, v, v) == 2


class TestVertexTable:
    def setup_method(self):
        self.space = space_new(3, 2)
        self.table = VertexTable(self.space)

    def test_shape(self):
        assert len(self.table) == 243
        assert self.table.d == 5
        assert self.table.vertex(0) == basepoint(self.space)
        assert self.table.index_of(self.table.vertex(200)) == 200

    def test_cap(self):
        with pytest.raises(CapExceededError) as excinfo:
            VertexTable(self.space, cap=100)
        assert excinfo.value.required == 243

    def test_identity_permutation(self):
        perm = self.table.permutation(lambda v: v)
        assert perm.tolist() == list(range(243))

    def test_rejects_non_affine_maps(self):
        def square_z(v):
            return Vertex(v.X, v.Z * v.Z)

        with pytest.raises(VertexError):
            self.table.permutation(square_z, checks=243)

    def test_neighbor_permutations(self):
        perms = self.table.neighbor_permutations()
        assert len(perms) == 32
        for perm in perms:
            assert sorted(perm.tolist()) == list(range(243))


class TestGraph:
    def test_q3_nu2(self):
        G = build_graph(space_new(3, 2))
        assert G.number_of_nodes() == 243
        assert G.number_of_edges() == 3888
        assert set(dict(G.degree()).values()) == {32}

    def test_nu1_is_complete(self):
        G = build_graph(space_new(3, 1))
        assert G.number_of_edges() == 36
        assert nx.is_isomorphic(G, nx.complete_graph(9))

    def test_cap(self):
        with pytest.raises(CapExceededError):
            build_graph(space_new(3, 2), cap=10)


class TestExport:
    def setup_method(self):
        self.space = space_new(3, 1)

    def test_edgelist(self):
        stream = io.StringIO()
        summary = export_graph(self.space, 'edgelist', stream)
        lines = stream.getvalue().splitlines()
        assert lines[0] == '9 36'
        assert lines[1] == '0 1'
        assert len(lines) == 37
        assert summary == {'format': 'edgelist', 'vertices': 9, 'edges': 36, 'destination': None}

    def test_dimacs(self):
        stream = io.StringIO()
        export_graph(self.space, 'dimacs', stream)
        lines = stream.getvalue().splitlines()
        assert lines[0] == 'p edge 9 36'
        assert lines[1] == 'e 1 2'

    def test_json_to_file(self, tmp_path):
        path = str(tmp_path / 'lambda.json')
        summary = export_graph(self.space, 'json', path)
        with open(path) as fh:
            data = json.load(fh)
        assert summary['destination'] == path
        assert data['q'] == 3 and data['nu'] == 1
        assert len(data['vertices']) == 9
        assert data['vertices'][0] == {'X': [0], 'Z': [0, 0]}
        assert len(data['edges']) == 36

    def test_unknown_format(self):
        with pytest.raises(ConfigError) as excinfo:
            export_graph(self.space, 'graphml', io.StringIO())
        assert isinstance(excinfo.value, PolarSuborbitsError)
        assert 'edgelist' in str(excinfo.value)

    def test_deterministic(self):
        first, second = io.StringIO(), io.StringIO()
        export_graph(space_new(3, 2), 'edgelist', first)
        export_graph(space_new(3, 2), 'edgelist', second)
        assert first.getvalue() == second.getvalue()
