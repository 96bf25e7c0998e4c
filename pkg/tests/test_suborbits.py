import pytest
import sys
import os
from collections import Counter
from fractions import Fraction
import itertools

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from polarsuborbits import matspace as ms
from polarsuborbits.errors import GeometryError, LabelError
from polarsuborbits.geometry import g01_act, space_new
from polarsuborbits.lambda_graph import (
    Vertex,
    VertexTable,
    basepoint,
    enumerate_vertices,
    vertex_count,
)
from polarsuborbits.suborbits import (
    AltCanonicalForm,
    SuborbitLabel,
    all_alt_forms,
    all_labels,
    classify,
    joint_dim_profile,
    label_table,
    length_discrepancies,
    o1_canonicalize,
    o2_canonicalize,
    printed_suborbit_size,
    rank_g0,
    representative,
    suborbit_size,
    validate_label,
)

SIZES_Q3_NU2 = {
    'phi0': 1,
    'phi1(1)': 2,
    'phi2(0;a=0)': 16,
    'phi2(0;a=1)': 16,
    'phi3(1;a=0)': 32,
    'phi3(1;a=1)': 32,
    'phi4(0)': 48,
    'phi7(1;b=1)': 96,
}


class TestLabels:
    def test_str(self):
        assert str(SuborbitLabel(0)) == 'phi0'
        assert str(SuborbitLabel(2, 0, a=1)) == 'phi2(0;a=1)'
        assert str(SuborbitLabel(7, 1, b=2)) == 'phi7(1;b=2)'
        assert str(SuborbitLabel(4, 0)) == 'phi4(0)'

    @pytest.mark.parametrize('text', ['phi0', 'phi1(1)', 'phi2(0;a=1)', 'phi7(1;b=2)', 'phi8(2)'])
    def test_parse_inverts_str(self, text):
        assert str(SuborbitLabel.parse(text)) == text

    @pytest.mark.parametrize('text', ['psi1(1)', 'phi3', 'phi2(0;c=1)', ''])
    def test_parse_rejects(self, text):
        with pytest.raises(LabelError):
            SuborbitLabel.parse(text)

    def test_all_labels_q3_nu2(self):
        assert [str(L) for L in all_labels(3, 2)] == list(SIZES_Q3_NU2)

    def test_all_labels_nu1(self):
        assert [str(L) for L in all_labels(5, 1)] == ['phi0', 'phi2(0;a=0)', 'phi2(0;a=1)']

    def test_phi7_uses_omega(self):
        assert [str(L) for L in all_labels(5, 2) if L.family == 7] == ['phi7(1;b=1)', 'phi7(1;b=2)']

    @pytest.mark.parametrize('label', [
        SuborbitLabel(7, 1, b=2),
        SuborbitLabel(1, 2),
        SuborbitLabel(2, 0),
        SuborbitLabel(3, 1, a=2),
        SuborbitLabel(9, 0),
        SuborbitLabel(4, 0, b=1),
    ])
    def test_validate_rejects(self, label):
        with pytest.raises(LabelError):
            validate_label(3, 2, label)

    @pytest.mark.parametrize('q, nu, rank', [
        (3, 1, 3), (5, 1, 3), (3, 2, 8), (5, 2, 9), (7, 2, 10), (3, 3, 12), (3, 4, 18),
    ])
    def test_rank(self, q, nu, rank):
        assert rank_g0(q, nu) == rank
        assert len(all_labels(q, nu)) == rank


class TestSizes:
    def test_q3_nu2(self):
        assert {str(L): suborbit_size(3, 2, L) for L in all_labels(3, 2)} == SIZES_Q3_NU2

    @pytest.mark.parametrize('q', [3, 5, 7])
    def test_nu1(self, q):
        sizes = [suborbit_size(q, 1, L) for L in all_labels(q, 1)]
        assert sizes == [1, (q * q - 1) // 2, (q * q - 1) // 2]

    @pytest.mark.parametrize('q, nu', [(3, 2), (5, 2), (7, 2), (9, 2), (3, 3)])
    def test_sizes_sum_to_vertex_count(self, q, nu):
        assert sum(suborbit_size(q, nu, L) for L in all_labels(q, nu)) == vertex_count(q, nu)

    def test_rejects_invalid_label(self):
        with pytest.raises(LabelError):
            suborbit_size(3, 2, SuborbitLabel(5, 1))

    def test_printed_lengths_agree_at_q3_nu2(self):
        assert length_discrepancies(3, 2) == []

    def test_printed_phi4_differs_at_q5(self):
        label = SuborbitLabel(4, 0)
        assert printed_suborbit_size(5, 2, label) == Fraction(360)
        assert suborbit_size(5, 2, label) == 480
        assert {'label': 'phi4(0)', 'printed': '360', 'derived': 480} in length_discrepancies(5, 2)

    def test_printed_phi4_differs_at_nu3(self):
        label = SuborbitLabel(4, 0)
        assert printed_suborbit_size(3, 3, label) == Fraction(156)
        assert suborbit_size(3, 3, label) == 624


class TestCanonicalForms:
    def setup_method(self):
        self.spec = space_new(3, 2).field

    def test_form_names(self):
        assert str(AltCanonicalForm('zero', 0)) == 'zero'
        assert str(AltCanonicalForm('kappa', 2)) == 'kappa(2)'

    def test_form_lists(self):
        assert [str(f) for f in all_alt_forms(3, 1)] == ['zero', 'shifted(1)', 'leading(1)']
        assert [str(f) for f in all_alt_forms(4, 2)] == [
            'zero', 'shifted(1)', 'leading(1)', 'leading(2)', 'double_shifted(1)', 'kappa(2)']

    def test_form_does_not_fit(self):
        with pytest.raises(LabelError):
            AltCanonicalForm('kappa', 2).matrix(self.spec, 3)

    @pytest.mark.parametrize('nu', [2, 3, 4])
    def test_canonical_forms_are_fixed(self, nu):
        for i, canonicalize in ((1, o1_canonicalize), (2, o2_canonicalize)):
            for form in all_alt_forms(nu, i):
                T, found = canonicalize(self.spec, form.matrix(self.spec, nu))
                assert found == form

    @pytest.mark.parametrize('q, nu', [(3, 2), (3, 3), (5, 3)])
    def test_every_alternate_matrix(self, q, nu):
        spec = space_new(q, nu).field
        m = nu * (nu - 1) // 2
        for upper in itertools.product(range(q), repeat=m):
            X = ms.alternate_from_upper(spec, nu, list(upper))
            for i, canonicalize in ((1, o1_canonicalize), (2, o2_canonicalize)):
                T, form = canonicalize(spec, X)
                assert ms.rank(T) == nu
                assert ms.is_zero(T[0:i, i:])
                assert ms.equal(T.T @ X @ T, form.matrix(spec, nu))

    def test_o2_needs_nu2(self):
        with pytest.raises(GeometryError):
            o2_canonicalize(self.spec, ms.zeros(self.spec, 1, 1))


class TestRepresentatives:
    def test_phi0_is_basepoint(self):
        space = space_new(3, 2)
        assert representative(space, SuborbitLabel(0)) == basepoint(space)

    def test_phi1_representative(self):
        space = space_new(3, 2)
        v = representative(space, SuborbitLabel(1, 1))
        assert v.to_json() == {'X': [0, 1, 2, 0], 'Z': [0, 0, 0, 0]}

    def test_phi7_representative(self):
        space = space_new(3, 2)
        v = representative(space, SuborbitLabel(7, 1, b=1))
        assert v.to_json() == {'X': [0, 1, 2, 0], 'Z': [1, 0, 0, 1]}

    def test_requires_delta_2(self):
        with pytest.raises(GeometryError):
            representative(space_new(3, 2, delta=1), SuborbitLabel(0))

    def test_joint_dims(self):
        profile = joint_dim_profile(space_new(3, 2))
        assert profile['phi0'] == 2
        assert profile['phi1(1)'] == 4
        assert all(2 <= d <= 4 for d in profile.values())


class TestClassify:
    @pytest.mark.parametrize('q, nu', [(3, 1), (3, 2), (5, 2), (7, 2), (3, 3), (5, 3), (3, 4)])
    def test_classifies_every_representative(self, q, nu):
        space = space_new(q, nu)
        for L in all_labels(q, nu):
            rep = representative(space, L)
            label, witness = classify(space, rep)
            assert label == L
            assert g01_act(witness, rep) == rep

    def test_examples(self):
        space = space_new(3, 2)
        A2 = Vertex.from_json(space, {'X': [0, 1, 2, 0], 'Z': [0, 0, 0, 0]})
        assert str(classify(space, A2)[0]) == 'phi1(1)'
        e2 = Vertex.from_json(space, {'X': [0, 0, 0, 0], 'Z': [0, 0, 1, 0]})
        assert str(classify(space, e2)[0]) == 'phi2(0;a=0)'

    def test_sound_on_every_vertex_q3_nu2(self):
        space = space_new(3, 2)
        counts = Counter()
        for v in enumerate_vertices(space):
            label, witness = classify(space, v)
            assert g01_act(witness, representative(space, label)) == v
            counts[str(label)] += 1
        assert dict(counts) == SIZES_Q3_NU2

    @pytest.mark.slow
    def test_counts_match_sizes_q5_nu2(self):
        space = space_new(5, 2)
        labels = label_table(space, VertexTable(space), threads=4)
        counts = Counter(labels)
        assert {L: counts[L] for L in all_labels(5, 2)} == {L: suborbit_size(5, 2, L) for L in all_labels(5, 2)}

    def test_requires_delta_2(self):
        space = space_new(3, 2, delta=1)
        with pytest.raises(GeometryError):
            classify(space, basepoint(space))


class TestLabelTable:
    def test_threads_do_not_change_result(self):
        space = space_new(3, 2)
        table = VertexTable(space)
        assert label_table(space, table, threads=1) == label_table(space, table, threads=3)

    def test_first_entry_is_phi0(self):
        space = space_new(3, 1)
        labels = label_table(space, VertexTable(space))
        assert labels[0] == SuborbitLabel(0)
        assert Counter(labels)[SuborbitLabel(2, 0, a=1)] == 4
