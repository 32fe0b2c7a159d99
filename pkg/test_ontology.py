#!/usr/bin/env python3
"""
Tests for ontic models, coherent-map searches and preparation contextuality.
"""

from fractions import Fraction

import pytest

from core_model import Mixture, OntologyEntry
from errors import DecompositionError, GuardExceededError, InputError, MixtureError, ParseError, SchemaError
from gdit import build_correspondence, build_gdit, symmetric_disturbance
from ontology import (
    CoherentMap,
    Found,
    Impossible,
    NoWitness,
    Witness,
    cartesian,
    compress_g,
    find_ontic_permutation,
    identity_model,
    model_from_document,
    ontic_distributions_g,
    ontic_distributions_product,
    ontic_distributions_s,
    parse_coherent_map,
    prep_contextuality_witness,
    underlying_simplex,
)

F = Fraction
Q = F(1, 4)
H = F(1, 2)


@pytest.fixture
def spekkens_s(load_theory, load_document):
    return model_from_document(load_theory('spekkens.theory'), load_document('spekkens.theory').ontology)


@pytest.fixture
def load_map(fixture_path):
    return lambda name: parse_coherent_map(fixture_path(name).read_text())


def test_underlying_simplex_order(load_theory):
    points = underlying_simplex(load_theory('spekkens.theory'))
    assert len(points) == 8
    assert points[0].name == 'lambda1' and points[0].values == (0, 0, 0)
    assert points[1].values == (0, 0, 1)
    assert points[7].name == 'lambda8' and points[7].values == (1, 1, 1)


def test_compress_g():
    assert compress_g([2, 2], [Q, Q, Q, Q]) == ((H, H), (H, H))
    assert compress_g([2, 2], [1, 0, 0, 0]) == ((1, 0), (1, 0))
    assert compress_g([2, 2], [0, H, 0, H]) == ((H, H), (0, 1))
    with pytest.raises(InputError):
        compress_g([2, 2], [1, 0, 0])
    assert cartesian(((F(1), F(0)), (Q, F(3, 4)))) == (0, F(3, 4))


def test_g_model_from_a_correspondence():
    g = build_gdit(2, 2)
    model = ontic_distributions_g(build_correspondence(g, symmetric_disturbance(g)))
    assert model.kind == 'g'
    assert model.distribution_vector('X=0') == (H, H, 0, 0)
    assert model.distribution_vector('Z=1') == (0, H, 0, H)
    assert model.verify()


def test_product_model_reproduces_every_state(load_theory):
    t = load_theory('spekkens.theory')
    model = ontic_distributions_product(t)
    assert model.ontic_points == tuple(f"lambda{k}" for k in range(1, 9))
    assert model.distribution_vector('X+') == (Q, Q, Q, Q, 0, 0, 0, 0)
    assert model.problems() == []
    assert model.intermediate_dimension() == 3
    assert model.verify()


def test_s_model_from_document(spekkens_s):
    assert spekkens_s.kind == 's'
    assert spekkens_s.ontic_points == ('gamma1', 'gamma2', 'gamma3', 'gamma4')
    assert spekkens_s.distribution('Z-') == {'gamma1': 0, 'gamma2': H, 'gamma3': H, 'gamma4': 0}
    assert spekkens_s.verify()


def test_s_model_rejects_bad_vertices_and_weights(load_theory, spekkens_s):
    t = load_theory('spekkens.theory')
    dependent = {name: t.point(name) for name in ('X+', 'X-', 'Y+', 'Y-')}
    with pytest.raises(DecompositionError):
        ontic_distributions_s(t, dependent, {})
    vertices = dict(spekkens_s.intermediate_vertices)
    with pytest.raises(DecompositionError):
        ontic_distributions_s(t, dict(list(vertices.items())[:3]), {})
    with pytest.raises(DecompositionError) as err:
        ontic_distributions_s(t, vertices, {'Z-': {'gamma2': Q, 'gamma3': Q}})
    assert "sum to 1/2" in str(err.value)


def test_identity_model(load_theory):
    model = identity_model(load_theory('classical.theory'))
    assert model.distribution('x0z1')['x0z1'] == 1
    assert model.verify()
    with pytest.raises(DecompositionError):
        identity_model(load_theory('symmetric.theory'))


def test_g_document_accepts_both_value_spellings(load_theory):
    t = load_theory('symmetric.theory')
    entry = OntologyEntry(kind='g', decompositions={
        'X+': {'00': '1/2', '01': '1/2'},
        'X-': {'1,0': '1/2', '1,1': '1/2'},
        'Z+': {'00': '1/2', '10': '1/2'},
        'Z-': {'01': '1/2', '11': '1/2'},
    })
    model = model_from_document(t, entry)
    assert model.distribution_vector('X-') == (0, 0, H, H)
    for bad in ('20', '0', 'ab'):
        with pytest.raises(ParseError):
            model_from_document(t, OntologyEntry(kind='g', decompositions={'X+': {bad: '1'}}))
    with pytest.raises(SchemaError):
        model_from_document(t, OntologyEntry(kind='s', decompositions={}))


def test_inverter_on_the_g_model(load_theory, load_map):
    model = ontic_distributions_product(load_theory('spekkens.theory'))
    target = load_map('inverter_xyz.map')
    result = find_ontic_permutation(model, target)
    assert isinstance(result, Found)
    assert result.verify(model, target)
    assert result.as_dict() == {f"lambda{k}": f"lambda{9 - k}" for k in range(1, 9)}


def test_inverter_on_the_s_model_is_impossible(spekkens_s, load_map):
    target = load_map('inverter_xyz.map')
    result = find_ontic_permutation(spekkens_s, target)
    assert isinstance(result, Impossible)
    assert result.verify(spekkens_s, target)
    assert result.signature == (0, H, 0, H, 0, H)
    assert (result.source_count, result.target_count) == (0, 1)


def test_xz_inverter_on_the_s_model_is_found(spekkens_s, load_map):
    target = load_map('inverter_xz.map')
    result = find_ontic_permutation(spekkens_s, target)
    assert isinstance(result, Found)
    assert result.as_dict() == {'gamma1': 'gamma3', 'gamma2': 'gamma4', 'gamma3': 'gamma1', 'gamma4': 'gamma2'}


def test_modified_theory_has_no_inverter(load_theory, load_map):
    model = ontic_distributions_product(load_theory('spekkens_modified.theory'))
    target = load_map('inverter_xyz.map')
    result = find_ontic_permutation(model, target)
    assert isinstance(result, Impossible)
    assert result.verify(model, target)


def test_permutation_search_guard(load_theory, load_map):
    model = ontic_distributions_product(load_theory('spekkens.theory'))
    with pytest.raises(GuardExceededError):
        find_ontic_permutation(model, load_map('inverter_xyz.map'), node_limit=3)


def test_coherent_map_documents():
    assert CoherentMap.of({'a': 'b', 'b': 'a'}).as_dict() == {'a': 'b', 'b': 'a'}
    with pytest.raises(InputError):
        CoherentMap.of({'a': 'b'})
    with pytest.raises(ParseError):
        parse_coherent_map("{oops")
    with pytest.raises(SchemaError):
        parse_coherent_map({'mapping': {}})


def test_rotated_states_witness_preparation_contextuality(load_theory):
    t = load_theory('rotated_y.theory')
    model = ontic_distributions_product(t)
    result = prep_contextuality_witness(model, Mixture.of({'Ya+': H, 'Ya-': H}), Mixture.of({'X+': H, 'X-': H}))
    assert isinstance(result, Witness)
    assert result.left == (F(37, 100), F(13, 100), F(13, 100), F(37, 100))
    assert result.right == (Q, Q, Q, Q)
    assert result.support_affinely_dependent
    signs = (1, -1, -1, 1)
    assert sum(s * w for s, w in zip(signs, result.left)) == F(12, 25)


def test_noncontextual_pairs_and_unequal_mixtures(spekkens_s):
    result = prep_contextuality_witness(spekkens_s, Mixture.of({'X+': H, 'X-': H}), Mixture.of({'Z+': H, 'Z-': H}))
    assert isinstance(result, NoWitness)
    assert result.distribution == (Q, Q, Q, Q)
    with pytest.raises(MixtureError):
        prep_contextuality_witness(spekkens_s, Mixture.of({'X+': H, 'X-': H}), Mixture.pure('Z+'))
