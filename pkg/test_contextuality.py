#!/usr/bin/env python3
"""
Tests for congruence graphs, joint distributions, OS/XOS scores and
contextual boxes.
"""

import random
from fractions import Fraction
from itertools import islice

import pytest

from contextuality import (
    Behavior,
    CongruenceGraph,
    Exists,
    IntransitivityWitness,
    NoJD,
    Partition,
    behavior_uncertainty,
    configuration_of,
    congruence_classes,
    congruence_graph,
    conditional_jd_2x2,
    contextual_box,
    contextual_dimension_report,
    count_contextual_configurations,
    enumerate_contextual_configurations,
    gleason_nosignaling_check,
    iter_contextual_configurations,
    jd_feasible,
    noncontextual_configurations,
    os_value,
    parse_behavior,
    product_jd,
    serialize_behavior,
    shift_orbit,
    two_by_two_graph,
    uniform_mixture,
    xos_score_triple,
    xos_triples,
    xos_value,
)
from errors import (
    GuardExceededError,
    InputError,
    IntransitiveError,
    MarginalMismatchError,
    MissingContextError,
    ParseError,
    PartnerMismatchError,
    SchemaError,
    UnknownReferenceError,
    ValidationError,
    ZeroDenominatorError,
)

F = Fraction
H = F(1, 2)

OS_CONTEXTS = [('A', 'B'), ('B', 'C'), ('C', 'A')]
OS_COUNTS = {'A': 2, 'B': 2, 'C': 2}
XOS_COUNTS = {'X': 3, 'Y': 3, 'Z': 3, 'W': 3}


def _random_distribution(rng, size):
    raw = [rng.randint(1, 9) for _ in range(size)]
    return [F(r, sum(raw)) for r in raw]


def _random_consistent_triple(rng):
    """Contexts {A1,B1,B2}, {A2,B1,B2} and {B1,B2} sharing a positive B marginal."""
    shared = dict(zip([(0, 0), (0, 1), (1, 0), (1, 1)], _random_distribution(rng, 4)))
    first, second = {}, {}
    for o, p in shared.items():
        q1 = _random_distribution(rng, 2)
        q2 = _random_distribution(rng, 2)
        for x in range(2):
            first[(x,) + o] = p * q1[x]
            second[(x,) + o] = p * q2[x]
    counts = {'A1': 2, 'A2': 2, 'B1': 2, 'B2': 2}
    return Behavior.of(counts, {('A1', 'B1', 'B2'): first, ('A2', 'B1', 'B2'): second, ('B1', 'B2'): shared})


def test_two_by_two_graph_is_intransitive():
    g = two_by_two_graph()
    result = congruence_classes(g)
    assert result == IntransitivityWitness('A1', 'B1', 'A2')
    assert result.verify(g)


def test_complete_and_edgeless_graphs():
    names = ('A', 'B', 'C')
    complete = CongruenceGraph(names, (('A', 'B'), ('C', 'B'), ('A', 'C')))
    assert complete.edges == (('A', 'B'), ('A', 'C'), ('B', 'C'))
    assert congruence_classes(complete) == Partition((('A', 'B', 'C'),))
    assert congruence_classes(CongruenceGraph(names, ())) == Partition((('A',), ('B',), ('C',)))
    with pytest.raises(InputError):
        CongruenceGraph(names, (('A', 'A'),))
    with pytest.raises(UnknownReferenceError):
        CongruenceGraph(names, (('A', 'D'),))


def test_congruence_graph_of_theories(load_theory):
    classical = congruence_graph(load_theory('classical.theory'))
    assert congruence_classes(classical) == Partition((('X', 'Z', 'P'),))
    quantum_like = congruence_graph(load_theory('symmetric.theory'))
    assert quantum_like.edges == ()
    assert congruence_classes(quantum_like) == Partition((('X',), ('Z',)))


def test_product_jd_of_separable_marginals():
    partition = Partition((('X',), ('Z',)))
    joint = product_jd(partition, {('X',): {(0,): 1}, ('Z',): {(0,): H, (1,): H}}, {'X': 2, 'Z': 2})
    assert joint.distribution(('X', 'Z')) == {(0, 0): H, (0, 1): H, (1, 0): 0, (1, 1): 0}
    assert isinstance(jd_feasible(joint), Exists)
    with pytest.raises(IntransitiveError):
        product_jd(IntransitivityWitness('A1', 'B1', 'A2'), {}, {})
    with pytest.raises(MissingContextError):
        product_jd(partition, {('X',): {(0,): 1}}, {'X': 2, 'Z': 2})


def test_conditional_jd_reproduces_random_inputs():
    rng = random.Random(77)
    for _ in range(100):
        b = _random_consistent_triple(rng)
        joint = conditional_jd_2x2(b)
        context = ('A1', 'A2', 'B1', 'B2')
        for names in (('A1', 'B1', 'B2'), ('A2', 'B1', 'B2'), ('B1', 'B2')):
            assert joint.marginal(context, names) == b.distribution(names)


def test_conditional_jd_output_has_a_joint_distribution():
    b = _random_consistent_triple(random.Random(3))
    result = jd_feasible(conditional_jd_2x2(b))
    assert isinstance(result, Exists)
    assert result.verify(conditional_jd_2x2(b))
    assert isinstance(jd_feasible(b), Exists)


def test_conditional_jd_errors():
    counts = {'A1': 2, 'A2': 2, 'B1': 2, 'B2': 2}
    uniform3 = {o: F(1, 8) for o in [(x, y, z) for x in range(2) for y in range(2) for z in range(2)]}
    skewed = {(0, 0): H, (1, 1): H}
    mismatched = Behavior.of(counts, {('A1', 'B1', 'B2'): uniform3, ('A2', 'B1', 'B2'): uniform3,
                                      ('B1', 'B2'): skewed})
    with pytest.raises(MarginalMismatchError):
        conditional_jd_2x2(mismatched)
    sparse3 = {(x, 0, 0): F(1, 4) for x in range(2)}
    sparse3.update({(x, 1, 1): F(1, 4) for x in range(2)})
    zero = Behavior.of(counts, {('A1', 'B1', 'B2'): sparse3, ('A2', 'B1', 'B2'): sparse3, ('B1', 'B2'): skewed})
    with pytest.raises(ZeroDenominatorError):
        conditional_jd_2x2(zero)


@pytest.mark.parametrize('name', ['os_box_QA.behavior', 'xos_box.behavior'])
def test_contextual_boxes_have_no_joint_distribution(load_behavior, name):
    b = load_behavior(name)
    result = jd_feasible(b)
    assert isinstance(result, NoJD)
    assert result.verify(b)


def test_product_behavior_has_a_joint_distribution(load_behavior):
    b = load_behavior('os_product.behavior')
    result = jd_feasible(b)
    assert isinstance(result, Exists)
    assert result.verify(b)
    with pytest.raises(GuardExceededError):
        jd_feasible(b, limit=4)


def test_os_values(load_behavior):
    assert os_value(load_behavior('os_gdit_QA2.behavior')) == -3
    assert os_value(load_behavior('os_box_QA.behavior')) == -3
    assert os_value(load_behavior('os_product.behavior')) == 0
    agree = Behavior.of(OS_COUNTS, {c: {(0, 0): 1} for c in OS_CONTEXTS})
    assert os_value(agree) == 3


def test_os_noncontextual_bounds():
    values = [os_value(c.behavior(OS_COUNTS)) for c in noncontextual_configurations(OS_CONTEXTS, OS_COUNTS)]
    assert len(values) == 8
    assert (min(values), max(values)) == (-1, 3)


def test_os_needs_binary_outcomes():
    counts = {'A': 3, 'B': 2, 'C': 2}
    b = Behavior.of(counts, {c: {(0, 0): 1} for c in OS_CONTEXTS})
    with pytest.raises(InputError):
        os_value(b)


def test_xos_scores():
    assert xos_score_triple(0, 1, 2) == 1
    assert xos_score_triple(2, 0, 1) == 1
    assert xos_score_triple(0, 1, 1) == 0
    assert xos_score_triple(1, 1, 1) == 0
    with pytest.raises(InputError):
        xos_score_triple(0, 1, 3)
    assert xos_triples() == [('X', 'Y', 'Z'), ('Y', 'Z', 'W'), ('Z', 'W', 'X'), ('W', 'X', 'Y')]


def test_xos_values(load_behavior):
    assert xos_value(load_behavior('xos_gdit_R1.behavior')) == 4
    assert xos_value(load_behavior('xos_box.behavior')) == 4
    constant = Behavior.of(XOS_COUNTS, {c: {(1, 1, 1): 1} for c in xos_triples()})
    assert xos_value(constant) == 0


def test_xos_noncontextual_bound():
    best = max(xos_value(c.behavior(XOS_COUNTS)) for c in noncontextual_configurations(xos_triples(), XOS_COUNTS))
    assert best == 2


def test_configuration_counts():
    assert count_contextual_configurations(OS_CONTEXTS, OS_COUNTS) == 64
    configs = enumerate_contextual_configurations(OS_CONTEXTS, OS_COUNTS)
    assert len(configs) == 64
    assert sum(c.noncontextual for c in configs) == 8
    assert len(enumerate_contextual_configurations([('A',)], {'A': 2})) == 2

    assert count_contextual_configurations(xos_triples(), XOS_COUNTS) == 27 ** 4
    first = list(islice(iter_contextual_configurations(xos_triples(), XOS_COUNTS), 3))
    assert [c.describe() for c in first] == ['000 000 000 000', '000 000 000 001', '000 000 000 002']
    with pytest.raises(GuardExceededError):
        enumerate_contextual_configurations(xos_triples(), XOS_COUNTS, limit=1000)


def test_gleason_check(load_behavior):
    gdit = load_behavior('os_gdit_QA2.behavior')
    report = gleason_nosignaling_check(gdit)
    assert not report.no_signaling
    assert report.violations[0].describe() == "A: (0,1) in A,B vs (1,0) in C,A"
    assert gleason_nosignaling_check(load_behavior('os_box_QA.behavior')).no_signaling
    assert gleason_nosignaling_check(load_behavior('os_product.behavior')).no_signaling
    assert not gleason_nosignaling_check(load_behavior('xos_gdit_R1.behavior')).no_signaling


def test_os_box_from_its_gdit(load_behavior):
    g1 = configuration_of(load_behavior('os_gdit_QA2.behavior'))
    assert g1.describe() == "10 01 10"
    assert not g1.noncontextual
    box = contextual_box(g1, shift_orbit(g1, 2), OS_COUNTS)
    assert box == load_behavior('os_box_QA.behavior')
    assert gleason_nosignaling_check(box).no_signaling
    assert os_value(box) == -3
    assert behavior_uncertainty(box) == H
    assert configuration_of(box) is None


def test_xos_box_from_its_gdit(load_behavior):
    r1 = configuration_of(load_behavior('xos_gdit_R1.behavior'))
    partners = [r1.shift(2, 3), r1.shift(1, 3)]
    box = contextual_box(r1, partners, XOS_COUNTS)
    assert box == load_behavior('xos_box.behavior')
    assert gleason_nosignaling_check(box).no_signaling
    assert xos_value(box) == 4


def test_box_partner_mismatch(load_behavior):
    g1 = configuration_of(load_behavior('os_gdit_QA2.behavior'))
    with pytest.raises(PartnerMismatchError):
        contextual_box(g1, [g1], OS_COUNTS)


def test_mixing_a_configuration_with_itself(load_behavior):
    gdit = load_behavior('os_gdit_QA2.behavior')
    g1 = configuration_of(gdit)
    assert uniform_mixture([g1, g1], OS_COUNTS) == gdit
    with pytest.raises(InputError):
        uniform_mixture([], OS_COUNTS)
    with pytest.raises(MarginalMismatchError):
        behavior_uncertainty(gdit)


def test_dimension_reports():
    two = contextual_dimension_report(2)
    assert (two.contextual_dimension, two.generalized_dimension,
            two.plus_dimension, two.state_dimension) == (9, 3, 6, 3)
    three = contextual_dimension_report(3)
    assert (three.contextual_dimension, three.generalized_dimension,
            three.plus_dimension, three.state_dimension) == (24, 6, 18, 6)
    assert three.reduction == 3
    with pytest.raises(InputError):
        contextual_dimension_report(1)


def test_behavior_access(load_behavior):
    box = load_behavior('os_box_QA.behavior')
    assert box.measurements == ('A', 'B', 'C')
    assert box.distribution(('A', 'C')) == {(0, 0): 0, (0, 1): H, (1, 0): H, (1, 1): 0}
    assert box.find_context(('A', 'C')) == ('C', 'A')
    with pytest.raises(MissingContextError):
        box.distribution(('A', 'B', 'C'))
    assert parse_behavior(serialize_behavior(box)) == box


def test_behavior_document_errors():
    good = {'contexts': [['A', 'B']], 'stats': {'A,B': {'00': '1/2', '11': '1/2'}}}
    assert parse_behavior(good).outcome_count('A') == 2
    with pytest.raises(ParseError):
        parse_behavior("{nope")
    with pytest.raises(SchemaError):
        parse_behavior(dict(good, extra=1))
    with pytest.raises(MissingContextError):
        parse_behavior(dict(good, stats={}))
    with pytest.raises(UnknownReferenceError):
        parse_behavior(dict(good, stats=dict(good['stats'], **{'B,C': {'00': '1'}})))
    with pytest.raises(ValidationError) as err:
        parse_behavior(dict(good, stats={'A,B': {'00': '1/2'}}))
    assert "sums to 1/2" in str(err.value)
    with pytest.raises(ValidationError):
        parse_behavior(dict(good, stats={'A,B': {'02': '1'}}))
