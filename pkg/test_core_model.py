#!/usr/bin/env python3
"""
Tests for theories, mixtures and the theory file format.
"""

import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from core_model import (
    Measurement,
    Mixture,
    PureState,
    Theory,
    dump_document,
    eigenstates_of,
    format_point,
    format_rational,
    is_regular,
    mix,
    parse_rational,
    parse_theory,
    random_regular_theory,
    serialize_theory,
    theory_points,
    tomographic_dimension,
    uniform_outcome_count,
    unflatten,
    validate_theory,
)
from errors import MixtureError, NonUniformOutcomesError, ParseError, SchemaError, UnknownReferenceError

F = Fraction


@st.composite
def distributions(draw, n):
    raw = draw(st.lists(st.integers(min_value=0, max_value=12), min_size=n, max_size=n))
    if sum(raw) == 0:
        raw[0] = 1
    total = sum(raw)
    return tuple(F(r, total) for r in raw)


@st.composite
def theories(draw):
    m = draw(st.integers(min_value=1, max_value=3))
    n = draw(st.integers(min_value=2, max_value=3))
    k = draw(st.integers(min_value=1, max_value=5))
    measurements = tuple(Measurement(f"M{j}", n) for j in range(m))
    states = tuple(PureState(f"s{i}", tuple(draw(distributions(n)) for _ in range(m))) for i in range(k))
    return Theory(measurements, states)


@st.composite
def mixtures_over(draw, names):
    raw = draw(st.lists(st.integers(min_value=0, max_value=9), min_size=len(names), max_size=len(names)))
    if sum(raw) == 0:
        raw[0] = 1
    return Mixture(tuple((name, F(r, sum(raw))) for name, r in zip(names, raw)))


def test_parse_and_format_rational():
    """Rationals round-trip through their canonical text."""
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational(" -2 / 6 ") == F(-1, 3)
    assert parse_rational(5) == F(5)
    assert format_rational(F(6, 8)) == "3/4"
    assert format_rational(F(4, 2)) == "2"
    for bad in ("1/0", "half", "1.5", ""):
        with pytest.raises(ParseError):
            parse_rational(bad)


def test_mixture_normalizes_and_rejects_bad_weights():
    m = Mixture((("b", F(1, 2)), ("a", F(1, 4)), ("a", F(1, 4)), ("c", F(0))))
    assert m.weights == (("a", F(1, 2)), ("b", F(1, 2)))
    assert m.support() == ("a", "b")
    with pytest.raises(MixtureError):
        Mixture((("a", F(1, 2)),))
    with pytest.raises(MixtureError):
        Mixture((("a", F(3, 2)), ("b", F(-1, 2))))


def test_symmetric_mixtures_coincide(load_theory):
    """Equal mixtures of X and Z eigenstates give the same point."""
    t = load_theory('symmetric.theory')
    left = mix(t, Mixture.of({'X+': '1/2', 'X-': '1/2'}))
    right = mix(t, Mixture.of({'Z+': '1/2', 'Z-': '1/2'}))
    assert left == right == ((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2)))
    assert format_point(left) == "(1/2,1/2 | 1/2,1/2)"


def test_mix_of_a_pure_state_is_the_state(load_theory):
    t = load_theory('classical.theory')
    assert mix(t, Mixture.pure('x1z1')) == t.state('x1z1').dists
    with pytest.raises(MixtureError):
        mix(t, Mixture((('x0z0', F(1, 2)),)))


def test_fixture_theories_are_valid_and_regular(load_theory):
    for name in ('classical.theory', 'symmetric.theory', 'biased.theory', 'skewed.theory', 'spekkens.theory'):
        t = load_theory(name)
        assert validate_theory(t).valid, name
        assert is_regular(t), name
    gdit = load_theory('gdit22.theory')
    assert validate_theory(gdit).valid
    assert not is_regular(gdit)


def test_validation_reports_every_violation():
    t = Theory(
        (Measurement('X', 2), Measurement('Z', 2)),
        (PureState('a', ((F(1, 2), F(1, 3)), (F(1), F(0)))),
         PureState('b', ((F(1), F(0)), (F(1, 2), F(1, 2))))),
        ((('Z', 0), 'b'),),
    )
    report = validate_theory(t)
    assert not report.valid
    assert any("sums to 5/6" in v for v in report.violations)
    assert any("not an eigenstate of Z=0" in v for v in report.violations)


def test_dimension_and_outcome_counts(load_theory):
    assert tomographic_dimension(load_theory('symmetric.theory')) == 2
    assert tomographic_dimension(load_theory('spekkens.theory')) == 3
    assert uniform_outcome_count(load_theory('spekkens.theory')) == 2
    mixed = Theory((Measurement('A', 2), Measurement('B', 3)), ())
    with pytest.raises(NonUniformOutcomesError):
        uniform_outcome_count(mixed)


def test_eigenstates_of(load_theory):
    t = load_theory('classical.theory')
    assert eigenstates_of(t, 'X', 0) == ['x0z0', 'x0z1']
    assert eigenstates_of(t, 'Z') == ['x0z0', 'x0z1', 'x1z0', 'x1z1']
    with pytest.raises(UnknownReferenceError):
        eigenstates_of(t, 'Y')


def test_unflatten_inverts_theory_points(load_theory):
    t = load_theory('spekkens.theory')
    for name, vector in theory_points(t).items():
        assert unflatten(t, vector) == t.point(name)


def test_document_errors():
    good = {
        'measurements': [{'name': 'X', 'outcomes': 2}],
        'pure_states': [{'name': 'a', 'dists': [['1', '0']]}],
    }
    assert parse_theory(good).state_names == ('a',)
    with pytest.raises(ParseError):
        parse_theory("{not json")
    with pytest.raises(SchemaError):
        parse_theory(dict(good, colour='blue'))
    with pytest.raises(SchemaError):
        parse_theory(dict(good, pure_states=good['pure_states'] * 2))
    with pytest.raises(UnknownReferenceError):
        parse_theory(dict(good, eigenstates=[{'measurement': 'Q', 'outcome': 0, 'state': 'a'}]))
    with pytest.raises(ParseError):
        parse_theory(dict(good, pure_states=[{'name': 'a', 'dists': [['1/0', '0']]}]))


def test_serialized_document_is_canonical(load_theory):
    t = load_theory('biased.theory')
    text = dump_document(serialize_theory(t))
    assert text == dump_document(json.loads(text))
    assert parse_theory(text) == t


@given(theories())
@settings(max_examples=50, deadline=None)
def test_serialization_round_trip(t):
    assert parse_theory(dump_document(serialize_theory(t))) == t


@given(st.data())
@settings(max_examples=50, deadline=None)
def test_mix_is_affine(data):
    """mix(α·a + (1-α)·b) = α·mix(a) + (1-α)·mix(b)."""
    t = data.draw(theories())
    names = list(t.state_names)
    a = data.draw(mixtures_over(names))
    b = data.draw(mixtures_over(names))
    alpha = F(data.draw(st.integers(min_value=0, max_value=10)), 10)
    combined = mix(t, a.combine(b, alpha))
    pa, pb = mix(t, a), mix(t, b)
    expected = tuple(tuple(alpha * x + (1 - alpha) * y for x, y in zip(da, db)) for da, db in zip(pa, pb))
    assert combined == expected


def test_random_regular_theories_are_regular():
    rng = random.Random(7)
    for m in (1, 2, 3):
        for n in (2, 3):
            t = random_regular_theory(m, n, rng)
            assert is_regular(t)
            assert len(t.pure_states) == m * n
            assert validate_theory(t).valid
