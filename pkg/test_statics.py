#!/usr/bin/env python3
"""
Tests for uncertainty, distinguishability, disturbance consistency and
clone tomography.
"""

from fractions import Fraction

import pytest
import sympy

from core_model import Measurement, Mixture, PureState, Theory
from errors import IncompleteRulesError, InputError
from statics import (
    DisturbanceRule,
    TomographyPlan,
    check_disturbance_consistency,
    chernoff_trials,
    collapse_rules,
    deviation_event,
    jointly_distinguishable,
    measurement_dimension_bound,
    rules_from_document,
    simulate_clone_tomography,
    state_uncertainty,
    uncertainty,
    uncertainty_report,
)

F = Fraction


@pytest.mark.parametrize('name,expected', [
    ('classical.theory', F(0)),
    ('symmetric.theory', F(1, 4)),
    ('biased.theory', F(1, 8)),
    ('spekkens.theory', F(1, 3)),
    ('gdit22.theory', F(0)),
    ('polya.theory', F(1, 6)),
])
def test_uncertainty_values(load_theory, name, expected):
    assert uncertainty(load_theory(name)) == expected


def test_uncertainty_report_includes_the_polytope_value(load_theory):
    report = uncertainty_report(load_theory('symmetric.theory'))
    assert report.vertex_value == F(1, 4)
    assert report.maximizing_states == ('X+', 'X-', 'Z+', 'Z-')
    assert report.polytope_value == F(1, 2)

    polya = uncertainty_report(load_theory('polya.theory'))
    assert polya.maximizing_states == ('psi2', 'psi3')
    assert polya.polytope_value >= polya.vertex_value


def test_uncertainty_ignores_labels_and_order(load_theory):
    t = load_theory('biased.theory')
    swapped = Theory(
        (Measurement('Z', 2), Measurement('X', 2)),
        tuple(PureState(s.name, (s.dists[1][::-1], s.dists[0])) for s in t.pure_states),
    )
    assert uncertainty(swapped) == uncertainty(t)


def test_uncertainty_needs_two_measurements():
    single = Theory((Measurement('X', 2),), (PureState('a', ((F(1), F(0)),)),))
    with pytest.raises(InputError):
        uncertainty(single)
    assert state_uncertainty(((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2)))) == F(1, 2)


def test_distinguishability(load_theory):
    assert jointly_distinguishable(load_theory('classical.theory'), ['X', 'Z'])
    assert not jointly_distinguishable(load_theory('symmetric.theory'), ['X', 'Z'])
    assert not jointly_distinguishable(load_theory('gdit22.theory'), ['X', 'Z'])
    assert measurement_dimension_bound(load_theory('symmetric.theory')) == 3
    assert measurement_dimension_bound(load_theory('classical.theory')) == 4
    assert measurement_dimension_bound(load_theory('spekkens.theory')) == 4


def test_document_rules_are_consistent(load_theory, load_document):
    t = load_theory('biased.theory')
    doc = load_document('biased.theory')
    report = check_disturbance_consistency(t, rules_from_document(t, doc.disturbance))
    assert report.consistent
    assert len(report.conditions) == 1
    assert report.repeatability == []


@pytest.mark.parametrize('name', ['symmetric.theory', 'biased.theory', 'skewed.theory'])
def test_collapse_rules_are_consistent(load_theory, name):
    t = load_theory(name)
    report = check_disturbance_consistency(t, collapse_rules(t))
    assert report.consistent, [v.describe() for v in report.violations]


def test_gdit_document_rules_are_consistent(load_theory, load_document):
    t = load_theory('gdit22.theory')
    rules = rules_from_document(t, load_document('gdit22.theory').disturbance)
    assert [r.measurement for r in rules] == ['X', 'Z']
    assert check_disturbance_consistency(t, rules).consistent


def test_undisturbing_rules_separate_equal_mixtures(load_theory):
    """Leaving every state untouched breaks the ½X+½X- = ½Z+½Z- condition."""
    t = load_theory('symmetric.theory')
    keep = tuple((name, Mixture.pure(name)) for name in t.state_names)
    rules = [DisturbanceRule('X', keep), DisturbanceRule('Z', keep)]
    report = check_disturbance_consistency(t, rules)
    assert not report.consistent
    first = report.violations[0]
    assert first.measurement == 'X'
    assert first.left != first.right
    assert any(r.state == 'Z+' and r.measurement == 'X' for r in report.repeatability)


def test_missing_rules_raise(load_theory):
    t = load_theory('symmetric.theory')
    only_x = [r for r in collapse_rules(t) if r.measurement == 'X']
    with pytest.raises(IncompleteRulesError):
        check_disturbance_consistency(t, only_x)


@pytest.mark.parametrize('epsilon,delta,n,expected', [
    (F(1, 2), F(1, 10), 2, 72),
    (1, '2/E', 3, 9),
    (F(1, 2), '2/E', 2, 24),
])
def test_chernoff_trials(epsilon, delta, n, expected):
    assert chernoff_trials(epsilon, delta, n) == expected


def test_chernoff_accepts_sympy_and_rejects_bad_bounds():
    assert chernoff_trials(sympy.Rational(1, 2), 2 / sympy.E, 2) == 24
    for bad in ((0, F(1, 10), 2), (F(1, 2), 1, 2), (F(1, 2), F(1, 10), 1), ('x', F(1, 10), 2)):
        with pytest.raises(InputError):
            chernoff_trials(*bad)


def test_deviation_event_needs_every_component():
    means = (F(1, 2), F(1, 2))
    assert deviation_event((F(1, 4), F(3, 4)), means, F(1, 2))
    assert not deviation_event((F(1, 2), F(1, 2)), means, F(1, 2))


def test_tomography_is_seeded(load_theory):
    t = load_theory('symmetric.theory')
    plan = TomographyPlan.for_bounds(F(1, 2), F(1, 10), 2)
    assert plan.trials == 72
    first = simulate_clone_tomography(t, 'Z+', plan, seed=11)
    again = simulate_clone_tomography(t, 'Z+', plan, seed=11)
    assert first == again
    assert first.estimate()[1] == (F(1), F(0))
    assert all(sum(freq) == 1 for freq in first.frequencies)


def test_tomography_failure_rate_respects_delta(load_theory):
    t = load_theory('symmetric.theory')
    plan = TomographyPlan.for_bounds(F(1, 2), F(1, 10), 2)
    failures = sum(simulate_clone_tomography(t, 'X+', plan, seed=s).failed for s in range(1000))
    assert failures <= 128


def test_tomography_plan_validation():
    with pytest.raises(InputError):
        TomographyPlan(F(0), F(1, 10), 2, 10)
    with pytest.raises(InputError):
        TomographyPlan(F(1, 2), F(1, 10), 2, 0)
