#!/usr/bin/env python3
"""
State-independent analyses of a theory: measurement uncertainty, joint
distinguishability, consistency of disturbance rules, and clone
tomography with Chernoff sample sizes.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from comeasure import associated_states
from core_model import (
    DisturbanceEntry,
    Mixture,
    Point,
    Theory,
    format_point,
    parse_rational,
    theory_points,
    tomographic_dimension,
)
from errors import IncompleteRulesError, InputError, NotRegularError
from exact_geometry import AffineDependency, ConstraintBuilder, is_simplex, maximize, nonsimpliciality_conditions

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Uncertainty
# ---------------------------------------------------------------------------

def state_uncertainty(point: Point) -> Fraction:
    """1 minus the best achievable average of per-measurement outcome probabilities."""
    best = sum((max(dist) for dist in point), Fraction(0)) / len(point)
    return 1 - best


def uncertainty(t: Theory) -> Fraction:
    """Largest uncertainty over the pure states of the theory."""
    if len(t.measurements) < 2:
        raise InputError("Uncertainty needs at least two measurements")
    return max(state_uncertainty(s.dists) for s in t.pure_states)


def uncertainty_system(t: Theory, states: Optional[Sequence[str]] = None):
    """
    LP whose maximum of ``u`` is the uncertainty over the convex hull of
    ``states`` (all pure states by default): u <= 1 - average probability of
    every outcome tuple.
    """
    if len(t.measurements) < 2:
        raise InputError("Uncertainty needs at least two measurements")
    names = list(states) if states is not None else list(t.state_names)
    m = len(t.measurements)
    builder = ConstraintBuilder()
    for name in names:
        builder.add_variable(f"w[{name}]", nonnegative=True)
    builder.add_variable('u')
    builder.add_equality({f"w[{name}]": 1 for name in names}, 1)
    for outcomes in product(*(range(meas.outcome_count) for meas in t.measurements)):
        terms: Dict[str, Fraction] = {'u': Fraction(1)}
        for name in names:
            dists = t.point(name)
            weight = sum((dists[j][a] for j, a in enumerate(outcomes)), Fraction(0)) / m
            terms[f"w[{name}]"] = weight
        builder.add_upper_bound(terms, 1)
    return builder.build()


@dataclass(frozen=True)
class UncertaintyReport:
    """Vertex uncertainty plus the (larger or equal) value over the whole state space."""
    vertex_value: Fraction
    maximizing_states: Tuple[str, ...]
    polytope_value: Fraction


def uncertainty_report(t: Theory) -> UncertaintyReport:
    value = uncertainty(t)
    argmax = tuple(s.name for s in t.pure_states if state_uncertainty(s.dists) == value)
    polytope = maximize(uncertainty_system(t), {'u': 1}).value
    return UncertaintyReport(value, argmax, polytope)


# ---------------------------------------------------------------------------
# Distinguishability
# ---------------------------------------------------------------------------

def jointly_distinguishable(t: Theory, meas_subset: Sequence[str]) -> bool:
    """True iff the associated eigenstates of the subset form a simplex."""
    states = associated_states(t, meas_subset)
    return is_simplex(list(theory_points(t, states).values()))


def measurement_dimension_bound(t: Theory) -> int:
    """Upper bound D+1 on the number of jointly distinguishable pure states."""
    return tomographic_dimension(t) + 1


# ---------------------------------------------------------------------------
# Disturbance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DisturbanceRule:
    """
    Post-measurement states for one measurement: an outcome-independent image
    per pure state, or per (state, outcome) images.
    """
    measurement: str
    images: Tuple[Tuple[str, Mixture], ...] = ()
    outcome_images: Tuple[Tuple[Tuple[str, int], Mixture], ...] = ()

    def image(self, state: str, outcome: int) -> Optional[Mixture]:
        for (name, a), mixture in self.outcome_images:
            if name == state and a == outcome:
                return mixture
        for name, mixture in self.images:
            if name == state:
                return mixture
        return None


def rules_from_document(t: Theory, entries: Sequence[DisturbanceEntry]) -> List[DisturbanceRule]:
    """Group disturbance entries of a theory file into one rule per measurement."""
    grouped: Dict[str, Tuple[list, list]] = {}
    for entry in entries:
        t.measurement_index(entry.measurement)
        t.state(entry.state)
        image = Mixture.of({name: parse_rational(w) for name, w in entry.image.items()})
        for name in image.support():
            t.state(name)
        independent, conditioned = grouped.setdefault(entry.measurement, ([], []))
        if entry.outcome is None:
            independent.append((entry.state, image))
        else:
            conditioned.append(((entry.state, entry.outcome), image))
    return [DisturbanceRule(name, tuple(independent), tuple(conditioned))
            for name, (independent, conditioned) in sorted(grouped.items(), key=lambda kv: t.measurement_index(kv[0]))]


def collapse_rules(t: Theory) -> List[DisturbanceRule]:
    """Outcome a of A sends every state to the A=a eigenstate."""
    eigen = t.eigenstates
    rules = []
    for j, meas in enumerate(t.measurements):
        images = []
        for s in t.pure_states:
            for a, p in enumerate(s.dists[j]):
                if p == 0:
                    continue
                if (meas.name, a) not in eigen:
                    raise NotRegularError(f"No eigenstate for {meas.name}={a}")
                images.append(((s.name, a), Mixture.pure(eigen[(meas.name, a)])))
        rules.append(DisturbanceRule(meas.name, (), tuple(images)))
    return rules


def _rule_table(t: Theory, rules: Sequence[DisturbanceRule]) -> Dict[str, DisturbanceRule]:
    table = {}
    for rule in rules:
        t.measurement_index(rule.measurement)
        table[rule.measurement] = rule
    missing = []
    for j, meas in enumerate(t.measurements):
        rule = table.get(meas.name)
        for s in t.pure_states:
            for a, p in enumerate(s.dists[j]):
                if p != 0 and (rule is None or rule.image(s.name, a) is None):
                    missing.append(f"{meas.name}:{s.name}->{a}")
    if missing:
        raise IncompleteRulesError(f"Disturbance rules missing for {', '.join(missing[:10])}"
                                   + (" ..." if len(missing) > 10 else ""))
    return table


def apply_rule(t: Theory, rule: DisturbanceRule, mixture: Mixture) -> Dict[int, Dict[str, Fraction]]:
    """
    Outcome-resolved post-measurement ensembles: for each outcome a, the
    sub-normalized weights Σ q_i P(a|ψ_i) image(ψ_i, a).
    """
    j = t.measurement_index(rule.measurement)
    out: Dict[int, Dict[str, Fraction]] = {}
    for name, q in mixture.weights:
        for a, p in enumerate(t.point(name)[j]):
            if p == 0:
                continue
            image = rule.image(name, a)
            if image is None:
                raise IncompleteRulesError(f"No image for {name} under {rule.measurement}={a}")
            bucket = out.setdefault(a, {})
            for target, w in image.weights:
                bucket[target] = bucket.get(target, Fraction(0)) + q * p * w
    return out


def _ensemble_point(t: Theory, weights: Mapping[str, Fraction]) -> Point:
    acc = [[Fraction(0)] * meas.outcome_count for meas in t.measurements]
    for name, w in weights.items():
        for j, dist in enumerate(t.point(name)):
            for a, p in enumerate(dist):
                acc[j][a] += w * p
    return tuple(tuple(row) for row in acc)


@dataclass(frozen=True)
class DisturbanceViolation:
    """A nonsimpliciality condition whose two sides separate after measuring."""
    measurement: str
    condition: AffineDependency
    outcome: int
    left: Point
    right: Point

    def describe(self) -> str:
        return (f"{self.measurement}={self.outcome}: {self.condition.describe()} gives "
                f"{format_point(self.left)} vs {format_point(self.right)}")


@dataclass(frozen=True)
class RepeatabilityViolation:
    """A post-measurement image that no longer returns the observed outcome with certainty."""
    measurement: str
    state: str
    outcome: int
    image: Mixture


@dataclass
class DisturbanceReport:
    conditions: List[AffineDependency] = field(default_factory=list)
    violations: List[DisturbanceViolation] = field(default_factory=list)
    repeatability: List[RepeatabilityViolation] = field(default_factory=list)

    @property
    def consistent(self) -> bool:
        return not self.violations


def check_disturbance_consistency(t: Theory, rules: Sequence[DisturbanceRule]) -> DisturbanceReport:
    """Push both sides of every nonsimpliciality condition through every rule and compare."""
    table = _rule_table(t, rules)
    report = DisturbanceReport(conditions=nonsimpliciality_conditions(theory_points(t)))

    for j, meas in enumerate(t.measurements):
        rule = table[meas.name]
        for s in t.pure_states:
            for a, p in enumerate(s.dists[j]):
                if p == 0:
                    continue
                image = rule.image(s.name, a)
                if _ensemble_point(t, image.as_dict())[j][a] != 1:
                    report.repeatability.append(RepeatabilityViolation(meas.name, s.name, a, image))

        for condition in report.conditions:
            left = apply_rule(t, rule, condition.left)
            right = apply_rule(t, rule, condition.right)
            for a in range(meas.outcome_count):
                lp = _ensemble_point(t, left.get(a, {}))
                rp = _ensemble_point(t, right.get(a, {}))
                if lp != rp:
                    report.violations.append(DisturbanceViolation(meas.name, condition, a, lp, rp))

    if report.consistent:
        logger.info(f"✅ Disturbance rules preserve all {len(report.conditions)} conditions")
    else:
        logger.warning(f"⚠️ {len(report.violations)} disturbance violations found")
    return report


# ---------------------------------------------------------------------------
# Clone tomography
# ---------------------------------------------------------------------------

def _exact(value) -> sympy.Expr:
    if isinstance(value, Fraction):
        return sympy.Rational(value.numerator, value.denominator)
    if isinstance(value, (int, sympy.Basic)):
        return sympy.sympify(value)
    try:
        return sympy.sympify(str(value), rational=True)
    except (sympy.SympifyError, TypeError) as e:
        raise InputError(f"Cannot read {value!r} as an exact number: {e}")


def chernoff_trials(epsilon, delta, n: int) -> int:
    """
    Smallest t with 2·exp(-ε²t/(3n)) <= δ. Parameters are exact (fractions,
    rational strings or sympy expressions such as "2/E"); the ceiling is
    evaluated by sympy and the bound is re-checked exactly.
    """
    eps, dlt = _exact(epsilon), _exact(delta)
    if not (eps.is_real and dlt.is_real):
        raise InputError("epsilon and delta must be real")
    if not (bool(eps > 0) and bool(eps <= 1)):
        raise InputError(f"epsilon must lie in (0, 1], got {eps}")
    if not (bool(dlt > 0) and bool(dlt < 1)):
        raise InputError(f"delta must lie in (0, 1), got {dlt}")
    if n < 2:
        raise InputError(f"n must be at least 2, got {n}")

    value = 3 * n * sympy.log(2 / dlt) / eps ** 2
    trials = int(sympy.ceiling(value))

    def bound(t):
        return 2 * sympy.exp(-eps ** 2 * t / (3 * n))

    if not bool(bound(trials) <= dlt) or (trials > 1 and bool(bound(trials - 1) <= dlt)):
        raise ArithmeticError(f"Could not certify the Chernoff sample size {trials}")
    logger.debug(f"Chernoff sample size for eps={eps}, delta={dlt}, n={n}: {trials}")
    return max(trials, 1)


@dataclass(frozen=True)
class TomographyPlan:
    """Accuracy epsilon, confidence delta, outcome count and trials per measurement."""
    epsilon: Fraction
    delta: object
    outcome_count: int
    trials: int

    def __post_init__(self):
        if not 0 < self.epsilon <= 1:
            raise InputError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        if self.outcome_count < 2:
            raise InputError("outcome_count must be at least 2")

    @classmethod
    def for_bounds(cls, epsilon: Fraction, delta, outcome_count: int) -> 'TomographyPlan':
        return cls(Fraction(epsilon), delta, outcome_count, chernoff_trials(epsilon, delta, outcome_count))


@dataclass(frozen=True)
class TomographyResult:
    """Empirical frequencies per measurement and the deviation event of each."""
    state: str
    trials: int
    frequencies: Tuple[Tuple[Fraction, ...], ...]
    deviations: Tuple[bool, ...]

    @property
    def failed(self) -> bool:
        return any(self.deviations)

    def estimate(self) -> Point:
        return self.frequencies


def deviation_event(frequencies: Sequence[Fraction], means: Sequence[Fraction], epsilon: Fraction) -> bool:
    """|f - μ| >= εμ holds in every component."""
    return all(abs(f - mu) >= epsilon * mu for f, mu in zip(frequencies, means))


def simulate_clone_tomography(t: Theory, state: str, plan: TomographyPlan, seed: int) -> TomographyResult:
    """Sample plan.trials outcomes per measurement from the state; deterministic given seed."""
    point = t.point(state)
    rng = np.random.default_rng(seed)
    frequencies, deviations = [], []
    for dist in point:
        pvals = np.array([float(p) for p in dist])
        counts = rng.multinomial(plan.trials, pvals / pvals.sum())
        freq = tuple(Fraction(int(c), plan.trials) for c in counts)
        frequencies.append(freq)
        deviations.append(deviation_event(freq, dist, plan.epsilon))
    return TomographyResult(state, plan.trials, tuple(frequencies), tuple(deviations))
