#!/usr/bin/env python3
"""
Joint measurability of fiducial measurements.

A joint measurement of a measurement subset assigns a distribution over
outcome tuples to every pure state of the subset's associated state space
(the states that are eigenstates of some subset measurement). It must
reproduce every marginal and respect every affine dependency among those
states. The resulting linear system is decided exactly.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Sequence, Tuple, Union

from core_model import Theory, deterministic_outcome, theory_points
from errors import InputError, NotRegularError
from exact_geometry import (
    AffineDependency,
    ConstraintBuilder,
    ConstraintSystem,
    FarkasCertificate,
    Feasible,
    feasible,
    maximize,
    nonsimpliciality_conditions,
    satisfies,
)

logger = logging.getLogger(__name__)

OutcomeTuple = Tuple[int, ...]


def variable_name(outcomes: OutcomeTuple, state: str) -> str:
    return f"M({','.join(str(a) for a in outcomes)}|{state})"


def _check_subset(t: Theory, subset: Sequence[str]) -> Tuple[str, ...]:
    subset = tuple(subset)
    if len(subset) < 2:
        raise InputError("A joint measurement needs at least two measurements")
    if len(set(subset)) != len(subset):
        raise InputError(f"Repeated measurement in {subset}")
    for name in subset:
        t.measurement_index(name)
    return subset


def associated_states(t: Theory, subset: Sequence[str]) -> Tuple[str, ...]:
    """
    Pure states that return some outcome of some subset measurement with
    certainty, in theory order. Raises NotRegularError when an outcome of
    the subset has no eigenstate.
    """
    indices = [t.measurement_index(name) for name in subset]
    covered = set()
    states = []
    for s in t.pure_states:
        hit = False
        for name, j in zip(subset, indices):
            a = deterministic_outcome(s, j)
            if a is not None:
                covered.add((name, a))
                hit = True
        if hit:
            states.append(s.name)
    missing = [f"{name}={a}" for name, j in zip(subset, indices)
               for a in range(t.measurements[j].outcome_count) if (name, a) not in covered]
    if missing:
        raise NotRegularError(f"No eigenstate for {', '.join(missing)}")
    return tuple(states)


@dataclass(frozen=True)
class JointMeasurementSystem:
    """Variables M(outcomes|state) over the associated states, and their constraints."""
    measurements: Tuple[str, ...]
    states: Tuple[str, ...]
    outcome_tuples: Tuple[OutcomeTuple, ...]
    conditions: Tuple[AffineDependency, ...]
    system: ConstraintSystem
    dependency_rows: int

    def variable(self, outcomes: OutcomeTuple, state: str) -> str:
        return variable_name(tuple(outcomes), state)


def build_joint_system(t: Theory, meas_subset: Sequence[str]) -> JointMeasurementSystem:
    """Marginalization, nonnegativity and dependency constraints for a joint measurement."""
    subset = _check_subset(t, meas_subset)
    states = associated_states(t, subset)
    indices = [t.measurement_index(name) for name in subset]
    tuples = tuple(product(*(range(t.measurements[j].outcome_count) for j in indices)))

    builder = ConstraintBuilder()
    for state in states:
        for outcomes in tuples:
            builder.add_variable(variable_name(outcomes, state), nonnegative=True)

    for state in states:
        dists = t.point(state)
        for position, j in enumerate(indices):
            for a in range(t.measurements[j].outcome_count):
                terms = {variable_name(o, state): 1 for o in tuples if o[position] == a}
                builder.add_equality(terms, dists[j][a])

    conditions = tuple(nonsimpliciality_conditions(theory_points(t, states)))
    rows = 0
    for condition in conditions:
        for outcomes in tuples:
            terms: Dict[str, Fraction] = {}
            for name, q in condition.left.weights:
                key = variable_name(outcomes, name)
                terms[key] = terms.get(key, Fraction(0)) + q
            for name, r in condition.right.weights:
                key = variable_name(outcomes, name)
                terms[key] = terms.get(key, Fraction(0)) - r
            builder.add_equality(terms, 0)
            rows += 1

    system = builder.build()
    logger.info(f"🔍 Joint system for {'/'.join(subset)}: {system.describe()}, "
                f"{len(conditions)} dependency blocks")
    return JointMeasurementSystem(subset, states, tuples, conditions, system, rows)


@dataclass(frozen=True)
class ForcedConflict:
    """A dependency equality violated by values the marginals alone force."""
    condition: AffineDependency
    outcomes: OutcomeTuple
    left_value: Fraction
    right_value: Fraction


def forced_values(t: Theory, jms: JointMeasurementSystem) -> Dict[Tuple[str, OutcomeTuple], Fraction]:
    """Values of M(outcomes|state) fixed by marginalization and nonnegativity alone."""
    indices = [t.measurement_index(name) for name in jms.measurements]
    forced = {}
    for state in jms.states:
        dists = t.point(state)
        builder = ConstraintBuilder()
        for outcomes in jms.outcome_tuples:
            builder.add_variable(variable_name(outcomes, state), nonnegative=True)
        for position, j in enumerate(indices):
            for a in range(t.measurements[j].outcome_count):
                builder.add_equality({variable_name(o, state): 1 for o in jms.outcome_tuples
                                      if o[position] == a}, dists[j][a])
        cs = builder.build()
        for outcomes in jms.outcome_tuples:
            name = variable_name(outcomes, state)
            high = maximize(cs, {name: 1}).value
            low = -maximize(cs, {name: -1}).value
            if high == low:
                forced[(state, outcomes)] = high
    return forced


def forced_conflicts(jms: JointMeasurementSystem,
                     forced: Dict[Tuple[str, OutcomeTuple], Fraction]) -> List[ForcedConflict]:
    conflicts = []
    for condition in jms.conditions:
        involved = condition.left.support() + condition.right.support()
        for outcomes in jms.outcome_tuples:
            if not all((s, outcomes) in forced for s in involved):
                continue
            left = sum((q * forced[(s, outcomes)] for s, q in condition.left.weights), Fraction(0))
            right = sum((r * forced[(s, outcomes)] for s, r in condition.right.weights), Fraction(0))
            if left != right:
                conflicts.append(ForcedConflict(condition, outcomes, left, right))
    return conflicts


@dataclass(frozen=True)
class Yes:
    """A joint measurement: M(outcomes|state) for every associated pure state."""
    jms: JointMeasurementSystem
    values: Dict[str, Fraction]

    def value(self, outcomes: OutcomeTuple, state: str) -> Fraction:
        return self.values[variable_name(tuple(outcomes), state)]

    def verify(self, t: Theory) -> bool:
        if not satisfies(self.jms.system, self.values):
            return False
        indices = [t.measurement_index(name) for name in self.jms.measurements]
        for state in self.jms.states:
            s = t.state(state)
            for position, j in enumerate(indices):
                a = deterministic_outcome(s, j)
                if a is None:
                    continue
                # An eigenstate of A_j=a puts no weight on tuples with another A_j outcome.
                if any(self.value(o, state) != 0 for o in self.jms.outcome_tuples if o[position] != a):
                    return False
        return True


@dataclass(frozen=True)
class No:
    """Infeasibility certificate plus the trace of values the marginals force."""
    jms: JointMeasurementSystem
    certificate: FarkasCertificate
    forced: Dict[Tuple[str, OutcomeTuple], Fraction]
    conflicts: List[ForcedConflict]

    def verify(self, t: Theory) -> bool:
        return self.certificate.verify(self.jms.system)


def comeasurable(t: Theory, meas_subset: Sequence[str]) -> Union[Yes, No]:
    """Decide whether the measurements admit a joint measurement."""
    jms = build_joint_system(t, meas_subset)
    result = feasible(jms.system)
    if isinstance(result, Feasible):
        logger.info(f"✅ {'/'.join(jms.measurements)} are jointly measurable")
        return Yes(jms, dict(result.assignment))
    forced = forced_values(t, jms)
    conflicts = forced_conflicts(jms, forced)
    logger.info(f"❌ {'/'.join(jms.measurements)} admit no joint measurement "
                f"({len(conflicts)} forced conflicts)")
    return No(jms, result.certificate, forced, conflicts)


@dataclass(frozen=True)
class CountingReport:
    """Constraint and free-variable counts for a joint measurement outside the associated space."""
    m: int
    n: int
    nu: int
    constraints: int
    constraint_bound: int
    free_variables: int
    overconstrained: bool
    state_threshold: Fraction


def counting_report(m: int, n: int, nu: int) -> CountingReport:
    if m < 1:
        raise InputError(f"m must be at least 1, got {m}")
    if n < 2:
        raise InputError(f"n must be at least 2, got {n}")
    if not 0 <= nu <= m - 1:
        raise InputError(f"nu must lie in [0, {m - 1}], got {nu}")
    constraints = 2 * (n - 1) * m * n + (n * n - 1) * nu
    free_variables = m * (n - 1) * (n + 1) * n
    bound = m * (n - 1) * (3 * n + 1) - (n * n - 1)
    return CountingReport(
        m=m, n=n, nu=nu,
        constraints=constraints,
        constraint_bound=bound,
        free_variables=free_variables,
        overconstrained=constraints > free_variables,
        state_threshold=Fraction(n + 1, n - 1),
    )
