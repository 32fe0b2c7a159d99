#!/usr/bin/env python3
"""
Gdit theories: every pure state is a deterministic value tuple over the
fiducial measurements. Measuring one coordinate disturbs the others
according to a disturbance rule; the rule determines a corresponding
regular theory whose statistics the gdit reproduces under post-selection.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from core_model import Measurement, Mixture, PureState, Theory, deterministic_outcome, uniform_outcome_count
from errors import InconsistentRulesError, InputError, UnknownReferenceError
from statics import DisturbanceRule, check_disturbance_consistency

logger = logging.getLogger(__name__)

Values = Tuple[int, ...]


def default_measurement_names(m: int) -> List[str]:
    if m == 1:
        return ['X']
    if m == 2:
        return ['X', 'Z']
    if m == 3:
        return ['X', 'Y', 'Z']
    return [f"X{i + 1}" for i in range(m)]


@dataclass(frozen=True)
class GditTheory:
    """All n^m deterministic vertices; vertex g_k has values with k = Σ x_i n^i."""
    m: int
    n: int
    theory: Theory
    values: Tuple[Tuple[str, Values], ...]

    @property
    def vertices(self) -> Tuple[str, ...]:
        return self.theory.state_names

    def vertex_values(self, name: str) -> Values:
        return dict(self.values)[name]

    def vertex_name(self, values: Sequence[int]) -> str:
        for name, vals in self.values:
            if vals == tuple(values):
                return name
        raise UnknownReferenceError(f"No gdit vertex with values {tuple(values)}")


def build_gdit(m: int, n: int) -> GditTheory:
    if m < 1 or n < 2:
        raise InputError(f"A gdit needs m >= 1 and n >= 2, got ({m}, {n})")
    names = default_measurement_names(m)
    measurements = tuple(Measurement(name, n) for name in names)
    states, values = [], []
    for k in range(n ** m):
        vals = tuple((k // n ** i) % n for i in range(m))
        dists = tuple(tuple(Fraction(1 if b == v else 0) for b in range(n)) for v in vals)
        states.append(PureState(f"g{k}", dists))
        values.append((f"g{k}", vals))
    logger.debug(f"Built ({m},{n}) gdit with {len(states)} vertices")
    return GditTheory(m, n, Theory(measurements, tuple(states)), tuple(values))


def gdit_from_theory(t: Theory) -> GditTheory:
    """Recognize a theory whose pure states are exactly the deterministic value tuples."""
    n = uniform_outcome_count(t)
    m = len(t.measurements)
    values = []
    for s in t.pure_states:
        vals = tuple(deterministic_outcome(s, j) for j in range(m))
        if None in vals:
            raise InputError(f"State {s.name} is not deterministic, so the theory is not a gdit")
        values.append((s.name, vals))
    if len({v for _, v in values}) != len(values) or len(values) != n ** m:
        raise InputError(f"A ({m},{n}) gdit needs each of the {n ** m} value tuples exactly once")
    return GditTheory(m, n, t, tuple(values))


def product_disturbance(g: GditTheory,
                        marginals: Mapping[Tuple[int, int], Sequence[Sequence[Fraction]]]) -> List[DisturbanceRule]:
    """
    Measuring coordinate i with value a keeps a and redraws every other
    coordinate j independently from marginals[(i, a)][j] (entry i ignored).
    """
    rules = []
    names = g.theory.measurement_names
    for i, meas in enumerate(names):
        images = []
        for vertex, vals in g.values:
            a = vals[i]
            dists = marginals[(i, a)]
            weights: Dict[str, Fraction] = {}
            for others in product(range(g.n), repeat=g.m):
                if others[i] != a:
                    continue
                w = Fraction(1)
                for j, b in enumerate(others):
                    if j != i:
                        w *= Fraction(dists[j][b])
                if w:
                    weights[g.vertex_name(others)] = w
            images.append((vertex, Mixture(tuple(weights.items()))))
        rules.append(DisturbanceRule(meas, tuple(images)))
    return rules


def symmetric_disturbance(g: GditTheory) -> List[DisturbanceRule]:
    """Keep the measured value, randomize every other coordinate uniformly."""
    uniform = tuple(Fraction(1, g.n) for _ in range(g.n))
    marginals = {(i, a): [uniform] * g.m for i in range(g.m) for a in range(g.n)}
    return product_disturbance(g, marginals)


def biased_disturbance(g: GditTheory, agreement: Fraction) -> List[DisturbanceRule]:
    """
    Every other coordinate takes the measured value with probability
    ``agreement`` and each remaining value with an equal share of the rest.
    """
    agreement = Fraction(agreement)
    if not 0 <= agreement <= 1:
        raise InputError(f"agreement must lie in [0, 1], got {agreement}")
    rest = (1 - agreement) / (g.n - 1)
    marginals = {}
    for i in range(g.m):
        for a in range(g.n):
            dist = tuple(agreement if b == a else rest for b in range(g.n))
            marginals[(i, a)] = [dist] * g.m
    return product_disturbance(g, marginals)


@dataclass(frozen=True)
class Correspondence:
    """A gdit, its disturbance rules, and the regular theory they define."""
    gdit: GditTheory
    rules: Tuple[DisturbanceRule, ...]
    regular: Theory
    decompositions: Tuple[Tuple[str, Mixture], ...]

    def decomposition(self, state: str) -> Mixture:
        return dict(self.decompositions)[state]

    def regular_state(self, measurement: str, outcome: int) -> str:
        return self.regular.eigenstates[(measurement, outcome)]


def build_correspondence(g: GditTheory, rules: Sequence[DisturbanceRule]) -> Correspondence:
    report = check_disturbance_consistency(g.theory, rules)
    if not report.consistent:
        raise InconsistentRulesError(f"Rules violate {len(report.violations)} nonsimpliciality conditions")
    if report.repeatability:
        raise InconsistentRulesError("Rules do not preserve the measured value")
    table = {rule.measurement: rule for rule in rules}

    states, eigen, decompositions = [], [], []
    for i, meas in enumerate(g.theory.measurements):
        rule = table[meas.name]
        for a in range(g.n):
            images = {rule.image(vertex, a) for vertex, vals in g.values if vals[i] == a}
            if len(images) != 1:
                raise InconsistentRulesError(
                    f"Post-measurement state for {meas.name}={a} depends on the unmeasured values")
            image = images.pop()
            dists = [[Fraction(0)] * g.n for _ in range(g.m)]
            for vertex, w in image.weights:
                for j, v in enumerate(g.vertex_values(vertex)):
                    dists[j][v] += w
            name = f"{meas.name}={a}"
            states.append(PureState(name, tuple(tuple(d) for d in dists)))
            eigen.append(((meas.name, a), name))
            decompositions.append((name, image))
    regular = Theory(g.theory.measurements, tuple(states), tuple(eigen))
    logger.info(f"✅ Corresponding regular theory with {len(states)} pure states")
    return Correspondence(g, tuple(rules), regular, tuple(decompositions))


def corresponding_regular_theory(g: GditTheory, rules: Sequence[DisturbanceRule]) -> Theory:
    return build_correspondence(g, rules).regular


@dataclass(frozen=True)
class IndistinguishabilityResult:
    """Empirical outcome distributions of the second measurement in both theories."""
    prepare: Tuple[str, int]
    then_measure: str
    trials: int
    gdit_distribution: Tuple[Fraction, ...]
    regular_distribution: Tuple[Fraction, ...]

    @property
    def total_variation(self) -> Fraction:
        return total_variation(self.gdit_distribution, self.regular_distribution)


def total_variation(p: Sequence[Fraction], q: Sequence[Fraction]) -> Fraction:
    return sum((abs(a - b) for a, b in zip(p, q)), Fraction(0)) / 2


def indistinguishability_trial(c: Correspondence, prepare: Tuple[str, int], then_measure: str,
                               trials: int, seed: int) -> IndistinguishabilityResult:
    """
    Prepare A=a then measure B, in the gdit (uniform random vertex,
    post-selected on A=a, disturbed by A's rule) and in the regular theory
    (A=a eigenstate). Both sides use child streams of one seed.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    measurement, outcome = prepare
    g = c.gdit
    i = g.theory.measurement_index(measurement)
    j = g.theory.measurement_index(then_measure)
    if not 0 <= outcome < g.n:
        raise InputError(f"Outcome {outcome} out of range for {measurement}")
    rule = {r.measurement: r for r in c.rules}[measurement]

    gdit_seed, regular_seed = np.random.SeedSequence(seed).spawn(2)
    g_rng = np.random.default_rng(gdit_seed)
    r_rng = np.random.default_rng(regular_seed)

    names = list(g.vertices)
    position = {name: k for k, name in enumerate(names)}
    values = np.array([g.vertex_values(name) for name in names], dtype=np.int64)

    counts = np.zeros(g.n, dtype=np.int64)
    accepted = 0
    while accepted < trials:
        draws = g_rng.integers(0, len(names), size=trials)
        kept = draws[values[draws, i] == outcome][:trials - accepted]
        for vertex in np.unique(kept):
            how_many = int(np.sum(kept == vertex))
            image = rule.image(names[vertex], outcome)
            targets = [position[name] for name, _ in image.weights]
            probs = np.array([float(w) for _, w in image.weights])
            post = g_rng.choice(targets, size=how_many, p=probs / probs.sum())
            counts += np.bincount(values[post, j], minlength=g.n)
        accepted += len(kept)

    regular_point = c.regular.point(c.regular_state(measurement, outcome))
    pvals = np.array([float(p) for p in regular_point[j]])
    regular_counts = r_rng.multinomial(trials, pvals / pvals.sum())

    result = IndistinguishabilityResult(
        prepare=(measurement, outcome),
        then_measure=then_measure,
        trials=trials,
        gdit_distribution=tuple(Fraction(int(k), trials) for k in counts),
        regular_distribution=tuple(Fraction(int(k), trials) for k in regular_counts),
    )
    logger.info(f"🔍 {measurement}={outcome} then {then_measure}: total variation "
                f"{float(result.total_variation):.4f} over {trials} trials")
    return result
