#!/usr/bin/env python3
"""
Contextuality analyses on finite behaviors.

A behavior assigns an outcome distribution to each context (a subset of
measurements). This module covers:
- congruence graphs and their equivalence classes
- joint distributions: product and conditional constructions, plus an
  exact existence test
- the overprotective-seer (OS) correlator and its four-measurement
  extension (XOS)
- deterministic contextual configurations, no-signaling checks and
  uniformly mixed boxes
"""

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx
import pydantic
from pydantic import BaseModel, ConfigDict

from core_model import format_rational, parse_rational
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
from exact_geometry import ConstraintBuilder, ConstraintSystem, FarkasCertificate, Feasible, feasible
from settings import get_settings
from statics import jointly_distinguishable, state_uncertainty

logger = logging.getLogger(__name__)

Context = Tuple[str, ...]
Outcomes = Tuple[int, ...]
Distribution = Dict[Outcomes, Fraction]


# ---------------------------------------------------------------------------
# Congruence graphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CongruenceGraph:
    """Measurements as vertices, congruent (jointly measurable) pairs as edges."""
    vertices: Tuple[str, ...]
    edges: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        known = set(self.vertices)
        normalized = set()
        for a, b in self.edges:
            if a == b:
                raise InputError(f"Self-loop on {a}")
            if a not in known or b not in known:
                raise UnknownReferenceError(f"Edge {a}-{b} uses an unknown measurement")
            normalized.add(tuple(sorted((a, b))))
        object.__setattr__(self, 'edges', tuple(sorted(normalized)))

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g

    def congruent(self, a: str, b: str) -> bool:
        return tuple(sorted((a, b))) in self.edges


@dataclass(frozen=True)
class Partition:
    classes: Tuple[Tuple[str, ...], ...]


@dataclass(frozen=True)
class IntransitivityWitness:
    """Edges a-b and b-c without a-c."""
    a: str
    b: str
    c: str

    def verify(self, g: CongruenceGraph) -> bool:
        return g.congruent(self.a, self.b) and g.congruent(self.b, self.c) and not g.congruent(self.a, self.c)


def congruence_classes(g: CongruenceGraph) -> Union[Partition, IntransitivityWitness]:
    """Equivalence classes when congruence is transitive, else a violating triple."""
    graph = g.graph()
    for middle in sorted(graph.nodes):
        neighbors = sorted(graph.neighbors(middle))
        for a, c in combinations(neighbors, 2):
            if not graph.has_edge(a, c):
                logger.info(f"❌ Congruence is intransitive: {a}-{middle}-{c}")
                return IntransitivityWitness(a, middle, c)
    order = {name: k for k, name in enumerate(g.vertices)}
    classes = sorted((tuple(sorted(comp, key=order.get)) for comp in nx.connected_components(graph)),
                     key=lambda cls: order[cls[0]])
    return Partition(tuple(classes))


def congruence_graph(t) -> CongruenceGraph:
    """Edge A-B iff the associated state space of {A, B} is a simplex."""
    names = t.measurement_names
    edges = [(a, b) for a, b in combinations(names, 2) if jointly_distinguishable(t, [a, b])]
    return CongruenceGraph(tuple(names), tuple(edges))


def two_by_two_graph() -> CongruenceGraph:
    """{A1, A2} x {B1, B2} with every pair congruent except A1-A2."""
    return CongruenceGraph(
        ('A1', 'A2', 'B1', 'B2'),
        (('A1', 'B1'), ('A1', 'B2'), ('A2', 'B1'), ('A2', 'B2'), ('B1', 'B2')),
    )


# ---------------------------------------------------------------------------
# Behaviors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Behavior:
    """Per-context outcome distributions; contexts need not agree on shared marginals."""
    contexts: Tuple[Context, ...]
    outcome_counts: Tuple[Tuple[str, int], ...]
    stats: Tuple[Tuple[Context, Tuple[Tuple[Outcomes, Fraction], ...]], ...]

    def __post_init__(self):
        counts = dict(self.outcome_counts)
        problems = []
        if len(set(self.contexts)) != len(self.contexts):
            problems.append("repeated context")
        table = dict(self.stats)
        for context in self.contexts:
            if len(set(context)) != len(context):
                problems.append(f"context {','.join(context)} repeats a measurement")
            for name in context:
                if counts.get(name, 0) < 1:
                    problems.append(f"no outcome count for {name}")
            if context not in table:
                problems.append(f"no statistics for context {','.join(context)}")
                continue
            total = Fraction(0)
            for outcomes, p in table[context]:
                if len(outcomes) != len(context) or any(
                        not 0 <= o < counts.get(name, 0) for o, name in zip(outcomes, context)):
                    problems.append(f"outcome {outcomes} out of range in {','.join(context)}")
                if p < 0:
                    problems.append(f"negative probability in {','.join(context)}")
                total += p
            if total != 1:
                problems.append(f"context {','.join(context)} sums to {format_rational(total)}")
        if problems:
            raise ValidationError(f"Invalid behavior: {'; '.join(problems)}", problems)

    @classmethod
    def of(cls, outcome_counts: Mapping[str, int],
           stats: Mapping[Context, Mapping[Outcomes, Fraction]]) -> 'Behavior':
        contexts = tuple(tuple(c) for c in stats)
        return cls(
            contexts=contexts,
            outcome_counts=tuple(sorted(outcome_counts.items())),
            stats=tuple((tuple(c), tuple(sorted((tuple(o), Fraction(p)) for o, p in dist.items() if p)))
                        for c, dist in stats.items()),
        )

    @property
    def measurements(self) -> Tuple[str, ...]:
        seen = []
        for context in self.contexts:
            for name in context:
                if name not in seen:
                    seen.append(name)
        return tuple(seen)

    def outcome_count(self, name: str) -> int:
        return dict(self.outcome_counts)[name]

    def outcome_tuples(self, context: Sequence[str]) -> List[Outcomes]:
        return list(product(*(range(self.outcome_count(name)) for name in context)))

    def find_context(self, names: Sequence[str]) -> Context:
        """The stored context containing exactly ``names``, in any order."""
        wanted = set(names)
        for context in self.contexts:
            if set(context) == wanted:
                return context
        raise MissingContextError(f"Behavior has no context {{{','.join(names)}}}")

    def distribution(self, context: Sequence[str]) -> Distribution:
        """Distribution over the outcome tuples of ``context``, reordered as given."""
        context = tuple(context)
        stored = self.find_context(context)
        position = [stored.index(name) for name in context]
        dist = {o: Fraction(0) for o in self.outcome_tuples(context)}
        for outcomes, p in dict(self.stats)[stored]:
            dist[tuple(outcomes[k] for k in position)] += p
        return dist

    def marginal(self, context: Sequence[str], names: Sequence[str]) -> Distribution:
        context = tuple(context)
        position = [context.index(name) for name in names]
        out = {o: Fraction(0) for o in self.outcome_tuples(names)}
        for outcomes, p in self.distribution(context).items():
            out[tuple(outcomes[k] for k in position)] += p
        return out


def _parse_outcomes(text: str) -> Outcomes:
    parts = text.split(',') if ',' in text else list(text)
    try:
        return tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"Outcome tuple {text!r} is not a list of digits")


class BehaviorDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')

    contexts: List[List[str]]
    outcomes: Union[int, Dict[str, int]] = 2
    stats: Dict[str, Dict[str, Union[str, int]]]


def parse_behavior(document: Union[str, bytes, Mapping]) -> Behavior:
    """Behavior file: contexts, outcome counts, and per-context stats keyed by "A,B"."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise ParseError(f"Behavior document is not valid JSON: {e}")
    try:
        doc = BehaviorDocument.model_validate(document)
    except pydantic.ValidationError as e:
        raise SchemaError(f"Behavior document does not match the schema: {e}")

    contexts = [tuple(c) for c in doc.contexts]
    names = sorted({name for c in contexts for name in c})
    if isinstance(doc.outcomes, int):
        counts = {name: doc.outcomes for name in names}
    else:
        counts = dict(doc.outcomes)
    stats = {}
    for context in contexts:
        key = ','.join(context)
        if key not in doc.stats:
            raise MissingContextError(f"No stats for context {key}")
        stats[context] = {_parse_outcomes(o): parse_rational(p) for o, p in doc.stats[key].items()}
    extra = set(doc.stats) - {','.join(c) for c in contexts}
    if extra:
        raise UnknownReferenceError(f"Stats for undeclared contexts: {', '.join(sorted(extra))}")
    return Behavior.of(counts, stats)


def serialize_behavior(b: Behavior) -> Dict:
    counts = dict(b.outcome_counts)
    uniform = set(counts.values())
    return {
        'contexts': [list(c) for c in b.contexts],
        'outcomes': uniform.pop() if len(uniform) == 1 else counts,
        'stats': {
            ','.join(c): {''.join(str(o) for o in outcomes): format_rational(p) for outcomes, p in dist}
            for c, dist in b.stats
        },
    }


# ---------------------------------------------------------------------------
# Joint distributions
# ---------------------------------------------------------------------------

def product_jd(partition: Union[Partition, IntransitivityWitness], class_distributions: Mapping[Context, Mapping],
               outcome_counts: Mapping[str, int]) -> Behavior:
    """One global context whose distribution is the product over congruence classes."""
    if isinstance(partition, IntransitivityWitness):
        raise IntransitiveError(f"Congruence is intransitive at {partition.a}-{partition.b}-{partition.c}")
    names = [name for cls in partition.classes for name in cls]
    per_class = []
    for cls in partition.classes:
        if cls not in class_distributions:
            raise MissingContextError(f"No distribution for class {','.join(cls)}")
        per_class.append({tuple(o): Fraction(p) for o, p in class_distributions[cls].items()})
    joint: Dict[Outcomes, Fraction] = {}
    for parts in product(*(d.items() for d in per_class)):
        outcomes = tuple(v for o, _ in parts for v in o)
        weight = Fraction(1)
        for _, p in parts:
            weight *= p
        if weight:
            joint[outcomes] = weight
    return Behavior.of(outcome_counts, {tuple(names): joint})


def conditional_jd_2x2(b: Behavior, a1: str = 'A1', a2: str = 'A2',
                       b1: str = 'B1', b2: str = 'B2') -> Behavior:
    """
    P(a1, a2, b1, b2) = P(a1, b1, b2) P(a2, b1, b2) / P(b1, b2), built from
    the contexts {A1,B1,B2}, {A2,B1,B2} and {B1,B2}.
    """
    first = b.distribution((a1, b1, b2))
    second = b.distribution((a2, b1, b2))
    shared = b.distribution((b1, b2))
    if b.marginal((a1, b1, b2), (b1, b2)) != shared or b.marginal((a2, b1, b2), (b1, b2)) != shared:
        raise MarginalMismatchError(f"The {b1},{b2} marginals of the input contexts disagree")
    zero = [o for o, p in shared.items() if p == 0]
    if zero:
        raise ZeroDenominatorError(f"P({b1},{b2}) vanishes at {zero[0]}")
    joint = {}
    for x in range(b.outcome_count(a1)):
        for y in range(b.outcome_count(a2)):
            for o, p in shared.items():
                weight = first[(x,) + o] * second[(y,) + o] / p
                if weight:
                    joint[(x, y) + o] = weight
    counts = {name: b.outcome_count(name) for name in (a1, a2, b1, b2)}
    return Behavior.of(counts, {(a1, a2, b1, b2): joint})


def _assignment_name(values: Outcomes) -> str:
    return f"P({','.join(str(v) for v in values)})"


def jd_system(b: Behavior, limit: Optional[int] = None) -> Tuple[Context, List[Outcomes], ConstraintSystem]:
    """Nonnegative weights on global assignments reproducing every context exactly."""
    limit = limit if limit is not None else get_settings().enumeration_limit
    names = b.measurements
    size = 1
    for name in names:
        size *= b.outcome_count(name)
    if size > limit:
        raise GuardExceededError(f"{size} global assignments exceed the limit of {limit}")
    assignments = list(product(*(range(b.outcome_count(name)) for name in names)))
    builder = ConstraintBuilder()
    for values in assignments:
        builder.add_variable(_assignment_name(values), nonnegative=True)
    for context in b.contexts:
        position = [names.index(name) for name in context]
        dist = b.distribution(context)
        for outcomes in b.outcome_tuples(context):
            terms = {_assignment_name(v): 1 for v in assignments
                     if tuple(v[k] for k in position) == outcomes}
            builder.add_equality(terms, dist[outcomes])
    return names, assignments, builder.build()


@dataclass(frozen=True)
class Exists:
    """A global distribution whose context marginals are the behavior."""
    measurements: Context
    distribution: Tuple[Tuple[Outcomes, Fraction], ...]

    def as_behavior(self, b: Behavior) -> Behavior:
        counts = {name: b.outcome_count(name) for name in self.measurements}
        return Behavior.of(counts, {self.measurements: dict(self.distribution)})

    def verify(self, b: Behavior) -> bool:
        if any(p < 0 for _, p in self.distribution) or sum(p for _, p in self.distribution) != 1:
            return False
        joint = self.as_behavior(b)
        return all(joint.marginal(self.measurements, context) == b.distribution(context)
                   for context in b.contexts)


@dataclass(frozen=True)
class NoJD:
    system: ConstraintSystem
    certificate: FarkasCertificate

    def verify(self, b: Behavior) -> bool:
        return self.certificate.verify(self.system)


def jd_feasible(b: Behavior, limit: Optional[int] = None) -> Union[Exists, NoJD]:
    names, assignments, system = jd_system(b, limit)
    result = feasible(system)
    if isinstance(result, Feasible):
        dist = tuple((v, result.assignment[_assignment_name(v)]) for v in assignments
                     if result.assignment[_assignment_name(v)])
        logger.info(f"✅ Joint distribution exists over {','.join(names)}")
        return Exists(names, dist)
    logger.info(f"❌ No joint distribution over {','.join(names)}")
    return NoJD(system, result.certificate)


# ---------------------------------------------------------------------------
# OS and XOS
# ---------------------------------------------------------------------------

def _sign(outcome: int) -> int:
    return 1 - 2 * outcome


def correlator(b: Behavior, first: str, second: str) -> Fraction:
    """⟨AB⟩ with outcome 0 read as +1 and 1 as -1."""
    dist = b.distribution((first, second))
    return sum((p * _sign(x) * _sign(y) for (x, y), p in dist.items()), Fraction(0))


def os_value(b: Behavior, names: Sequence[str] = ('A', 'B', 'C')) -> Fraction:
    """⟨AB⟩ + ⟨BC⟩ + ⟨AC⟩; noncontextual assignments give at least -1."""
    a, bb, c = names
    for name in names:
        if name in dict(b.outcome_counts) and b.outcome_count(name) != 2:
            raise InputError(f"OS needs binary outcomes, {name} has {b.outcome_count(name)}")
    return correlator(b, a, bb) + correlator(b, bb, c) + correlator(b, a, c)


def xos_score_triple(a: int, b: int, c: int) -> int:
    """(v_max - v_mid)(v_mid - v_min); 1 exactly when the three outcomes are distinct."""
    for v in (a, b, c):
        if v not in (0, 1, 2):
            raise InputError(f"XOS outcomes are 0, 1 or 2, got {v}")
    low, mid, high = sorted((a, b, c))
    return (high - mid) * (mid - low)


def xos_triples(names: Sequence[str] = ('X', 'Y', 'Z', 'W')) -> List[Context]:
    x, y, z, w = names
    return [(x, y, z), (y, z, w), (z, w, x), (w, x, y)]


def xos_value(b: Behavior, names: Sequence[str] = ('X', 'Y', 'Z', 'W')) -> Fraction:
    """Sum of expected scores over the four triples; noncontextual assignments give at most 2."""
    total = Fraction(0)
    for triple in xos_triples(names):
        for outcomes, p in b.distribution(triple).items():
            if p:
                total += p * xos_score_triple(*outcomes)
    return total


# ---------------------------------------------------------------------------
# Contextual configurations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContextualConfiguration:
    """One deterministic outcome tuple per context."""
    contexts: Tuple[Context, ...]
    outputs: Tuple[Outcomes, ...]

    def behavior(self, outcome_counts: Mapping[str, int]) -> Behavior:
        return Behavior.of(outcome_counts, {c: {o: Fraction(1)} for c, o in zip(self.contexts, self.outputs)})

    def values(self) -> Dict[str, set]:
        seen: Dict[str, set] = {}
        for context, outcomes in zip(self.contexts, self.outputs):
            for name, o in zip(context, outcomes):
                seen.setdefault(name, set()).add(o)
        return seen

    @property
    def noncontextual(self) -> bool:
        """Every measurement gets the same value in all its contexts."""
        return all(len(v) == 1 for v in self.values().values())

    def shift(self, k: int, n: int) -> 'ContextualConfiguration':
        return ContextualConfiguration(
            self.contexts, tuple(tuple((o + k) % n for o in outcomes) for outcomes in self.outputs))

    def describe(self) -> str:
        return ' '.join(''.join(str(o) for o in outcomes) for outcomes in self.outputs)


def count_contextual_configurations(contexts: Sequence[Context], outcome_counts: Mapping[str, int]) -> int:
    total = 1
    for context in contexts:
        for name in context:
            total *= outcome_counts[name]
    return total


def iter_contextual_configurations(contexts: Sequence[Context],
                                   outcome_counts: Mapping[str, int]) -> Iterator[ContextualConfiguration]:
    """Lazily yield every per-context deterministic assignment."""
    contexts = tuple(tuple(c) for c in contexts)
    per_context = [list(product(*(range(outcome_counts[name]) for name in c))) for c in contexts]
    for outputs in product(*per_context):
        yield ContextualConfiguration(contexts, tuple(outputs))


def enumerate_contextual_configurations(contexts: Sequence[Context], outcome_counts: Mapping[str, int],
                                        limit: Optional[int] = None) -> List[ContextualConfiguration]:
    limit = limit if limit is not None else get_settings().enumeration_limit
    total = count_contextual_configurations(contexts, outcome_counts)
    if total > limit:
        raise GuardExceededError(f"{total} configurations exceed the limit of {limit}")
    return list(iter_contextual_configurations(contexts, outcome_counts))


def noncontextual_configurations(contexts: Sequence[Context],
                                 outcome_counts: Mapping[str, int]) -> Iterator[ContextualConfiguration]:
    """Configurations induced by one global value assignment."""
    contexts = tuple(tuple(c) for c in contexts)
    names = sorted({name for c in contexts for name in c})
    for values in product(*(range(outcome_counts[name]) for name in names)):
        table = dict(zip(names, values))
        yield ContextualConfiguration(contexts, tuple(tuple(table[name] for name in c) for c in contexts))


def configuration_of(b: Behavior) -> Optional[ContextualConfiguration]:
    """The configuration of a deterministic behavior, or None."""
    outputs = []
    for context in b.contexts:
        support = [o for o, p in b.distribution(context).items() if p]
        if len(support) != 1:
            return None
        outputs.append(support[0])
    return ContextualConfiguration(b.contexts, tuple(outputs))


@dataclass(frozen=True)
class MarginalViolation:
    """A measurement whose marginal differs between two contexts."""
    measurement: str
    first_context: Context
    second_context: Context
    first_marginal: Tuple[Fraction, ...]
    second_marginal: Tuple[Fraction, ...]

    def describe(self) -> str:
        left = ','.join(format_rational(p) for p in self.first_marginal)
        right = ','.join(format_rational(p) for p in self.second_marginal)
        return (f"{self.measurement}: ({left}) in {','.join(self.first_context)} vs "
                f"({right}) in {','.join(self.second_context)}")


@dataclass
class GleasonReport:
    violations: List[MarginalViolation] = field(default_factory=list)

    @property
    def no_signaling(self) -> bool:
        return not self.violations


def _single_marginal(b: Behavior, context: Context, name: str) -> Tuple[Fraction, ...]:
    dist = b.marginal(context, (name,))
    return tuple(dist[(a,)] for a in range(b.outcome_count(name)))


def gleason_nosignaling_check(b: Behavior) -> GleasonReport:
    """Compare each measurement's marginal in every context with its first context."""
    report = GleasonReport()
    for name in b.measurements:
        holding = [c for c in b.contexts if name in c]
        reference = _single_marginal(b, holding[0], name)
        for other in holding[1:]:
            marginal = _single_marginal(b, other, name)
            if marginal != reference:
                report.violations.append(MarginalViolation(name, holding[0], other, reference, marginal))
    if report.no_signaling:
        logger.debug("Behavior satisfies single-measurement no-signaling")
    else:
        logger.info(f"⚠️ {len(report.violations)} no-signaling violations")
    return report


def shift_orbit(config: ContextualConfiguration, n: int) -> List[ContextualConfiguration]:
    """Outcome shifts by k mod n for k = 1..n-1; for bits this is the flip."""
    return [config.shift(k, n) for k in range(1, n)]


def uniform_mixture(configs: Sequence[ContextualConfiguration], outcome_counts: Mapping[str, int]) -> Behavior:
    if not configs:
        raise InputError("Cannot mix an empty set of configurations")
    contexts = configs[0].contexts
    if any(c.contexts != contexts for c in configs):
        raise InputError("Configurations must share their contexts")
    weight = Fraction(1, len(configs))
    stats: Dict[Context, Dict[Outcomes, Fraction]] = {c: {} for c in contexts}
    for config in configs:
        for context, outcomes in zip(contexts, config.outputs):
            stats[context][outcomes] = stats[context].get(outcomes, Fraction(0)) + weight
    return Behavior.of(outcome_counts, stats)


def contextual_box(g1: ContextualConfiguration, partners: Sequence[ContextualConfiguration],
                   outcome_counts: Mapping[str, int]) -> Behavior:
    """Uniform mixture of a contextual gdit with its cyclic outcome shifts."""
    counts = {outcome_counts[name] for c in g1.contexts for name in c}
    if len(counts) != 1:
        raise InputError("Contextual boxes need a single outcome count")
    n = counts.pop()
    expected = sorted(shift_orbit(g1, n), key=lambda c: c.outputs)
    if sorted(partners, key=lambda c: c.outputs) != expected:
        raise PartnerMismatchError(f"Partners must be the {n - 1} outcome shifts of {g1.describe()}")
    return uniform_mixture([g1] + list(partners), outcome_counts)


@dataclass(frozen=True)
class DimensionReport:
    outcomes: int
    contextual_dimension: int
    generalized_dimension: int
    plus_dimension: int
    state_dimension: int

    @property
    def reduction(self) -> Fraction:
        return Fraction(self.plus_dimension, self.state_dimension)


def contextual_dimension_report(n: int) -> DimensionReport:
    """Dimension counts of the three-context contextual gdit theory with n outcomes."""
    if n < 2:
        raise InputError(f"n must be at least 2, got {n}")
    return DimensionReport(
        outcomes=n,
        contextual_dimension=3 * (n * n - 1),
        generalized_dimension=3 * (n - 1),
        plus_dimension=3 * n * (n - 1),
        state_dimension=3 * (n - 1),
    )


def behavior_uncertainty(b: Behavior) -> Fraction:
    """Uncertainty of the single-measurement marginals of a no-signaling behavior."""
    report = gleason_nosignaling_check(b)
    if not report.no_signaling:
        raise MarginalMismatchError(f"Behavior signals: {report.violations[0].describe()}")
    names = b.measurements
    if len(names) < 2:
        raise InputError("Uncertainty needs at least two measurements")
    point = tuple(_single_marginal(b, next(c for c in b.contexts if name in c), name) for name in names)
    return state_uncertainty(point)

