#!/usr/bin/env python3
"""
Ontological models built on an underlying simplex.

The underlying simplex has one ontic point per joint value assignment of
the fiducial measurements. A compression sends it to an intermediate
space (the gdit polytope for g-type models, a D-simplex for s-type
models); each operational pure state is an exact distribution over ontic
points whose push-forward reproduces it. Coherent operations are searched
as permutations of ontic points, and operationally equal mixtures with
different ontic images witness preparation contextuality.
"""

import json
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import pydantic
from pydantic import BaseModel, ConfigDict

from core_model import (
    Mixture,
    OntologyEntry,
    Point,
    Theory,
    flatten,
    format_rational,
    mix,
    parse_rational,
    tomographic_dimension,
)
from errors import (
    DecompositionError,
    GuardExceededError,
    InputError,
    MixtureError,
    ParseError,
    SchemaError,
    UnknownReferenceError,
)
from exact_geometry import affine_dimension, is_simplex
from gdit import Correspondence
from settings import get_settings

logger = logging.getLogger(__name__)

Values = Tuple[int, ...]


@dataclass(frozen=True)
class OnticPoint:
    """A vertex of the underlying simplex: one value per fiducial measurement."""
    name: str
    values: Values


def underlying_simplex(t: Theory) -> Tuple[OnticPoint, ...]:
    """All value tuples in lexicographic order, named lambda1, lambda2, ..."""
    ranges = [range(m.outcome_count) for m in t.measurements]
    return tuple(OnticPoint(f"lambda{k + 1}", vals) for k, vals in enumerate(product(*ranges)))


def deterministic_point(outcome_counts: Sequence[int], values: Sequence[int]) -> Point:
    return tuple(tuple(Fraction(1 if b == v else 0) for b in range(n)) for n, v in zip(outcome_counts, values))


def compress_vertex(values: Sequence[int]) -> Values:
    """An ontic vertex x⊗z⊗... compresses to the gdit vertex (x, z, ...)."""
    return tuple(values)


def compress_g(outcome_counts: Sequence[int], weights: Sequence[Fraction]) -> Point:
    """
    Affine extension of the vertex compression: barycentric weights over the
    ontic points (lexicographic order) to the operational point.
    """
    tuples = list(product(*(range(n) for n in outcome_counts)))
    if len(weights) != len(tuples):
        raise InputError(f"Expected {len(tuples)} barycentric weights, got {len(weights)}")
    acc = [[Fraction(0)] * n for n in outcome_counts]
    for w, vals in zip(weights, tuples):
        for j, v in enumerate(vals):
            acc[j][v] += Fraction(w)
    return tuple(tuple(row) for row in acc)


def cartesian(point: Point) -> Tuple[Fraction, ...]:
    """Probability of outcome 1 for each binary measurement."""
    return tuple(dist[1] for dist in point)


@dataclass(frozen=True)
class OnticModel:
    """Ontic points, their images in the intermediate space, and per-state distributions."""
    kind: str
    theory: Theory
    ontic_points: Tuple[str, ...]
    intermediate_vertices: Tuple[Tuple[str, Point], ...]
    state_distributions: Tuple[Tuple[str, Tuple[Tuple[str, Fraction], ...]], ...]

    def vertex(self, name: str) -> Point:
        return dict(self.intermediate_vertices)[name]

    @property
    def states(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.state_distributions)

    def distribution(self, state: str) -> Dict[str, Fraction]:
        table = dict(self.state_distributions)
        if state not in table:
            raise UnknownReferenceError(f"No ontic distribution for state {state}")
        weights = dict(table[state])
        return {name: weights.get(name, Fraction(0)) for name in self.ontic_points}

    def distribution_vector(self, state: str) -> Tuple[Fraction, ...]:
        dist = self.distribution(state)
        return tuple(dist[name] for name in self.ontic_points)

    def mixture_distribution(self, mixture: Mixture) -> Tuple[Fraction, ...]:
        acc = [Fraction(0)] * len(self.ontic_points)
        for state, q in mixture.weights:
            for k, w in enumerate(self.distribution_vector(state)):
                acc[k] += q * w
        return tuple(acc)

    def push_forward(self, weights: Mapping[str, Fraction]) -> Point:
        acc = [[Fraction(0)] * m.outcome_count for m in self.theory.measurements]
        for name, w in weights.items():
            if not w:
                continue
            for j, dist in enumerate(self.vertex(name)):
                for a, p in enumerate(dist):
                    acc[j][a] += w * p
        return tuple(tuple(row) for row in acc)

    def intermediate_dimension(self) -> int:
        return affine_dimension([flatten(p) for _, p in self.intermediate_vertices])

    def problems(self) -> List[str]:
        """Every distribution that is invalid or fails to reproduce its state."""
        found = []
        for state, weights in self.state_distributions:
            weights = dict(weights)
            if any(w < 0 for w in weights.values()):
                found.append(f"{state}: negative ontic weight")
            total = sum(weights.values(), Fraction(0))
            if total != 1:
                found.append(f"{state}: ontic weights sum to {format_rational(total)}")
            if self.push_forward(weights) != self.theory.point(state):
                found.append(f"{state}: push-forward does not reproduce the state")
        return found

    def verify(self) -> bool:
        return not self.problems() and self.intermediate_dimension() == tomographic_dimension(self.theory)


def _make_model(kind: str, t: Theory, ontic_points: Sequence[str], vertices: Mapping[str, Point],
                distributions: Mapping[str, Mapping[str, Fraction]]) -> OnticModel:
    model = OnticModel(
        kind=kind,
        theory=t,
        ontic_points=tuple(ontic_points),
        intermediate_vertices=tuple((name, vertices[name]) for name in ontic_points),
        state_distributions=tuple(
            (state, tuple((name, Fraction(w)) for name, w in sorted(dist.items()) if w))
            for state, dist in distributions.items()
        ),
    )
    problems = model.problems()
    if problems:
        raise DecompositionError(f"Ontic model does not reproduce the theory: {'; '.join(problems)}")
    return model


def _gdit_vertices(t: Theory) -> Tuple[List[str], Dict[str, Point], Dict[Values, str]]:
    counts = [m.outcome_count for m in t.measurements]
    points = underlying_simplex(t)
    names = [p.name for p in points]
    vertices = {p.name: deterministic_point(counts, compress_vertex(p.values)) for p in points}
    by_values = {p.values: p.name for p in points}
    return names, vertices, by_values


def ontic_distributions_g(c: Correspondence) -> OnticModel:
    """Lift each regular state's gdit decomposition to the underlying simplex."""
    t = c.regular
    names, vertices, by_values = _gdit_vertices(t)
    distributions = {}
    for state, decomposition in c.decompositions:
        dist: Dict[str, Fraction] = {}
        for vertex, w in decomposition.weights:
            ontic = by_values[c.gdit.vertex_values(vertex)]
            dist[ontic] = dist.get(ontic, Fraction(0)) + w
        distributions[state] = dist
    model = _make_model('g', t, names, vertices, distributions)
    logger.info(f"✅ g-type model with {len(names)} ontic points for {len(distributions)} states")
    return model


def ontic_distributions_product(t: Theory) -> OnticModel:
    """g-type model where each state's ontic distribution is the product of its marginals."""
    names, vertices, by_values = _gdit_vertices(t)
    distributions = {}
    for s in t.pure_states:
        dist = {}
        for vals, name in by_values.items():
            w = Fraction(1)
            for j, v in enumerate(vals):
                w *= s.dists[j][v]
            dist[name] = w
        distributions[s.name] = dist
    return _make_model('g', t, names, vertices, distributions)


def ontic_distributions_s(t: Theory, intermediate_vertices: Mapping[str, Point],
                          decompositions: Mapping[str, Mapping[str, Fraction]]) -> OnticModel:
    """s-type model from user-supplied D+1 intermediate vertices and state decompositions."""
    dimension = tomographic_dimension(t)
    if len(intermediate_vertices) != dimension + 1:
        raise DecompositionError(
            f"An s-type model needs {dimension + 1} intermediate vertices, got {len(intermediate_vertices)}")
    if not is_simplex([flatten(p) for p in intermediate_vertices.values()]):
        raise DecompositionError("Intermediate vertices are affinely dependent")
    for state in decompositions:
        t.state(state)
    model = _make_model('s', t, list(intermediate_vertices), intermediate_vertices, decompositions)
    logger.info(f"✅ s-type model on {len(intermediate_vertices)} intermediate vertices")
    return model


def identity_model(t: Theory) -> OnticModel:
    """For a simplicial theory: the pure states are their own intermediate vertices."""
    vertices = {s.name: s.dists for s in t.pure_states}
    return ontic_distributions_s(t, vertices, {s.name: {s.name: Fraction(1)} for s in t.pure_states})


def _parse_values(text: str, t: Theory) -> Values:
    parts = text.split(',') if ',' in text else list(text)
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"Ontic point {text!r} is not a value tuple")
    if len(values) != len(t.measurements) or any(
            not 0 <= v < m.outcome_count for v, m in zip(values, t.measurements)):
        raise ParseError(f"Ontic point {text!r} does not match the measurements")
    return values


def model_from_document(t: Theory, entry: OntologyEntry) -> OnticModel:
    """Build the model described by a theory file's ontology section."""
    decompositions = {
        state: {key: parse_rational(w) for key, w in weights.items()}
        for state, weights in entry.decompositions.items()
    }
    if entry.kind == 'g':
        names, vertices, by_values = _gdit_vertices(t)
        distributions = {}
        for state, weights in decompositions.items():
            t.state(state)
            distributions[state] = {by_values[_parse_values(key, t)]: w for key, w in weights.items()}
        return _make_model('g', t, names, vertices, distributions)
    if not entry.intermediate_vertices:
        raise SchemaError("An s-type ontology needs intermediate_vertices")
    vertices = {
        name: tuple(tuple(parse_rational(p) for p in dist) for dist in dists)
        for name, dists in entry.intermediate_vertices.items()
    }
    return ontic_distributions_s(t, vertices, decompositions)


# ---------------------------------------------------------------------------
# Coherent operations
# ---------------------------------------------------------------------------

class CoherentMapDocument(BaseModel):
    model_config = ConfigDict(extra='forbid')
    map: Dict[str, str]


@dataclass(frozen=True)
class CoherentMap:
    """A permutation of (some of) the operational pure states."""
    pairs: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        sources = [a for a, _ in self.pairs]
        targets = [b for _, b in self.pairs]
        if len(set(sources)) != len(sources) or set(sources) != set(targets):
            raise InputError("A coherent map must be a bijection of its states")

    @classmethod
    def of(cls, mapping: Mapping[str, str]) -> 'CoherentMap':
        return cls(tuple(mapping.items()))

    def as_dict(self) -> Dict[str, str]:
        return dict(self.pairs)


def parse_coherent_map(document: Union[str, bytes, Mapping]) -> CoherentMap:
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise ParseError(f"Map document is not valid JSON: {e}")
    try:
        doc = CoherentMapDocument.model_validate(document)
    except pydantic.ValidationError as e:
        raise SchemaError(f"Map document does not match the schema: {e}")
    return CoherentMap.of(doc.map)


@dataclass(frozen=True)
class Found:
    """σ with μ_target(i)(σ(λ)) = μ_i(λ) for every mapped state i."""
    permutation: Tuple[Tuple[str, str], ...]
    nodes: int

    def as_dict(self) -> Dict[str, str]:
        return dict(self.permutation)

    def verify(self, model: OnticModel, target: CoherentMap) -> bool:
        sigma = self.as_dict()
        if sorted(sigma) != sorted(model.ontic_points) or sorted(sigma.values()) != sorted(model.ontic_points):
            return False
        for source, image in target.pairs:
            before = model.distribution(source)
            after = model.distribution(image)
            if any(after[sigma[point]] != before[point] for point in model.ontic_points):
                return False
        return True


@dataclass(frozen=True)
class Impossible:
    """No permutation exists: some ontic signature occurs a different number of times."""
    signature: Tuple[Fraction, ...]
    source_count: int
    target_count: int

    def verify(self, model: OnticModel, target: CoherentMap) -> bool:
        sources, targets = _signatures(model, target)
        return (Counter(sources.values())[self.signature] == self.source_count
                and Counter(targets.values())[self.signature] == self.target_count
                and self.source_count != self.target_count)


def _signatures(model: OnticModel, target: CoherentMap):
    domain = [a for a, _ in target.pairs]
    images = [b for _, b in target.pairs]
    for state in domain:
        model.distribution(state)
    source = {p: tuple(model.distribution(i)[p] for i in domain) for p in model.ontic_points}
    image = {p: tuple(model.distribution(i)[p] for i in images) for p in model.ontic_points}
    return source, image


def find_ontic_permutation(model: OnticModel, target: CoherentMap,
                           node_limit: Optional[int] = None) -> Union[Found, Impossible]:
    """Exhaustive search for an ontic permutation implementing the coherent map."""
    limit = node_limit if node_limit is not None else get_settings().permutation_node_limit
    source, image = _signatures(model, target)

    source_counts, image_counts = Counter(source.values()), Counter(image.values())
    if source_counts != image_counts:
        for signature in sorted(set(source_counts) | set(image_counts)):
            if source_counts[signature] != image_counts[signature]:
                logger.info(f"❌ No ontic permutation: signature {signature} occurs "
                            f"{source_counts[signature]} vs {image_counts[signature]} times")
                return Impossible(signature, source_counts[signature], image_counts[signature])

    points = list(model.ontic_points)
    assignment: Dict[str, str] = {}
    used = set()
    nodes = 0

    def search(k: int) -> bool:
        nonlocal nodes
        if k == len(points):
            return True
        point = points[k]
        for candidate in points:
            if candidate in used or image[candidate] != source[point]:
                continue
            nodes += 1
            if nodes > limit:
                raise GuardExceededError(f"Permutation search exceeded {limit} nodes")
            assignment[point] = candidate
            used.add(candidate)
            if search(k + 1):
                return True
            used.discard(candidate)
            del assignment[point]
        return False

    if not search(0):
        # Equal signature multisets always admit a matching.
        raise RuntimeError("Permutation search failed despite matching signatures")
    found = Found(tuple((p, assignment[p]) for p in points), nodes)
    logger.info(f"✅ Ontic permutation found after {nodes} nodes")
    return found


# ---------------------------------------------------------------------------
# Preparation contextuality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """Operationally equal mixtures with different ontic distributions."""
    left: Tuple[Fraction, ...]
    right: Tuple[Fraction, ...]
    support_affinely_dependent: bool


@dataclass(frozen=True)
class NoWitness:
    distribution: Tuple[Fraction, ...]


def prep_contextuality_witness(model: OnticModel, mix_a: Mixture, mix_b: Mixture) -> Union[Witness, NoWitness]:
    if mix(model.theory, mix_a) != mix(model.theory, mix_b):
        raise MixtureError("The mixtures describe different operational states")
    left = model.mixture_distribution(mix_a)
    right = model.mixture_distribution(mix_b)
    if left == right:
        return NoWitness(left)
    support = [name for name, a, b in zip(model.ontic_points, left, right) if a or b]
    dependent = not is_simplex([flatten(model.vertex(name)) for name in support])
    logger.info(f"✅ Preparation contextuality witnessed on {len(support)} ontic points")
    return Witness(left, right, dependent)
