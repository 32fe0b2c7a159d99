#!/usr/bin/env python3
"""
Core model for finite operational theories.

A theory is a list of fiducial measurements and a finite list of pure
states, each given by one outcome distribution per measurement. All
probabilities are exact fractions. This module also owns the theory file
format (JSON validated with pydantic) and a seeded generator of random
regular theories.
"""

import json
import logging
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Literal, Mapping, Optional, Sequence, Tuple, Union

import pydantic
from pydantic import BaseModel, ConfigDict

from errors import MixtureError, NonUniformOutcomesError, ParseError, SchemaError, UnknownReferenceError

logger = logging.getLogger(__name__)

Rational = Fraction
Distribution = Tuple[Fraction, ...]
Point = Tuple[Distribution, ...]

_RATIONAL_RE = re.compile(r'^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$')


def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """Parse "p/q" or an integer string into a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParseError(f"Not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    match = _RATIONAL_RE.match(str(value))
    if not match:
        raise ParseError(f"Not a rational: {value!r}")
    numerator, denominator = match.group(1), match.group(2)
    if denominator is not None and int(denominator) == 0:
        raise ParseError(f"Zero denominator in {value!r}")
    return Fraction(int(numerator), int(denominator) if denominator else 1)


def format_rational(value: Fraction) -> str:
    """Canonical text form: "p/q" in lowest terms, or "k" for integers."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_point(point: Point) -> str:
    """Render a point as (a,b | c,d)."""
    return '(' + ' | '.join(','.join(format_rational(p) for p in dist) for dist in point) + ')'


def flatten(point: Point) -> Tuple[Fraction, ...]:
    return tuple(p for dist in point for p in dist)


@dataclass(frozen=True)
class Measurement:
    """A fiducial measurement with n outcomes indexed 0..n-1."""
    name: str
    outcome_count: int


@dataclass(frozen=True)
class PureState:
    """A pure state given by one outcome distribution per measurement."""
    name: str
    dists: Point

    def probability(self, measurement_index: int, outcome: int) -> Fraction:
        return self.dists[measurement_index][outcome]


@dataclass(frozen=True)
class Mixture:
    """Convex weights over pure-state names; zero weights are dropped."""
    weights: Tuple[Tuple[str, Fraction], ...]

    def __post_init__(self):
        cleaned = {}
        for name, weight in self.weights:
            weight = Fraction(weight)
            if weight < 0:
                raise MixtureError(f"Negative weight {format_rational(weight)} on {name}")
            if weight != 0:
                cleaned[name] = cleaned.get(name, Fraction(0)) + weight
        total = sum(cleaned.values(), Fraction(0))
        if total != 1:
            raise MixtureError(f"Mixture weights sum to {format_rational(total)}, expected 1")
        object.__setattr__(self, 'weights', tuple(sorted(cleaned.items())))

    @classmethod
    def of(cls, weights: Mapping[str, Union[Fraction, int, str]]) -> 'Mixture':
        return cls(tuple((name, parse_rational(w)) for name, w in weights.items()))

    @classmethod
    def pure(cls, name: str) -> 'Mixture':
        return cls(((name, Fraction(1)),))

    @classmethod
    def uniform(cls, names: Sequence[str]) -> 'Mixture':
        share = Fraction(1, len(names))
        return cls(tuple((name, share) for name in names))

    def as_dict(self) -> Dict[str, Fraction]:
        return dict(self.weights)

    def support(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.weights)

    def combine(self, other: 'Mixture', alpha: Fraction) -> 'Mixture':
        """alpha * self + (1 - alpha) * other."""
        merged: Dict[str, Fraction] = {}
        for name, w in self.weights:
            merged[name] = merged.get(name, Fraction(0)) + alpha * w
        for name, w in other.weights:
            merged[name] = merged.get(name, Fraction(0)) + (1 - alpha) * w
        return Mixture(tuple(merged.items()))

    def describe(self) -> str:
        return ' + '.join(f"{format_rational(w)}·{name}" for name, w in self.weights)


@dataclass(frozen=True)
class Theory:
    """Fiducial measurements, pure states and (optionally) an eigenstate map."""
    measurements: Tuple[Measurement, ...]
    pure_states: Tuple[PureState, ...]
    eigenstate_map: Tuple[Tuple[Tuple[str, int], str], ...] = ()

    def __post_init__(self):
        order = {m.name: i for i, m in enumerate(self.measurements)}
        entries = sorted(self.eigenstate_map, key=lambda e: (order.get(e[0][0], len(order)), e[0][0], e[0][1]))
        object.__setattr__(self, 'eigenstate_map', tuple(entries))

    @property
    def measurement_names(self) -> Tuple[str, ...]:
        return tuple(m.name for m in self.measurements)

    @property
    def state_names(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.pure_states)

    @property
    def eigenstates(self) -> Dict[Tuple[str, int], str]:
        return dict(self.eigenstate_map)

    def measurement_index(self, name: str) -> int:
        for i, m in enumerate(self.measurements):
            if m.name == name:
                return i
        raise UnknownReferenceError(f"Unknown measurement: {name}")

    def measurement(self, name: str) -> Measurement:
        return self.measurements[self.measurement_index(name)]

    def state(self, name: str) -> PureState:
        for s in self.pure_states:
            if s.name == name:
                return s
        raise UnknownReferenceError(f"Unknown pure state: {name}")

    def point(self, name: str) -> Point:
        return self.state(name).dists


@dataclass
class ValidationReport:
    """Invariant violations found in a theory; empty means valid."""
    violations: List[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_theory(t: Theory) -> ValidationReport:
    """Collect every invariant violation of a theory."""
    report = ValidationReport()
    seen = set()
    for m in t.measurements:
        if m.name in seen:
            report.violations.append(f"duplicate measurement name {m.name}")
        seen.add(m.name)
        if m.outcome_count < 2:
            report.violations.append(f"measurement {m.name} has {m.outcome_count} outcomes, need at least 2")

    seen = set()
    for s in t.pure_states:
        if s.name in seen:
            report.violations.append(f"duplicate state name {s.name}")
        seen.add(s.name)
        if len(s.dists) != len(t.measurements):
            report.violations.append(
                f"state {s.name} has {len(s.dists)} distributions for {len(t.measurements)} measurements")
            continue
        for m, dist in zip(t.measurements, s.dists):
            if len(dist) != m.outcome_count:
                report.violations.append(
                    f"state {s.name}: distribution for {m.name} has {len(dist)} entries, expected {m.outcome_count}")
            if any(p < 0 for p in dist):
                report.violations.append(f"state {s.name}: negative probability under {m.name}")
            total = sum(dist, Fraction(0))
            if total != 1:
                report.violations.append(
                    f"state {s.name}: distribution for {m.name} sums to {format_rational(total)}")

    names = set(t.state_names)
    for (measurement, outcome), state in t.eigenstate_map:
        if measurement not in t.measurement_names:
            report.violations.append(f"eigenstate entry refers to unknown measurement {measurement}")
            continue
        if state not in names:
            report.violations.append(f"eigenstate entry refers to unknown state {state}")
            continue
        index = t.measurement_index(measurement)
        if not 0 <= outcome < t.measurements[index].outcome_count:
            report.violations.append(f"eigenstate entry {measurement}={outcome} is out of range")
            continue
        dist = t.state(state).dists[index] if len(t.state(state).dists) > index else ()
        if len(dist) <= outcome or dist[outcome] != 1:
            report.violations.append(f"state {state} is not an eigenstate of {measurement}={outcome}")

    if report.valid:
        logger.debug(f"✅ Theory with {len(t.pure_states)} states is valid")
    else:
        logger.warning(f"⚠️ Theory has {len(report.violations)} violations")
    return report


def is_regular(t: Theory) -> bool:
    """True when the eigenstate map is total and every entry is a genuine eigenstate."""
    table = t.eigenstates
    for m in t.measurements:
        for a in range(m.outcome_count):
            if (m.name, a) not in table:
                return False
    return validate_theory(t).valid


def tomographic_dimension(t: Theory) -> int:
    return sum(m.outcome_count - 1 for m in t.measurements)


def uniform_outcome_count(t: Theory) -> int:
    """The common outcome count n; raises when measurements differ."""
    counts = {m.outcome_count for m in t.measurements}
    if len(counts) != 1:
        raise NonUniformOutcomesError(f"Measurements have differing outcome counts {sorted(counts)}")
    return counts.pop()


def mix(t: Theory, m: Mixture) -> Point:
    """Component-wise convex combination of the pure states in the mixture."""
    acc = [[Fraction(0)] * meas.outcome_count for meas in t.measurements]
    for name, weight in m.weights:
        state = t.state(name)
        for j, dist in enumerate(state.dists):
            for a, p in enumerate(dist):
                acc[j][a] += weight * p
    return tuple(tuple(row) for row in acc)


def theory_points(t: Theory, names: Optional[Iterable[str]] = None) -> Dict[str, Tuple[Fraction, ...]]:
    """Pure states as flat coordinate vectors, keyed by name."""
    wanted = t.state_names if names is None else tuple(names)
    return {name: flatten(t.point(name)) for name in wanted}


def unflatten(t: Theory, vector: Sequence[Fraction]) -> Point:
    out, start = [], 0
    for m in t.measurements:
        out.append(tuple(vector[start:start + m.outcome_count]))
        start += m.outcome_count
    return tuple(out)


def deterministic_outcome(state: PureState, measurement_index: int) -> Optional[int]:
    """The outcome returned with certainty, or None."""
    for a, p in enumerate(state.dists[measurement_index]):
        if p == 1:
            return a
    return None


def eigenstates_of(t: Theory, measurement: str, outcome: Optional[int] = None) -> List[str]:
    """Pure states returning (the given) outcome of the measurement with certainty."""
    index = t.measurement_index(measurement)
    found = []
    for s in t.pure_states:
        a = deterministic_outcome(s, index)
        if a is not None and (outcome is None or a == outcome):
            found.append(s.name)
    return found


# ---------------------------------------------------------------------------
# Theory documents
# ---------------------------------------------------------------------------

RationalText = Union[str, int]


class MeasurementEntry(BaseModel):
    model_config = ConfigDict(extra='forbid')
    name: str
    outcomes: int


class PureStateEntry(BaseModel):
    model_config = ConfigDict(extra='forbid')
    name: str
    dists: List[List[RationalText]]


class EigenstateEntry(BaseModel):
    model_config = ConfigDict(extra='forbid')
    measurement: str
    outcome: int
    state: str


class DisturbanceEntry(BaseModel):
    model_config = ConfigDict(extra='forbid')
    measurement: str
    state: str
    outcome: Optional[int] = None
    image: Dict[str, RationalText]


class OntologyEntry(BaseModel):
    model_config = ConfigDict(extra='forbid')
    kind: Literal['g', 's']
    intermediate_vertices: Optional[Dict[str, List[List[RationalText]]]] = None
    decompositions: Dict[str, Dict[str, RationalText]]


class TheoryDocument(BaseModel):
    """The on-disk theory format."""
    model_config = ConfigDict(extra='forbid')
    measurements: List[MeasurementEntry]
    pure_states: List[PureStateEntry]
    eigenstates: List[EigenstateEntry] = []
    disturbance: Optional[List[DisturbanceEntry]] = None
    ontology: Optional[OntologyEntry] = None


def parse_theory_document(document: Union[str, bytes, Mapping]) -> TheoryDocument:
    """Parse JSON text or an already-decoded mapping into a TheoryDocument."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise ParseError(f"Theory document is not valid JSON: {e}")
    try:
        return TheoryDocument.model_validate(document)
    except pydantic.ValidationError as e:
        raise SchemaError(f"Theory document does not match the schema: {e}")


def theory_from_document(doc: TheoryDocument) -> Theory:
    measurements = tuple(Measurement(m.name, m.outcomes) for m in doc.measurements)
    names = [m.name for m in measurements]
    if len(set(names)) != len(names):
        raise SchemaError(f"Duplicate measurement names in {names}")
    state_names = [s.name for s in doc.pure_states]
    if len(set(state_names)) != len(state_names):
        raise SchemaError(f"Duplicate state names in {state_names}")

    states = []
    for entry in doc.pure_states:
        dists = tuple(tuple(parse_rational(p) for p in dist) for dist in entry.dists)
        states.append(PureState(entry.name, dists))

    eigen = []
    for e in doc.eigenstates:
        if e.measurement not in names:
            raise UnknownReferenceError(f"Eigenstate entry refers to unknown measurement {e.measurement}")
        if e.state not in state_names:
            raise UnknownReferenceError(f"Eigenstate entry refers to unknown state {e.state}")
        eigen.append(((e.measurement, e.outcome), e.state))
    if len({key for key, _ in eigen}) != len(eigen):
        raise SchemaError("Duplicate eigenstate entries")
    return Theory(measurements, tuple(states), tuple(eigen))


def parse_theory(document: Union[str, bytes, Mapping]) -> Theory:
    """Parse a theory document (JSON text or mapping) into a Theory."""
    return theory_from_document(parse_theory_document(document))


def serialize_theory(t: Theory) -> Dict:
    """Canonical document for a theory; parse_theory inverts it exactly."""
    doc = {
        'measurements': [{'name': m.name, 'outcomes': m.outcome_count} for m in t.measurements],
        'pure_states': [
            {'name': s.name, 'dists': [[format_rational(p) for p in dist] for dist in s.dists]}
            for s in t.pure_states
        ],
    }
    if t.eigenstate_map:
        doc['eigenstates'] = [
            {'measurement': m, 'outcome': a, 'state': s} for (m, a), s in t.eigenstate_map
        ]
    return doc


def dump_document(document: Mapping) -> str:
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + '\n'


# ---------------------------------------------------------------------------
# Random regular theories
# ---------------------------------------------------------------------------

def _random_distribution(rng: random.Random, n: int, scale: int) -> Distribution:
    raw = [rng.randint(1, scale) for _ in range(n)]
    total = sum(raw)
    return tuple(Fraction(r, total) for r in raw)


def random_regular_theory(m: int, n: int, rng: random.Random, scale: int = 10 ** 6) -> Theory:
    """
    A regular theory with one eigenstate per (measurement, outcome).

    The eigenstate of A_j=a is deterministic on A_j; its other distributions are
    drawn with positive integer weights up to ``scale``.
    """
    names = ['X', 'Z', 'Y'][:m] if m <= 3 else [f"A{j}" for j in range(m)]
    measurements = tuple(Measurement(name, n) for name in names)
    states, eigen = [], []
    for j, name in enumerate(names):
        for a in range(n):
            dists = []
            for k in range(m):
                if k == j:
                    dists.append(tuple(Fraction(1 if b == a else 0) for b in range(n)))
                else:
                    dists.append(_random_distribution(rng, n, scale))
            state_name = f"{name}={a}"
            states.append(PureState(state_name, tuple(dists)))
            eigen.append(((name, a), state_name))
    return Theory(measurements, tuple(states), tuple(eigen))
