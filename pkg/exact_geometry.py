#!/usr/bin/env python3
"""
Exact affine and convex geometry over the rationals.

Simplex tests and affine dependencies are computed with sympy's exact
matrix routines. Linear feasibility and optimization use a two-phase
simplex method on Fractions with Bland's rule; infeasible systems come
back with a Farkas certificate that can be checked by direct
multiplication.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Sequence, Tuple, Union

import sympy

from core_model import Mixture, format_rational
from errors import InfeasibleError, InputError, UnboundedError

logger = logging.getLogger(__name__)

Vector = Tuple[Fraction, ...]
Row = Tuple[Tuple[Fraction, ...], Fraction]


# ---------------------------------------------------------------------------
# Constraint systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstraintSystem:
    """
    Linear equalities a·x = b and inequalities g·x >= h over named variables.
    """
    variables: Tuple[str, ...]
    equalities: Tuple[Row, ...] = ()
    inequalities: Tuple[Row, ...] = ()

    def __post_init__(self):
        width = len(self.variables)
        for coeffs, _ in self.equalities + self.inequalities:
            if len(coeffs) != width:
                raise ValueError(f"Constraint has {len(coeffs)} coefficients for {width} variables")

    def index(self, name: str) -> int:
        return self.variables.index(name)

    def describe(self) -> str:
        return (f"{len(self.variables)} variables, {len(self.equalities)} equalities, "
                f"{len(self.inequalities)} inequalities")


class ConstraintBuilder:
    """Incrementally assemble a ConstraintSystem from sparse named rows."""

    def __init__(self):
        self.variables: List[str] = []
        self._index: Dict[str, int] = {}
        self._equalities: List[Tuple[Dict[int, Fraction], Fraction]] = []
        self._inequalities: List[Tuple[Dict[int, Fraction], Fraction]] = []

    def add_variable(self, name: str, nonnegative: bool = False) -> str:
        if name in self._index:
            raise ValueError(f"Duplicate variable {name}")
        self._index[name] = len(self.variables)
        self.variables.append(name)
        if nonnegative:
            self.add_inequality({name: 1}, 0)
        return name

    def _sparse(self, terms: Mapping[str, Union[Fraction, int]]) -> Dict[int, Fraction]:
        row: Dict[int, Fraction] = {}
        for name, coeff in terms.items():
            if name not in self._index:
                raise KeyError(f"Unknown variable {name}")
            j = self._index[name]
            row[j] = row.get(j, Fraction(0)) + Fraction(coeff)
        return row

    def add_equality(self, terms: Mapping[str, Union[Fraction, int]], rhs: Union[Fraction, int]):
        self._equalities.append((self._sparse(terms), Fraction(rhs)))

    def add_inequality(self, terms: Mapping[str, Union[Fraction, int]], rhs: Union[Fraction, int]):
        """Σ coeff·x >= rhs."""
        self._inequalities.append((self._sparse(terms), Fraction(rhs)))

    def add_upper_bound(self, terms: Mapping[str, Union[Fraction, int]], rhs: Union[Fraction, int]):
        """Σ coeff·x <= rhs."""
        self.add_inequality({k: -Fraction(v) for k, v in terms.items()}, -Fraction(rhs))

    def _dense(self, rows) -> Tuple[Row, ...]:
        width = len(self.variables)
        out = []
        for sparse, rhs in rows:
            coeffs = [Fraction(0)] * width
            for j, c in sparse.items():
                coeffs[j] = c
            out.append((tuple(coeffs), rhs))
        return tuple(out)

    def build(self) -> ConstraintSystem:
        return ConstraintSystem(tuple(self.variables), self._dense(self._equalities),
                                self._dense(self._inequalities))


def _dot(coeffs: Sequence[Fraction], values: Sequence[Fraction]) -> Fraction:
    return sum((c * v for c, v in zip(coeffs, values) if c), Fraction(0))


def satisfies(cs: ConstraintSystem, assignment: Mapping[str, Fraction]) -> bool:
    """Check an assignment against every constraint exactly."""
    values = [Fraction(assignment.get(name, 0)) for name in cs.variables]
    return (all(_dot(a, values) == b for a, b in cs.equalities)
            and all(_dot(g, values) >= h for g, h in cs.inequalities))


# ---------------------------------------------------------------------------
# Solver results
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FarkasCertificate:
    """
    Multipliers λ (equalities, any sign) and μ >= 0 (inequalities) with
    Σλa + Σμg = 0 and Σλb + Σμh > 0, which no feasible point can satisfy.
    """
    equality_multipliers: Tuple[Fraction, ...]
    inequality_multipliers: Tuple[Fraction, ...]

    def combined_row(self, cs: ConstraintSystem) -> Row:
        width = len(cs.variables)
        coeffs = [Fraction(0)] * width
        rhs = Fraction(0)
        for lam, (a, b) in zip(self.equality_multipliers, cs.equalities):
            if lam:
                for j in range(width):
                    coeffs[j] += lam * a[j]
                rhs += lam * b
        for mu, (g, h) in zip(self.inequality_multipliers, cs.inequalities):
            if mu:
                for j in range(width):
                    coeffs[j] += mu * g[j]
                rhs += mu * h
        return tuple(coeffs), rhs

    def verify(self, cs: ConstraintSystem) -> bool:
        if len(self.equality_multipliers) != len(cs.equalities):
            return False
        if len(self.inequality_multipliers) != len(cs.inequalities):
            return False
        if any(mu < 0 for mu in self.inequality_multipliers):
            return False
        coeffs, rhs = self.combined_row(cs)
        return all(c == 0 for c in coeffs) and rhs > 0


@dataclass(frozen=True)
class Feasible:
    assignment: Dict[str, Fraction]

    def verify(self, cs: ConstraintSystem) -> bool:
        return satisfies(cs, self.assignment)


@dataclass(frozen=True)
class Infeasible:
    certificate: FarkasCertificate

    def verify(self, cs: ConstraintSystem) -> bool:
        return self.certificate.verify(cs)


@dataclass(frozen=True)
class Optimum:
    value: Fraction
    assignment: Dict[str, Fraction]


FeasibilityResult = Union[Feasible, Infeasible]


# ---------------------------------------------------------------------------
# Two-phase simplex
# ---------------------------------------------------------------------------

class ExactSimplex:
    """
    Two-phase tableau simplex over Fractions with Bland's anti-cycling rule.

    Single-variable rows c·x >= 0 (c > 0) become sign bounds; other
    variables are split into positive and negative parts. Inequalities get
    surplus columns and every row gets an artificial column.
    """

    def __init__(self, cs: ConstraintSystem):
        self.cs = cs
        self.logger = logging.getLogger('exact_geometry.simplex')
        self.pivots = 0
        self._build()

    def _build(self):
        cs = self.cs
        self.bound_row: Dict[int, int] = {}
        for k, (coeffs, rhs) in enumerate(cs.inequalities):
            nonzero = [(j, c) for j, c in enumerate(coeffs) if c != 0]
            if rhs == 0 and len(nonzero) == 1 and nonzero[0][1] > 0 and nonzero[0][0] not in self.bound_row:
                self.bound_row[nonzero[0][0]] = k

        self.columns: List[Tuple[str, int, int]] = []
        self.var_cols: Dict[int, List[Tuple[int, int]]] = {}
        for j in range(len(cs.variables)):
            signs = (1,) if j in self.bound_row else (1, -1)
            self.var_cols[j] = []
            for sign in signs:
                self.var_cols[j].append((len(self.columns), sign))
                self.columns.append(('var', j, sign))

        bound_rows = set(self.bound_row.values())
        self.rows: List[Tuple[str, int]] = [('eq', i) for i in range(len(cs.equalities))]
        self.rows += [('ineq', k) for k in range(len(cs.inequalities)) if k not in bound_rows]

        surplus_col = {}
        for r, (kind, _) in enumerate(self.rows):
            if kind == 'ineq':
                surplus_col[r] = len(self.columns)
                self.columns.append(('surplus', r, 1))
        self.n_struct = len(self.columns)
        for r in range(len(self.rows)):
            self.columns.append(('art', r, 1))
        width = len(self.columns)

        self.tableau: List[List[Fraction]] = []
        self.rhs: List[Fraction] = []
        self.basis: List[int] = []
        self.flips: List[int] = []
        for r, (kind, idx) in enumerate(self.rows):
            coeffs, b = cs.equalities[idx] if kind == 'eq' else cs.inequalities[idx]
            row = [Fraction(0)] * width
            for j, c in enumerate(coeffs):
                if c:
                    for col, sign in self.var_cols[j]:
                        row[col] = c * sign
            if kind == 'ineq':
                row[surplus_col[r]] = Fraction(-1)
            flip = -1 if b < 0 else 1
            if flip < 0:
                row = [-v for v in row]
            row[self.n_struct + r] = Fraction(1)
            self.tableau.append(row)
            self.rhs.append(flip * b)
            self.basis.append(self.n_struct + r)
            self.flips.append(flip)

    # -- tableau mechanics --------------------------------------------------

    def _pivot(self, r: int, c: int):
        self.pivots += 1
        pivot_row = self.tableau[r]
        p = pivot_row[c]
        if p != 1:
            pivot_row[:] = [v / p for v in pivot_row]
            self.rhs[r] /= p
        for i, row in enumerate(self.tableau):
            if i != r and row[c] != 0:
                factor = row[c]
                row[:] = [v - factor * pv if pv else v for v, pv in zip(row, pivot_row)]
                self.rhs[i] -= factor * self.rhs[r]
        factor = self.objective[c]
        if factor != 0:
            self.objective[:] = [v - factor * pv if pv else v for v, pv in zip(self.objective, pivot_row)]
            self.objective_rhs -= factor * self.rhs[r]
        self.basis[r] = c
        self.logger.debug(f"pivot {self.pivots}: row {r} column {c}")

    def _set_costs(self, costs: Sequence[Fraction]):
        """Reduced-cost row for the given column costs and current basis."""
        self.objective = list(costs)
        self.objective_rhs = Fraction(0)
        for i, b in enumerate(self.basis):
            cb = costs[b]
            if cb:
                row = self.tableau[i]
                self.objective = [v - cb * t if t else v for v, t in zip(self.objective, row)]
                self.objective_rhs -= cb * self.rhs[i]

    def _iterate(self, allowed: int) -> bool:
        """Run Bland iterations over columns < allowed. False means unbounded."""
        while True:
            entering = next((j for j in range(allowed) if self.objective[j] < 0), None)
            if entering is None:
                return True
            best = None
            for i, row in enumerate(self.tableau):
                a = row[entering]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self._pivot(best[1], entering)

    def _column_values(self) -> List[Fraction]:
        values = [Fraction(0)] * len(self.columns)
        for i, b in enumerate(self.basis):
            values[b] = self.rhs[i]
        return values

    def _assignment(self) -> Dict[str, Fraction]:
        values = self._column_values()
        out = {}
        for j, name in enumerate(self.cs.variables):
            out[name] = sum((sign * values[col] for col, sign in self.var_cols[j]), Fraction(0))
        return out

    # -- phases -------------------------------------------------------------

    def phase_one(self) -> FeasibilityResult:
        costs = [Fraction(0)] * self.n_struct + [Fraction(1)] * len(self.rows)
        self._set_costs(costs)
        self._iterate(len(self.columns))
        infeasibility = -self.objective_rhs
        if infeasibility > 0:
            certificate = self._farkas()
            self.logger.debug(f"❌ infeasible after {self.pivots} pivots (residual {format_rational(infeasibility)})")
            return Infeasible(certificate)
        self.logger.debug(f"✅ feasible after {self.pivots} pivots")
        return Feasible(self._assignment())

    def _farkas(self) -> FarkasCertificate:
        cs = self.cs
        # Phase-one duals: y_r = 1 - reduced cost of artificial r; u_r undoes the row flip.
        u = [self.flips[r] * (1 - self.objective[self.n_struct + r]) for r in range(len(self.rows))]
        lam = [Fraction(0)] * len(cs.equalities)
        mu = [Fraction(0)] * len(cs.inequalities)
        for r, (kind, idx) in enumerate(self.rows):
            if kind == 'eq':
                lam[idx] = u[r]
            else:
                mu[idx] = u[r]
        for j, k in self.bound_row.items():
            total = Fraction(0)
            for r, (kind, idx) in enumerate(self.rows):
                coeffs = cs.equalities[idx][0] if kind == 'eq' else cs.inequalities[idx][0]
                total += u[r] * coeffs[j]
            mu[k] = -total / cs.inequalities[k][0][j]
        certificate = FarkasCertificate(tuple(lam), tuple(mu))
        if not certificate.verify(cs):
            raise RuntimeError("Farkas certificate failed verification")
        return certificate

    def _drive_out_artificials(self):
        i = 0
        while i < len(self.tableau):
            if self.basis[i] >= self.n_struct:
                row = self.tableau[i]
                col = next((j for j in range(self.n_struct) if row[j] != 0), None)
                if col is None:
                    del self.tableau[i], self.rhs[i], self.basis[i], self.flips[i], self.rows[i]
                    continue
                self._pivot(i, col)
            i += 1

    def maximize(self, objective: Sequence[Fraction]) -> Optimum:
        first = self.phase_one()
        if isinstance(first, Infeasible):
            raise InfeasibleError("Cannot optimize over an infeasible system", first.certificate)
        self._drive_out_artificials()
        costs = [Fraction(0)] * len(self.columns)
        for col, (kind, j, sign) in enumerate(self.columns):
            if kind == 'var':
                costs[col] = -Fraction(objective[j]) * sign
        self._set_costs(costs)
        if not self._iterate(self.n_struct):
            raise UnboundedError("Objective is unbounded over the feasible set")
        assignment = self._assignment()
        value = sum((Fraction(objective[j]) * assignment[name]
                     for j, name in enumerate(self.cs.variables)), Fraction(0))
        self.logger.debug(f"✅ optimum {format_rational(value)} after {self.pivots} pivots")
        return Optimum(value, assignment)


def feasible(cs: ConstraintSystem) -> FeasibilityResult:
    """Decide feasibility exactly; returns a witness or a Farkas certificate."""
    return ExactSimplex(cs).phase_one()


def maximize(cs: ConstraintSystem, objective: Union[Sequence, Mapping[str, Fraction]]) -> Optimum:
    """Exact maximum of a linear objective; raises on infeasible or unbounded systems."""
    if isinstance(objective, Mapping):
        objective = [Fraction(objective.get(name, 0)) for name in cs.variables]
    if len(objective) != len(cs.variables):
        raise ValueError("Objective length does not match the variable count")
    return ExactSimplex(cs).maximize([Fraction(c) for c in objective])


def fourier_motzkin_feasible(cs: ConstraintSystem) -> bool:
    """Reference feasibility check by variable elimination; exponential, small systems only."""
    rows = [(list(a), b) for a, b in cs.inequalities]
    for a, b in cs.equalities:
        rows.append((list(a), b))
        rows.append(([-c for c in a], -b))

    def normalized(row):
        coeffs, rhs = row
        scale = next((abs(c) for c in coeffs if c != 0), None)
        if scale is None:
            return tuple(coeffs), rhs
        return tuple(c / scale for c in coeffs), rhs / scale

    for j in range(len(cs.variables)):
        positive = [r for r in rows if r[0][j] > 0]
        negative = [r for r in rows if r[0][j] < 0]
        kept = [r for r in rows if r[0][j] == 0]
        for pa, pb in positive:
            for na, nb in negative:
                cp, cn = pa[j], -na[j]
                coeffs = [cn * x + cp * y for x, y in zip(pa, na)]
                kept.append((coeffs, cn * pb + cp * nb))
        rows = [list(r) for r in {normalized(r) for r in kept}]
        rows = [(list(a), b) for a, b in rows]
    return all(b <= 0 for _, b in rows)


# ---------------------------------------------------------------------------
# Affine geometry
# ---------------------------------------------------------------------------

def _sympy_matrix(rows: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(v.numerator, v.denominator) for v in row] for row in rows])


def _fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _lifted_columns(points: Sequence[Sequence[Fraction]]) -> sympy.Matrix:
    """Matrix whose columns are (1, p) for each point."""
    if not points:
        raise InputError("Point set is empty")
    width = len(points[0])
    if any(len(p) != width for p in points):
        raise InputError("Points have different lengths")
    rows = [[Fraction(1)] * len(points)]
    for k in range(width):
        rows.append([Fraction(p[k]) for p in points])
    return _sympy_matrix(rows)


def affine_rank(points: Sequence[Sequence[Fraction]]) -> int:
    """Number of affinely independent points (affine dimension + 1)."""
    return _lifted_columns(points).rank()


def affine_dimension(points: Sequence[Sequence[Fraction]]) -> int:
    return affine_rank(points) - 1


def is_simplex(points: Sequence[Sequence[Fraction]]) -> bool:
    """True iff the points are affinely independent."""
    points = list(points.values()) if isinstance(points, Mapping) else list(points)
    return affine_rank(points) == len(points)


@dataclass(frozen=True)
class AffineDependency:
    """Two distinct mixtures of pure states describing the same point."""
    left: Mixture
    right: Mixture

    def holds(self, points: Mapping[str, Sequence[Fraction]]) -> bool:
        return mix_vectors(points, self.left) == mix_vectors(points, self.right)

    def describe(self) -> str:
        return f"{self.left.describe()} = {self.right.describe()}"


def mix_vectors(points: Mapping[str, Sequence[Fraction]], mixture: Mixture) -> Vector:
    width = len(next(iter(points.values())))
    acc = [Fraction(0)] * width
    for name, weight in mixture.weights:
        for k, v in enumerate(points[name]):
            acc[k] += weight * v
    return tuple(acc)


def _dependency_from_vector(names: Sequence[str], vector: Sequence[Fraction]) -> AffineDependency:
    leading = next(c for c in vector if c != 0)
    if leading < 0:
        vector = [-c for c in vector]
    positive = sum((c for c in vector if c > 0), Fraction(0))
    left = Mixture(tuple((name, c / positive) for name, c in zip(names, vector) if c > 0))
    right = Mixture(tuple((name, -c / positive) for name, c in zip(names, vector) if c < 0))
    return AffineDependency(left, right)


def nonsimpliciality_conditions(points: Mapping[str, Sequence[Fraction]]) -> List[AffineDependency]:
    """
    A basis of the affine dependencies among named points, each written as
    an equality of two convex mixtures. Names are processed in sorted order.
    """
    if len(points) < 2:
        return []
    names = sorted(points)
    matrix = _lifted_columns([points[name] for name in names])
    conditions = []
    for null_vector in matrix.nullspace():
        vector = [_fraction(v) for v in null_vector]
        conditions.append(_dependency_from_vector(names, vector))
    logger.debug(f"🔍 {len(conditions)} nonsimpliciality conditions among {len(names)} points")
    return conditions


# ---------------------------------------------------------------------------
# Hull membership
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeparatingFunctional:
    """f(v) = coefficients·v + offset, positive on the query and <= 0 on every point."""
    coefficients: Vector
    offset: Fraction

    def evaluate(self, vector: Sequence[Fraction]) -> Fraction:
        return _dot(self.coefficients, vector) + self.offset

    def verify(self, points: Mapping[str, Sequence[Fraction]], query: Sequence[Fraction]) -> bool:
        return self.evaluate(query) > 0 and all(self.evaluate(p) <= 0 for p in points.values())


@dataclass(frozen=True)
class Inside:
    mixture: Mixture

    def verify(self, points: Mapping[str, Sequence[Fraction]], query: Sequence[Fraction]) -> bool:
        return mix_vectors(points, self.mixture) == tuple(Fraction(q) for q in query)


@dataclass(frozen=True)
class Outside:
    functional: SeparatingFunctional

    def verify(self, points: Mapping[str, Sequence[Fraction]], query: Sequence[Fraction]) -> bool:
        return self.functional.verify(points, query)


def membership_system(points: Mapping[str, Sequence[Fraction]], query: Sequence[Fraction]) -> ConstraintSystem:
    builder = ConstraintBuilder()
    for name in points:
        builder.add_variable(name, nonnegative=True)
    builder.add_equality({name: 1 for name in points}, 1)
    for k, q in enumerate(query):
        builder.add_equality({name: p[k] for name, p in points.items()}, q)
    return builder.build()


def hull_membership(points: Mapping[str, Sequence[Fraction]], query: Sequence[Fraction]) -> Union[Inside, Outside]:
    """Exact convex-hull membership with a certificate either way."""
    if isinstance(points, Mapping):
        points = dict(points)
    else:
        points = {f"p{i}": p for i, p in enumerate(points)}
    if any(len(p) != len(query) for p in points.values()):
        raise InputError("Query and points have different lengths")
    cs = membership_system(points, query)
    result = feasible(cs)
    if isinstance(result, Feasible):
        return Inside(Mixture(tuple(result.assignment.items())))
    lam = result.certificate.equality_multipliers
    functional = SeparatingFunctional(tuple(lam[1:]), lam[0])
    return Outside(functional)
