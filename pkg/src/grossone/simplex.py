"""Primal simplex for standard-form LPs with pluggable pivot rules.

Problems are ``min <c, x>  s.t.  A x = b, x >= 0`` with exact rational data.
Entering rules: Dantzig (most negative reduced cost), Bland (smallest index),
or a fixed user-supplied preference order.  Leaving rules:

* ``plain``: textbook minimum-ratio test, ties broken by smallest basis
  position.  Cycles on degenerate problems by design (it is the baseline the
  anti-cycling rules are measured against).
* ``grossone``: the right-hand side is perturbed to ``b + A_B0 @ e`` with
  ``e = (G^-1, ..., G^-m)`` and B0 the initial (phase-one terminal) ordered
  basis.  Every ratio becomes a distinct gross-number, so the minimum is
  unique and the method terminates; two equal ratios signal a broken
  invariant and raise RatioTieError.
* ``lexicographic``: the classical tie-break over successive columns of
  ``A_B^-1 A_B0``, in plain rational arithmetic.  It is the independent
  oracle: it must select the same row as the grossone rule at every pivot.

All iteration linear algebra is exact (fresh rational solves per pivot; no
factorization updates — instances are desk-scale).  Every pivot is logged in
a PivotTrace, including the perturbed objective as a gross-number, which
strictly decreases under the grossone rule.
"""

from __future__ import annotations

import enum
import itertools
import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .arith import GrossNumber, ZERO, as_gross, compare
from .linalg import (
    GrossVector,
    SingularMatrixError,
    solve_rational_columns,
    solve_rational_vector,
)

__all__ = [
    "Basis",
    "LpFormatError",
    "LpStandardForm",
    "PivotEvent",
    "PivotTrace",
    "RankDeficiencyError",
    "RatioTieError",
    "SolveOutcome",
    "SolveStatus",
    "choose_entering",
    "enumerate_vertices_oracle",
    "parse_lp",
    "perturbed_objective",
    "perturbed_rhs",
    "phase1",
    "random_degenerate_lp",
    "ratio_test_grossone",
    "ratio_test_lexicographic",
    "ratio_test_plain",
    "reduced_costs",
    "solve",
]

ENTERING_RULES = ("dantzig", "bland", "fixed_order")
LEAVING_RULES = ("plain", "grossone", "lexicographic")


class RankDeficiencyError(ValueError):
    """The constraint matrix has rank below m (detected in phase one)."""


class RatioTieError(RuntimeError):
    """Two perturbed ratios compared equal: a uniqueness invariant is broken."""


class LpFormatError(ValueError):
    """Malformed LP instance text."""


@dataclass(frozen=True)
class LpStandardForm:
    """min <c, x>  s.t.  A x = b, x >= 0, with A of full row rank m <= n."""

    a: Tuple[Tuple[Fraction, ...], ...]
    b: Tuple[Fraction, ...]
    c: Tuple[Fraction, ...]

    def __post_init__(self) -> None:
        a = tuple(tuple(Fraction(v) for v in row) for row in self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", tuple(Fraction(v) for v in self.b))
        object.__setattr__(self, "c", tuple(Fraction(v) for v in self.c))
        if not a or not a[0]:
            raise ValueError("A must be nonempty")
        n = len(a[0])
        if any(len(row) != n for row in a):
            raise ValueError("rows of A must have equal length")
        if len(self.b) != len(a):
            raise ValueError("b must have one entry per row of A")
        if len(self.c) != n:
            raise ValueError("c must have one entry per column of A")
        if len(a) > n:
            raise ValueError("standard form requires m <= n")

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def n(self) -> int:
        return len(self.a[0])

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(row[j] for row in self.a)


@dataclass(frozen=True)
class Basis:
    """Ordered basis: position k corresponds to row k of the basis system.

    The order matters — it fixes which infinitesimal G^-(k+1) perturbs which
    initial basic column.
    """

    indices: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "indices", tuple(self.indices))
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("basis indices must be distinct")

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, j: int) -> bool:
        return j in self.indices

    def complement(self, n: int) -> Tuple[int, ...]:
        members = set(self.indices)
        return tuple(j for j in range(n) if j not in members)

    def replaced(self, position: int, j: int) -> "Basis":
        indices = list(self.indices)
        indices[position] = j
        return Basis(tuple(indices))


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"
    CYCLE_DETECTED = "cycle_detected"
    ITERATION_LIMIT = "iteration_limit"


@dataclass
class PivotEvent:
    """One pivot: the basis it starts from and the perturbed objective there."""

    iteration: int
    basis: Tuple[int, ...]
    entering: int
    leaving: int
    objective: GrossNumber


@dataclass
class PivotTrace:
    events: List[PivotEvent] = field(default_factory=list)

    def format_lines(self) -> List[str]:
        # Column indices are printed 1-based (x1..xn convention).
        return [
            f"iter={e.iteration} enter={e.entering + 1} leave={e.leaving + 1} obj={e.objective}"
            for e in self.events
        ]


@dataclass
class SolveOutcome:
    status: SolveStatus
    x: Optional[Tuple[Fraction, ...]]
    value: Optional[Fraction]
    trace: PivotTrace
    final_basis: Optional[Basis] = None
    final_objective: Optional[GrossNumber] = None


# -- per-basis computations ------------------------------------------------------


def _basis_matrix(lp: LpStandardForm, basis: Basis) -> List[List[Fraction]]:
    return [[lp.a[i][j] for j in basis] for i in range(lp.m)]


def basic_solution(lp: LpStandardForm, basis: Basis) -> List[Fraction]:
    """x_B = A_B^-1 b."""
    return solve_rational_vector(_basis_matrix(lp, basis), lp.b)


def reduced_costs(lp: LpStandardForm, basis: Basis) -> Dict[int, Fraction]:
    """Exact reduced costs of the nonbasic columns (pricing vector solve)."""
    transpose = [[lp.a[i][j] for i in range(lp.m)] for j in basis]
    prices = solve_rational_vector(transpose, [lp.c[j] for j in basis])
    costs: Dict[int, Fraction] = {}
    for j in basis.complement(lp.n):
        costs[j] = lp.c[j] - sum(lp.a[i][j] * prices[i] for i in range(lp.m))
    return costs


def choose_entering(
    costs: Mapping[int, Fraction],
    rule: str = "dantzig",
    order: Optional[Sequence[int]] = None,
) -> Optional[int]:
    """Pick the entering column, or None when all reduced costs are >= 0."""
    negatives = {j: c for j, c in costs.items() if c < 0}
    if not negatives:
        return None
    if rule == "dantzig":
        return min(negatives, key=lambda j: (negatives[j], j))
    if rule == "bland":
        return min(negatives)
    if rule == "fixed_order":
        if order is None:
            raise ValueError("fixed_order rule needs a preference order")
        for j in order:
            if j in negatives:
                return j
        raise ValueError("preference order does not cover all candidate columns")
    raise ValueError(f"unknown entering rule {rule!r}")


def _entering_direction(lp: LpStandardForm, basis: Basis, entering: int) -> List[Fraction]:
    return solve_rational_vector(_basis_matrix(lp, basis), lp.column(entering))


def perturbed_rhs(lp: LpStandardForm, basis: Basis, base_basis: Basis) -> GrossVector:
    """A_B^-1 b + (A_B^-1 A_B0) e with e = (G^-1, ..., G^-m).

    The finite part of each entry is exactly (A_B^-1 b)_i; the perturbation
    only adds infinitesimals.
    """
    a_b = _basis_matrix(lp, basis)
    xb = solve_rational_vector(a_b, lp.b)
    carried = solve_rational_columns(a_b, [lp.column(j) for j in base_basis])
    entries = []
    for i in range(lp.m):
        terms = [(0, xb[i])]
        terms.extend((-(k + 1), carried[k][i]) for k in range(len(base_basis)))
        entries.append(GrossNumber(terms))
    return GrossVector(entries)


def perturbed_objective(lp: LpStandardForm, basis: Basis, base_basis: Basis) -> GrossNumber:
    """Objective of the perturbed problem at the current basis, a gross-number."""
    rhs = perturbed_rhs(lp, basis, base_basis)
    total = ZERO
    for position, j in enumerate(basis):
        total = total + rhs[position] * as_gross(lp.c[j])
    return total


# -- leaving rules ----------------------------------------------------------------


def ratio_test_plain(lp: LpStandardForm, basis: Basis, entering: int) -> Optional[int]:
    """Textbook ratio test; ties go to the smallest basis position.

    Returns the leaving row, or None when the entering direction is
    nonpositive (problem unbounded below).  The tie-break deliberately
    reproduces classic cycling on degenerate instances.
    """
    direction = _entering_direction(lp, basis, entering)
    xb = basic_solution(lp, basis)
    best_row = None
    best_ratio = None
    for i in range(lp.m):
        if direction[i] <= 0:
            continue
        ratio = xb[i] / direction[i]
        if best_ratio is None or ratio < best_ratio:
            best_row, best_ratio = i, ratio
    return best_row


def ratio_test_grossone(
    lp: LpStandardForm,
    basis: Basis,
    base_basis: Basis,
    entering: int,
) -> Optional[int]:
    """Ratio test on the infinitesimally perturbed right-hand side.

    Each candidate ratio is the gross-number (perturbed rhs)_i / direction_i
    (exact: the divisor is a plain rational).  The perturbation makes all
    ratios distinct, so the minimum is attained at a unique row; an observed
    tie means the rows of A_B^-1 A_B0 were not independent and raises
    RatioTieError.
    """
    direction = _entering_direction(lp, basis, entering)
    candidate_rows = [i for i in range(lp.m) if direction[i] > 0]
    if not candidate_rows:
        return None
    rhs = perturbed_rhs(lp, basis, base_basis)
    ratios = {i: rhs[i] * as_gross(1 / direction[i]) for i in candidate_rows}
    best_row = candidate_rows[0]
    for i in candidate_rows[1:]:
        if compare(ratios[i], ratios[best_row]) < 0:
            best_row = i
    ties = [i for i in candidate_rows if i != best_row and compare(ratios[i], ratios[best_row]) == 0]
    if ties:
        raise RatioTieError(
            f"perturbed ratios tie between rows {best_row} and {ties[0]}; "
            "rows of the carried initial basis are not independent"
        )
    return best_row


def ratio_test_lexicographic(
    lp: LpStandardForm,
    basis: Basis,
    base_basis: Basis,
    entering: int,
) -> Optional[int]:
    """Classical lexicographic leaving rule, rational arithmetic only.

    Minimum ratio first; surviving ties are broken column by column of
    A_B^-1 A_B0 until a single row remains.
    """
    direction = _entering_direction(lp, basis, entering)
    candidate_rows = [i for i in range(lp.m) if direction[i] > 0]
    if not candidate_rows:
        return None
    xb = basic_solution(lp, basis)
    survivors = _argmin_rows(candidate_rows, {i: xb[i] / direction[i] for i in candidate_rows})
    if len(survivors) == 1:
        return survivors[0]
    carried = solve_rational_columns(
        _basis_matrix(lp, basis), [lp.column(j) for j in base_basis]
    )
    for k in range(len(base_basis)):
        survivors = _argmin_rows(
            survivors, {i: carried[k][i] / direction[i] for i in survivors}
        )
        if len(survivors) == 1:
            return survivors[0]
    raise RatioTieError(
        "lexicographic tie-break exhausted every column without a unique row"
    )


def _argmin_rows(rows: Sequence[int], values: Mapping[int, Fraction]) -> List[int]:
    minimum = min(values[i] for i in rows)
    return [i for i in rows if values[i] == minimum]


# -- the simplex loop --------------------------------------------------------------


def _leaving_row(lp, basis, base_basis, entering, rule):
    if rule == "plain":
        return ratio_test_plain(lp, basis, entering)
    if rule == "grossone":
        return ratio_test_grossone(lp, basis, base_basis, entering)
    if rule == "lexicographic":
        return ratio_test_lexicographic(lp, basis, base_basis, entering)
    raise ValueError(f"unknown leaving rule {rule!r}")


def _point_from_basis(lp: LpStandardForm, basis: Basis) -> Tuple[Tuple[Fraction, ...], Fraction]:
    xb = basic_solution(lp, basis)
    x = [Fraction(0)] * lp.n
    for position, j in enumerate(basis):
        x[j] = xb[position]
    value = sum(cj * xj for cj, xj in zip(lp.c, x))
    return tuple(x), value


def _simplex_loop(
    lp: LpStandardForm,
    start: Basis,
    entering_rule: str,
    leaving_rule: str,
    order: Optional[Sequence[int]],
    max_iter: int,
) -> SolveOutcome:
    base_basis = start
    basis = start
    trace = PivotTrace()
    visited = {start.indices}
    for iteration in range(1, max_iter + 1):
        costs = reduced_costs(lp, basis)
        entering = choose_entering(costs, entering_rule, order)
        if entering is None:
            x, value = _point_from_basis(lp, basis)
            return SolveOutcome(
                SolveStatus.OPTIMAL, x, value, trace,
                basis, perturbed_objective(lp, basis, base_basis),
            )
        row = _leaving_row(lp, basis, base_basis, entering, leaving_rule)
        if row is None:
            return SolveOutcome(
                SolveStatus.UNBOUNDED, None, None, trace,
                basis, perturbed_objective(lp, basis, base_basis),
            )
        trace.events.append(PivotEvent(
            iteration, basis.indices, entering, basis.indices[row],
            perturbed_objective(lp, basis, base_basis),
        ))
        basis = basis.replaced(row, entering)
        if basis.indices in visited:
            return SolveOutcome(
                SolveStatus.CYCLE_DETECTED, None, None, trace,
                basis, perturbed_objective(lp, basis, base_basis),
            )
        visited.add(basis.indices)
    return SolveOutcome(
        SolveStatus.ITERATION_LIMIT, None, None, trace,
        basis, perturbed_objective(lp, basis, base_basis),
    )


def phase1(lp: LpStandardForm, max_iter: int = 10_000) -> Optional[Basis]:
    """Find a feasible ordered basis, or None when the LP is infeasible.

    Rows with negative right-hand side are sign-flipped, existing unit
    columns are reused, and artificial variables cover the remaining rows.
    The auxiliary problem runs with the grossone leaving rule, so phase one
    itself cannot cycle.  Artificial columns still basic (at zero) after the
    auxiliary solve are pivoted out; if one cannot be, A has rank < m and
    RankDeficiencyError is raised.
    """
    m, n = lp.m, lp.n
    rows = [list(row) for row in lp.a]
    rhs = list(lp.b)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    unit_for_row: Dict[int, int] = {}
    used = set()
    for i in range(m):
        for j in range(n):
            if j in used:
                continue
            if rows[i][j] == 1 and all(rows[k][j] == 0 for k in range(m) if k != i):
                unit_for_row[i] = j
                used.add(j)
                break
    if len(unit_for_row) == m:
        return Basis(tuple(unit_for_row[i] for i in range(m)))

    artificial_rows = [i for i in range(m) if i not in unit_for_row]
    aux_rows = [
        row + [Fraction(1) if (i == k) else Fraction(0) for k in artificial_rows]
        for i, row in enumerate(rows)
    ]
    aux_c = [Fraction(0)] * n + [Fraction(1)] * len(artificial_rows)
    aux_lp = LpStandardForm(tuple(map(tuple, aux_rows)), tuple(rhs), tuple(aux_c))
    start_indices = []
    next_artificial = n
    for i in range(m):
        if i in unit_for_row:
            start_indices.append(unit_for_row[i])
        else:
            start_indices.append(next_artificial)
            next_artificial += 1
    outcome = _simplex_loop(
        aux_lp, Basis(tuple(start_indices)), "dantzig", "grossone", None, max_iter
    )
    if outcome.status is not SolveStatus.OPTIMAL:
        raise RuntimeError(f"auxiliary solve ended with status {outcome.status}")
    if outcome.value > 0:
        return None

    basis = outcome.final_basis
    while True:
        position = next((p for p, j in enumerate(basis) if j >= n), None)
        if position is None:
            break
        a_b = [[aux_lp.a[i][j] for j in basis] for i in range(m)]
        replacement = None
        for j in range(n):
            if j in basis:
                continue
            carried = solve_rational_columns(a_b, [aux_lp.column(j)])[0]
            if carried[position] != 0:
                replacement = j
                break
        if replacement is None:
            raise RankDeficiencyError(
                "constraint matrix has linearly dependent rows (rank < m)"
            )
        basis = basis.replaced(position, replacement)
    return Basis(basis.indices)


def solve(
    lp: LpStandardForm,
    entering: str = "dantzig",
    leaving: str = "grossone",
    order: Optional[Sequence[int]] = None,
    max_iter: int = 1000,
) -> SolveOutcome:
    """Two-phase simplex with the selected entering and leaving rules."""
    if entering not in ENTERING_RULES:
        raise ValueError(f"unknown entering rule {entering!r}")
    if leaving not in LEAVING_RULES:
        raise ValueError(f"unknown leaving rule {leaving!r}")
    if entering == "fixed_order":
        if order is None or sorted(order) != list(range(lp.n)):
            raise ValueError("fixed_order needs a permutation of all column indices")
    start = phase1(lp)
    if start is None:
        return SolveOutcome(SolveStatus.INFEASIBLE, None, None, PivotTrace())
    return _simplex_loop(lp, start, entering, leaving, order, max_iter)


def enumerate_vertices_oracle(
    lp: LpStandardForm,
) -> Optional[Tuple[Fraction, Tuple[Fraction, ...]]]:
    """Brute-force optimum over all basic feasible solutions.

    Tries every m-subset of columns, keeps the feasible basic solutions and
    minimizes <c, x>.  Valid for bounded feasible instances (unboundedness is
    not detected).  Returns (value, x), or None when no feasible basis exists.
    """
    best: Optional[Tuple[Fraction, Tuple[Fraction, ...]]] = None
    for columns in itertools.combinations(range(lp.n), lp.m):
        matrix = [[lp.a[i][j] for j in columns] for i in range(lp.m)]
        try:
            xb = solve_rational_vector(matrix, lp.b)
        except SingularMatrixError:
            continue
        if any(v < 0 for v in xb):
            continue
        x = [Fraction(0)] * lp.n
        for position, j in enumerate(columns):
            x[j] = xb[position]
        value = sum(cj * xj for cj, xj in zip(lp.c, x))
        if best is None or value < best[0]:
            best = (value, tuple(x))
    return best


# -- instance text format -----------------------------------------------------------

_RATIONAL_TOKEN = re.compile(r"^[+-]?\d+(/\d+)?$")


def _parse_rational_token(token: str, line_no: int) -> Fraction:
    if not _RATIONAL_TOKEN.match(token):
        raise LpFormatError(f"line {line_no}: bad rational {token!r} (use p/q or an integer)")
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise LpFormatError(f"line {line_no}: zero denominator in {token!r}") from None


def parse_lp(text: str) -> LpStandardForm:
    """Parse the line-oriented LP format.

    Line 1: "m n".  Line 2: "c:" and n rationals.  Then m lines "A:" with n
    rationals each, and one line "b:" with m rationals.  '#' starts a
    comment; blank lines are ignored.
    """
    lines = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((line_no, stripped))
    if not lines:
        raise LpFormatError("empty LP instance")

    def tagged_rationals(entry: Tuple[int, str], tag: str, count: int) -> List[Fraction]:
        line_no, content = entry
        if not content.startswith(tag):
            raise LpFormatError(f"line {line_no}: expected a {tag!r} line")
        tokens = content[len(tag):].split()
        if len(tokens) != count:
            raise LpFormatError(
                f"line {line_no}: expected {count} rationals after {tag!r}, got {len(tokens)}"
            )
        return [_parse_rational_token(t, line_no) for t in tokens]

    line_no, header = lines[0]
    parts = header.split()
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise LpFormatError(f"line {line_no}: expected header 'm n'")
    m, n = int(parts[0]), int(parts[1])
    if len(lines) != 2 + m + 1:
        raise LpFormatError(
            f"expected {2 + m + 1} content lines for m={m}, got {len(lines)}"
        )
    c = tagged_rationals(lines[1], "c:", n)
    a = [tagged_rationals(lines[2 + i], "A:", n) for i in range(m)]
    b = tagged_rationals(lines[2 + m], "b:", m)
    return LpStandardForm(tuple(map(tuple, a)), tuple(b), tuple(c))


# -- synthetic degenerate instances ---------------------------------------------------


def random_degenerate_lp(rng: random.Random, m: int, n: int) -> LpStandardForm:
    """Seeded bounded feasible instance with ratio-test ties built in.

    The first constraint row is all ones, so the feasible region is bounded.
    The right-hand side comes from a random basic solution whose entries
    include zeros, which makes the starting vertex degenerate and forces
    ties in the ratio test.
    """
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    while True:
        rows = [[Fraction(1)] * n]
        rows.extend(
            [Fraction(rng.randint(-3, 3)) for _ in range(n)] for _ in range(m - 1)
        )
        columns = rng.sample(range(n), m)
        matrix = [[rows[i][j] for j in columns] for i in range(m)]
        try:
            solve_rational_vector(matrix, [Fraction(0)] * m)
        except SingularMatrixError:
            continue
        values = [Fraction(rng.choice((0, 0, 1, 2, 3))) for _ in range(m)]
        if all(v == 0 for v in values) and m > 1:
            values[0] = Fraction(1)
        b = [sum(matrix[i][k] * values[k] for k in range(m)) for i in range(m)]
        c = [Fraction(rng.randint(-5, 5)) for _ in range(n)]
        return LpStandardForm(tuple(map(tuple, rows)), tuple(b), tuple(c))
