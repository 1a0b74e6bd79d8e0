"""Shared test helpers: seeded generators and independent oracles."""

from __future__ import annotations

import random
from fractions import Fraction
from pathlib import Path

from grossone.arith import GrossNumber
from grossone.polyexpr import (
    Add,
    Const,
    Mul,
    Neg,
    PolyExpr,
    Pow,
    Var,
    eval_rational,
)

INSTANCE_DIR = Path(__file__).resolve().parent.parent / "instances"
DATA_DIR = Path(__file__).resolve().parent / "data"


def random_fraction(rng: random.Random, bound: int = 100) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_gross(
    rng: random.Random,
    max_terms: int = 4,
    power_low: int = -5,
    power_high: int = 5,
    bound: int = 100,
    nonzero: bool = False,
) -> GrossNumber:
    while True:
        count = rng.randint(1 if nonzero else 0, max_terms)
        value = GrossNumber(
            (rng.randint(power_low, power_high), random_fraction(rng, bound))
            for _ in range(count)
        )
        if not (nonzero and value.is_zero()):
            return value


def random_expr(rng: random.Random, dimension: int, depth: int) -> PolyExpr:
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Const(Fraction(rng.randint(-4, 4), rng.randint(1, 4)))
        return Var(rng.randrange(dimension))
    choice = rng.randrange(4)
    if choice == 0:
        return Add(random_expr(rng, dimension, depth - 1), random_expr(rng, dimension, depth - 1))
    if choice == 1:
        return Mul(random_expr(rng, dimension, depth - 1), random_expr(rng, dimension, depth - 1))
    if choice == 2:
        return Neg(random_expr(rng, dimension, depth - 1))
    return Pow(random_expr(rng, dimension, depth - 1), rng.randint(0, 3))


def degree_bound(expr: PolyExpr) -> int:
    if isinstance(expr, Const):
        return 0
    if isinstance(expr, Var):
        return 1
    if isinstance(expr, Add):
        return max(degree_bound(expr.left), degree_bound(expr.right))
    if isinstance(expr, Mul):
        return degree_bound(expr.left) + degree_bound(expr.right)
    if isinstance(expr, Neg):
        return degree_bound(expr.operand)
    if isinstance(expr, Pow):
        return degree_bound(expr.base) * expr.exponent
    raise TypeError(f"not a PolyExpr node: {expr!r}")


def lagrange_at_zero(nodes, values) -> Fraction:
    total = Fraction(0)
    for k, (xk, yk) in enumerate(zip(nodes, values)):
        weight = Fraction(1)
        for j, xj in enumerate(nodes):
            if j != k:
                weight *= (-xj) / (xk - xj)
        total += yk * weight
    return total


def derivative_by_central_differences(expr: PolyExpr, point, index: int) -> Fraction:
    """Independent derivative oracle: exact extrapolation of central
    differences.  For a polynomial the central difference is a polynomial in
    the squared step, so Lagrange extrapolation to step zero is exact."""
    degree = max(degree_bound(expr), 1)
    steps = [Fraction(k) for k in range(1, degree // 2 + 2)]
    nodes = []
    values = []
    for h in steps:
        plus = list(point)
        minus = list(point)
        plus[index] += h
        minus[index] -= h
        values.append((eval_rational(expr, plus) - eval_rational(expr, minus)) / (2 * h))
        nodes.append(h * h)
    return lagrange_at_zero(nodes, values)
