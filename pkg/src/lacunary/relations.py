"""Empirical integer-relation detection over fixed-point constants.

The classic lattice: an identity block augmented with the values scaled to
b**precision and rounded. Reduction is exact-rational LLL, so runs are fully
deterministic; a "no relation" outcome is reported as an exclusion bound,
never as an independence claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

from .series import FixedPointValue

LOVASZ_DELTA = Fraction(99, 100)


class PrecisionTooLow(Exception):
    """Input error bounds are too large for the requested search precision."""


def _round_frac(fr: Fraction) -> int:
    # floor(fr + 1/2); exact, sign-safe
    return (2 * fr.numerator + fr.denominator) // (2 * fr.denominator)


def _dot(a, b) -> int:
    return sum(x * y for x, y in zip(a, b))


def lll_reduce(rows, delta: Fraction = LOVASZ_DELTA) -> list[list[int]]:
    """LLL reduction of an integer basis, all arithmetic exact.

    Gram-Schmidt data is kept as rationals and patched incrementally through
    size reductions and swaps; rows must be linearly independent.
    """
    if not Fraction(1, 4) < delta < 1:
        raise ValueError("delta must lie in (1/4, 1)")
    basis = [[int(x) for x in row] for row in rows]
    n = len(basis)
    if n <= 1:
        return basis

    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n

    def refresh_row(k: int) -> None:
        for j in range(k):
            s = Fraction(_dot(basis[k], basis[j]))
            for l in range(j):
                s -= mu[j][l] * mu[k][l] * B[l]
            mu[k][j] = s / B[j]
        bk = Fraction(_dot(basis[k], basis[k]))
        for l in range(k):
            bk -= mu[k][l] ** 2 * B[l]
        if bk <= 0:
            raise ValueError("basis rows are linearly dependent")
        B[k] = bk

    for k in range(n):
        refresh_row(k)

    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = _round_frac(mu[k][j])
            if q:
                basis[k] = [a - q * c for a, c in zip(basis[k], basis[j])]
                for l in range(j):
                    mu[k][l] -= q * mu[j][l]
                mu[k][j] -= q
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            basis[k - 1], basis[k] = basis[k], basis[k - 1]
            m = mu[k][k - 1]
            combined = B[k] + m * m * B[k - 1]
            mu[k][k - 1] = m * B[k - 1] / combined
            B[k] = B[k - 1] * B[k] / combined
            B[k - 1] = combined
            for l in range(k - 1):
                mu[k - 1][l], mu[k][l] = mu[k][l], mu[k - 1][l]
            for i in range(k + 1, n):
                t = mu[i][k]
                mu[i][k] = mu[i][k - 1] - m * t
                mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
            k = max(k - 1, 1)
    return basis


@dataclass(frozen=True)
class RelationQuery:
    """A relation search problem over fixed-point values sharing one base."""

    values: tuple[FixedPointValue, ...]
    coeff_bound: int
    precision: int

    def __post_init__(self) -> None:
        if len(self.values) < 2:
            raise ValueError("need at least two values")
        bases = {v.base for v in self.values}
        if len(bases) != 1:
            raise ValueError("values must share one base")
        if self.coeff_bound < 1:
            raise ValueError("coefficient bound must be positive")
        if not 1 <= self.precision <= min(v.scale for v in self.values):
            raise ValueError("precision must be within every value's stored scale")

    @property
    def base(self) -> int:
        return self.values[0].base


@dataclass(frozen=True)
class IntegerRelation:
    """A nonzero integer vector c with sum(c_i * value_i) below noise level."""

    coefficients: tuple[int, ...]
    residual: Fraction

    def __post_init__(self) -> None:
        if not any(self.coefficients):
            raise ValueError("relation coefficients cannot all be zero")


@dataclass(frozen=True)
class RelationCheck:
    residual: Fraction
    allowed: Fraction
    passed: bool


def verify_relation(values, coefficients) -> RelationCheck:
    """Exact residual of sum(c_i * v_i) against the accumulated error bounds."""
    values = tuple(values)
    coefficients = tuple(int(c) for c in coefficients)
    if len(values) != len(coefficients):
        raise ValueError("values and coefficients must have equal length")
    if not any(coefficients):
        raise ValueError("all-zero coefficient vector is not a relation")
    if len({v.base for v in values}) != 1:
        raise ValueError("values must share one base")
    b = values[0].base
    scale = max(v.scale for v in values)
    acc = sum(c * v.scaled_mantissa(scale) for c, v in zip(coefficients, values))
    residual = abs(Fraction(acc, b**scale))
    allowed = sum((abs(c) * v.error_bound for c, v in zip(coefficients, values)),
                  Fraction(0))
    return RelationCheck(residual, allowed, residual <= allowed)


@dataclass(frozen=True)
class RelationSearchReport:
    """Outcome of one search: either a relation or an exclusion statement.

    When no relation is returned, ``residual_floor`` is a proven lower bound
    (from the reduction guarantee) on |sum c_i v_i| over all nonzero integer
    vectors with max |c_i| <= coeff_bound, relative to the represented values.
    """

    relation: IntegerRelation | None
    coeff_bound: int
    precision: int
    residual_floor: Fraction


def find_relation(query: RelationQuery) -> IntegerRelation | None:
    """Shortest verified relation within the coefficient bound, if any."""
    return search_relations(query).relation


def search_relations(query: RelationQuery) -> RelationSearchReport:
    """Run the lattice search and collect either a relation or exclusion data.

    A candidate is accepted when its exactly-evaluated residual stays below
    the accumulated truncation error plus b**-(precision/2).
    """
    b = query.base
    n = len(query.values)
    if query.precision < 50:
        raise ValueError("relation searches need precision >= 50")
    noise_sq = Fraction(1, b**query.precision)
    for v in query.values:
        if v.error_bound**2 > noise_sq:
            raise PrecisionTooLow(
                "input error bound exceeds b**-(precision/2); evaluate deeper"
            )

    scale_factor = b**query.precision
    rows = []
    for idx, v in enumerate(query.values):
        scaled = _round_frac(Fraction(v.mantissa, b ** (v.scale - query.precision)))
        rows.append([1 if t == idx else 0 for t in range(n)] + [scaled])
    reduced = lll_reduce(rows)

    extra = (Fraction(1, b ** (query.precision // 2)) if query.precision % 2 == 0
             else Fraction(1, isqrt(b**query.precision)))
    ranked = sorted(reduced, key=lambda r: (_dot(r, r), r))

    best: IntegerRelation | None = None
    for row in ranked:
        coeffs = tuple(row[:n])
        if not any(coeffs) or max(abs(c) for c in coeffs) > query.coeff_bound:
            continue
        check = verify_relation(query.values, coeffs)
        if check.residual <= check.allowed + extra:
            best = IntegerRelation(coeffs, check.residual)
            break

    floor = _exclusion_floor(reduced, n, query.coeff_bound, scale_factor)
    return RelationSearchReport(best, query.coeff_bound, query.precision, floor)


def _exclusion_floor(reduced, n: int, bound: int, scale_factor: int) -> Fraction:
    """Lower bound on any bounded relation's residual, from the LLL guarantee.

    The shortest reduced vector is within alpha**((n-1)/2) of the lattice
    minimum (alpha = 1/(delta - 1/4)); a coefficient vector c with
    max|c| <= bound and residual r maps to a lattice vector of norm at most
    sqrt(n*bound**2 + (r*scale + n*bound/2)**2), which cannot undercut it.
    """
    min_norm_sq = min(_dot(r, r) for r in reduced)
    inv_alpha = LOVASZ_DELTA - Fraction(1, 4)
    lam_sq = min_norm_sq * inv_alpha ** (n - 1)
    slack = lam_sq - n * bound * bound
    if slack <= 0:
        return Fraction(0)
    root_lb = isqrt(slack.numerator // slack.denominator)
    floor = (Fraction(root_lb) - Fraction(n * bound, 2)) / scale_factor
    return max(floor, Fraction(0))
