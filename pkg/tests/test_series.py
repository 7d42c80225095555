import math
import random
from fractions import Fraction

import pytest

from lacunary.series import (
    CoeffFn,
    FixedPointValue,
    GUARD_DIGITS,
    SeriesSpec,
    coefficient_at,
    eval_linear_form,
    eval_series,
    exclusion_window_check,
    form,
    fraction_sci,
    gap_scan,
    render_digits,
    tail_bound,
)
from lacunary.sets import explicit, geometric, naturals, primes, primes_in_ap, squarefree

from oracles import series_partial_sum, sieve_primes


def alpha_spec(i=1, j=2):
    return SeriesSpec(i, j, naturals(), CoeffFn.constant(1))


def test_eval_series_matches_fraction_oracle_exactly():
    v = eval_series(alpha_spec(), 2, 40)
    cutoff = 40 + GUARD_DIGITS
    members = [n for n in range(1, cutoff + 1) if n * n <= cutoff]
    assert members == [1, 2, 3, 4, 5, 6, 7]
    oracle = series_partial_sum(2, 1, 2, members)
    assert v.to_fraction() == oracle
    # frozen from the oracle: first decimal digits of the truncation
    assert v.to_decimal(10) == "0.5644684136"
    assert v.error_bound == Fraction(1, 2**cutoff)  # 1/((b-1) b**scale)


def test_eval_series_empty_explicit_set_is_exact_zero():
    v = eval_series(SeriesSpec(1, 2, explicit([]), CoeffFn.constant(1)), 2, 20)
    assert v.mantissa == 0 and v.error_bound == 0 and v.is_exact


def test_eval_series_prime_exponents():
    v = eval_series(SeriesSpec(1, 2, primes(), CoeffFn.constant(1)), 2, 40)
    cutoff = 40 + GUARD_DIGITS
    ps = [p for p in sieve_primes(10) if p * p <= cutoff]
    assert ps == [2, 3, 5, 7]  # first exponents 4, 9, 25, 49
    assert v.to_fraction() == series_partial_sum(2, 1, 2, ps)


def test_eval_series_alternating_signs():
    v = eval_series(SeriesSpec(1, 2, naturals(), CoeffFn.alternating()), 2, 30)
    members = [n for n in range(1, 7) if n * n <= 46]
    oracle = series_partial_sum(2, 1, 2, members, coeff=lambda n: (-1) ** n)
    assert v.to_fraction() == oracle
    assert v.mantissa < 0


def test_explicit_set_fully_included_is_exact():
    v = eval_series(SeriesSpec(1, 2, explicit([2, 4]), CoeffFn.constant(1)), 3, 20)
    assert v.is_exact
    assert v.to_fraction() == Fraction(1, 3**4) + Fraction(1, 3**16)
    # a member beyond the cutoff keeps an honest bound
    w = eval_series(SeriesSpec(1, 2, explicit([2, 400]), CoeffFn.constant(1)), 3, 20)
    assert not w.is_exact


def test_coefficient_table_and_validation():
    spec = SeriesSpec(1, 2, explicit([2, 3]), CoeffFn.from_table({2: 5, 3: -4}))
    v = eval_series(spec, 2, 20)
    assert v.to_fraction() == Fraction(5, 2**4) + Fraction(-4, 2**9)
    with pytest.raises(ValueError):
        CoeffFn.constant(0)
    with pytest.raises(ValueError):
        CoeffFn.from_table({2: 0})
    with pytest.raises(ValueError):
        CoeffFn.from_table({2: 9}, bound=3)
    bad = SeriesSpec(1, 2, explicit([2, 3]), CoeffFn.from_table({2: 5}))
    with pytest.raises(ValueError):
        eval_series(bad, 2, 20)


def test_series_spec_validation():
    with pytest.raises(ValueError):
        SeriesSpec(0, 2, naturals(), CoeffFn.constant(1))
    with pytest.raises(ValueError):
        SeriesSpec(1, 1, naturals(), CoeffFn.constant(1))


def test_coefficient_at_examples():
    f = form(2, 0, [(1, alpha_spec())])
    assert coefficient_at(f, 9) == 1
    assert coefficient_at(f, 10) == 0
    mixed = form(2, 0, [(2, alpha_spec()), (3, SeriesSpec(2, 2, naturals(), CoeffFn.constant(1)))])
    assert 8 == 2 * 2**2 and math.isqrt(8) ** 2 != 8
    assert coefficient_at(mixed, 8) == 3


def test_coefficient_nonzero_only_at_exponent_images():
    f = form(2, 0, [(1, SeriesSpec(2, 3, squarefree(), CoeffFn.alternating()))])
    for n in range(1, 300):
        expect = 0
        k = round((n / 2) ** (1 / 3))
        for cand in (k - 1, k, k + 1):
            if cand >= 1 and 2 * cand**3 == n and squarefree().contains(cand):
                expect = (-1) ** cand
        assert coefficient_at(f, n) == expect


def test_gap_scan_runs_against_zero_run_oracle():
    f = form(2, 0, [(1, alpha_spec())])
    nonzero = {n * n for n in range(1, 5)}
    runs, start = [], None
    for n in range(1, 17):
        if n not in nonzero:
            start = n if start is None else start
        elif start is not None:
            runs.append((start, n - start))
            start = None
    if start is not None:
        runs.append((start, 16 - start + 1))
    assert runs == [(2, 2), (5, 4), (10, 6)]  # frozen from this oracle
    assert gap_scan(f, 1, 16) == runs


def test_gap_scan_prime_squares():
    f = form(2, 0, [(1, SeriesSpec(1, 2, primes(), CoeffFn.constant(1)))])
    # only 4 = 2**2 is a prime square within [1, 8]
    assert gap_scan(f, 1, 8) == [(1, 3), (5, 4)]


def test_gap_scan_whole_range_zero():
    f = form(2, 0, [(0, alpha_spec())])
    assert gap_scan(f, 5, 9) == [(5, 5)]
    assert gap_scan(form(2, 0, []), 1, 4) == [(1, 4)]


def test_exclusion_window_examples():
    f = form(2, 0, [(1, alpha_spec())])
    for n in (51527, 51528, 51530, 51531):
        assert math.isqrt(n) ** 2 != n
    assert exclusion_window_check(f, 51529, 3) is True
    assert exclusion_window_check(f, 10, 2) is False  # 9 = 3**2 is adjacent
    assert exclusion_window_check(f, 10, 1) is True   # empty window
    assert exclusion_window_check(form(2, 0, []), 100, 1) is True


def test_gap_scan_agrees_with_window_check():
    f = form(2, 0, [(1, alpha_spec()), (1, SeriesSpec(3, 2, naturals(), CoeffFn.constant(1)))])
    runs = gap_scan(f, 2, 120)
    zero_positions = set()
    for s, length in runs:
        zero_positions.update(range(s, s + length))
    for center in range(10, 100, 7):
        for radius in (1, 2, 3, 5):
            expected = all(
                center + off in zero_positions and center - off in zero_positions
                for off in range(1, radius)
            )
            assert exclusion_window_check(f, center, radius) == expected


def test_eval_linear_form_cancellation_and_constants():
    f = form(2, 0, [(1, alpha_spec()), (-1, alpha_spec())])
    v = eval_linear_form(f, 50)
    assert v.mantissa == 0
    assert v.error_bound <= 2 * Fraction(1, 2 ** (50 + GUARD_DIGITS))
    g = form(2, 1, [(0, alpha_spec())])
    w = eval_linear_form(g, 30)
    assert w.to_fraction() == 1 and w.is_exact


def test_tail_bound_examples():
    f1 = form(2, 0, [(1, alpha_spec())])
    assert tail_bound(f1, 100, 10) == Fraction(1, 2**10) + Fraction(2, 2**20)
    f0 = form(2, 0, [(0, alpha_spec())])
    assert tail_bound(f0, 100, 4) == 0
    spec_c2 = SeriesSpec(1, 2, naturals(), CoeffFn.constant(2))
    f2 = form(3, 0, [(3, spec_c2), (-1, spec_c2)])
    assert tail_bound(f2, 55, 5) == Fraction(8, 3**5) + Fraction(16, 3**10)


def test_render_digits_examples():
    v = eval_series(alpha_spec(), 2, 40)
    r = render_digits(v, 10)
    assert r.digits == "1001000010"
    assert r.uncertain == ()
    g = eval_series(SeriesSpec(1, 2, primes(), CoeffFn.constant(1)), 2, 40)
    assert render_digits(g, 10).digits == "0001000010"
    z = FixedPointValue.zero(2, 12)
    assert render_digits(z, 12).digits == "0" * 12
    with pytest.raises(ValueError):
        render_digits(z, 13)


def test_render_digits_uncertainty_flags():
    # 0.0111111111 with slack crossing one trailing digit
    m = (2**9 - 1) << 10
    v = FixedPointValue(2, m, 20, Fraction(1, 2**19))
    r = render_digits(v, 10)
    assert r.digits == "0111111111"
    assert r.uncertain == (10,)
    # carry across the whole prefix
    m2 = (2**10 - 1) << 10
    v2 = FixedPointValue(2, m2, 20, Fraction(1, 2**10))
    r2 = render_digits(v2, 10)
    assert r2.uncertain == tuple(range(1, 11))


def test_render_digits_matches_manual_expansion():
    rng = random.Random(3)
    for _ in range(40):
        base = rng.choice([2, 3, 10, 16])
        scale = rng.randrange(5, 40)
        v = FixedPointValue(base, rng.randrange(0, base**scale), scale)
        count = rng.randrange(1, scale + 1)
        rendered = render_digits(v, count).digits
        frac = v.to_fraction()
        manual = []
        for _ in range(count):
            frac *= base
            digit = int(frac)
            manual.append("0123456789abcdef"[digit])
            frac -= digit
        assert rendered == "".join(manual)


def test_trivial_identity_small():
    # sum over even n of b**-(n*n) == sum over all n of b**-(4*n*n)
    digits = 80
    cutoff = digits + GUARD_DIGITS
    evens = explicit(list(range(2, math.isqrt(cutoff) + 1, 2)))
    left = eval_series(SeriesSpec(1, 2, evens, CoeffFn.constant(1)), 2, digits)
    right = eval_series(SeriesSpec(4, 2, naturals(), CoeffFn.constant(1)), 2, digits)
    assert left.mantissa == right.mantissa and left.scale == right.scale


def _random_spec(rng):
    i = rng.randrange(1, 5)
    j = rng.randrange(2, 5)
    index_set = rng.choice([
        naturals(), primes(), squarefree(), primes_in_ap(4, 3), primes_in_ap(3, 2),
        geometric(rng.randrange(1, 4), j),
    ])
    coeff = rng.choice([CoeffFn.constant(rng.choice([1, 2, -3])), CoeffFn.alternating()])
    return SeriesSpec(i, j, index_set, coeff)


def test_monotone_refinement():
    rng = random.Random(99)
    for _ in range(6):
        spec = _random_spec(rng)
        vals = {d: eval_series(spec, 2, d) for d in (50, 100, 200)}
        for d1 in (50, 100, 200):
            for d2 in (50, 100, 200):
                gap = abs(vals[d1].to_fraction() - vals[d2].to_fraction())
                assert gap <= vals[d1].error_bound + vals[d2].error_bound


def test_truncation_soundness():
    rng = random.Random(5)
    for _ in range(5):
        spec = _random_spec(rng)
        shallow = eval_series(spec, 3, 60)
        deep = eval_series(spec, 3, 400)  # many further terms included
        assert abs(shallow.to_fraction() - deep.to_fraction()) <= shallow.error_bound


def test_fixed_point_helpers():
    v = FixedPointValue(2, 3 << 10, 12, Fraction(1, 2**12))
    assert v.to_fraction() == Fraction(3, 4)
    assert v.scaled_mantissa(14) == 3 << 12
    with pytest.raises(ValueError):
        v.scaled_mantissa(10)
    s = v.shift(2)
    assert s.to_fraction() == 3
    assert s.error_bound == Fraction(4, 2**12)
    assert FixedPointValue.from_int(5, 10, 4).to_decimal(2) == "5.00"
    assert fraction_sci(Fraction(0)) == "0"
    assert fraction_sci(Fraction(1, 2**10)) == "9.76e-4"
    assert fraction_sci(Fraction(-513, 524288)) == "-9.78e-4"
    assert fraction_sci(Fraction(12345, 1)) == "1.23e+4"
