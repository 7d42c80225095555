import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lacunary import dependence
from lacunary.sets import (
    explicit,
    from_json,
    geometric,
    naturals,
    pell_x,
    pell_y,
    primes,
    primes_in_ap,
    set_contains,
    set_enumerate,
    squarefree,
)

from oracles import sieve_primes, sieve_squarefree


def test_contains_examples():
    assert set_contains(primes_in_ap(4, 3), 7) is True
    assert set_contains(squarefree(), 12) is False
    assert 17 * 17 - 2 * 12 * 12 == 1
    assert set_contains(pell_x(2), 17) is True


def test_enumerate_examples():
    assert set_enumerate(squarefree(), 11) == sieve_squarefree(11) == [1, 2, 3, 5, 6, 7, 10, 11]
    expected_ap = [p for p in sieve_primes(25) if p % 4 == 3]
    assert set_enumerate(primes_in_ap(4, 3), 25) == expected_ap == [3, 7, 11, 19, 23]
    assert set_enumerate(geometric(3, 2), 50) == [3, 12, 48]


def test_primes_in_ap_1_1_is_all_primes():
    assert set_enumerate(primes_in_ap(1, 1), 200) == sieve_primes(200)
    assert set_enumerate(naturals(), 9) == list(range(1, 10))


def test_pell_members_solve_the_equation():
    for D in (2, 3, 5, 13):
        xs = set_enumerate(pell_x(D), 10**7)
        ys = set_enumerate(pell_y(D), 10**7)
        assert xs, f"no solutions found for D={D}"
        for x in xs:
            # the partner y is determined by x
            y_sq, rem = divmod(x * x - 1, D)
            assert rem == 0
            y = round(y_sq**0.5)
            assert y * y == y_sq
            assert set_contains(pell_y(D), y) or y > 10**7


def test_pell_y_scaling():
    # scaled copies of the y coordinates
    base = set_enumerate(pell_y(2, 1), 1000)
    scaled = set_enumerate(pell_y(2, 3), 3000)
    assert scaled == [3 * y for y in base]


_KINDS = [
    naturals(),
    primes(),
    primes_in_ap(4, 3),
    primes_in_ap(3, 1),
    squarefree(),
    explicit([2, 4, 6, 40]),
    explicit([]),
    geometric(3, 2),
    geometric(1, 3),
    pell_x(2),
    pell_y(2, 1),
    naturals(min_value=7),
    squarefree(min_value=5),
]


@pytest.mark.parametrize("s", _KINDS, ids=lambda s: s.describe())
def test_enumerate_agrees_with_contains(s):
    limit = 120
    members = set_enumerate(s, limit)
    assert members == sorted(set(members))
    member_set = set(members)
    for n in range(1, limit + 1):
        assert set_contains(s, n) == (n in member_set), (s, n)


@given(st.integers(min_value=1, max_value=5000))
@settings(max_examples=60)
def test_geometric_membership_is_exact(n):
    s = geometric(3, 2)
    in_set = any(3 * 4**m == n for m in range(8))
    assert set_contains(s, n) == in_set


def test_invalid_constructions():
    with pytest.raises(ValueError):
        primes_in_ap(4, 2)  # gcd 2
    with pytest.raises(ValueError):
        explicit([3, 3])
    with pytest.raises(ValueError):
        explicit([5, 2])
    with pytest.raises(ValueError):
        geometric(0, 2)
    with pytest.raises(dependence.SquareD):
        pell_x(4)
    with pytest.raises(dependence.SquareD):
        pell_y(9)


def test_json_round_trip():
    rng = random.Random(7)
    for s in _KINDS:
        again = from_json(s.to_json())
        assert again == s
        limit = rng.randrange(50, 200)
        assert set_enumerate(again, limit) == set_enumerate(s, limit)
    assert from_json({"kind": "primes_in_ap", "d": 4, "h": 3}) == primes_in_ap(4, 3)
    with pytest.raises(ValueError):
        from_json({"kind": "moonphase"})
    with pytest.raises(ValueError):
        from_json({"no": "kind"})
