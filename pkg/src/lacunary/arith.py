"""Exact integer utilities: primality, factorization, integer roots, CRT.

Everything here is pure and deterministic; all other modules build on it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

# Below this bound the Miller-Rabin base set is a proven deterministic test.
PRIMALITY_EXACT_BOUND = 2**64

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_EXTRA_MR_ROUNDS = 64  # error < 4**-64 = 2**-128 above the exact bound
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)
_TRIAL_LIMIT = 10**4

DEFAULT_FACTOR_BUDGET = 2_000_000


class BudgetExceeded(Exception):
    """The factoring step budget ran out before a full factorization."""


class InconsistentSystem(Exception):
    """Two congruences disagree on a shared factor of their moduli."""


def is_prime(n: int) -> bool:
    """Primality test, exact below 2**64 and probabilistic beyond.

    Above ``PRIMALITY_EXACT_BOUND`` the result is "probable prime" with
    error probability below 2**-128; callers that surface results should
    report :func:`primality_certainty` alongside.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False

    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1

    def is_composite(a: int) -> bool:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            return False
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                return False
        return True

    for a in _MR_BASES:
        if is_composite(a):
            return False
    if n >= PRIMALITY_EXACT_BOUND:
        # Derandomized extra rounds: bases drawn from an n-seeded stream.
        rng = random.Random(n)
        for _ in range(_EXTRA_MR_ROUNDS):
            if is_composite(rng.randrange(2, n - 1)):
                return False
    return True


def primality_certainty(n: int) -> str:
    """"exact" when the primality verdict for n is deterministic, else "probable"."""
    return "exact" if n < PRIMALITY_EXACT_BOUND else "probable"


@dataclass(frozen=True)
class Factorization:
    """Complete prime factorization: value == prod(p**e for p, e in factors)."""

    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValueError("factorization target must be >= 1")
        prod = 1
        prev = 1
        for p, e in self.factors:
            if p <= prev:
                raise ValueError("factor primes must be strictly increasing")
            if e < 1:
                raise ValueError("factor exponents must be positive")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            prod *= p**e
            prev = p
        if prod != self.value:
            raise ValueError("factors do not multiply back to the value")

    def exponent_of(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)


def _sieve_trial_primes() -> tuple[int, ...]:
    limit = _TRIAL_LIMIT
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(flags[p * p :: p]))
    return tuple(i for i, f in enumerate(flags) if f)


_TRIAL_PRIMES: tuple[int, ...] | None = None


def _brent_rho(n: int, steps_left: list[int]) -> int:
    """Find a nontrivial factor of composite odd n, charging the step budget."""
    if n % 2 == 0:
        return 2
    for c in range(1, 50):
        y, m = 2, 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                steps_left[0] -= min(m, r - k)
                if steps_left[0] < 0:
                    raise BudgetExceeded(f"factoring budget exhausted on {n}")
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
                steps_left[0] -= 1
                if steps_left[0] < 0:
                    raise BudgetExceeded(f"factoring budget exhausted on {n}")
        if g != n:
            return g
    raise BudgetExceeded(f"rho cycle search failed on {n}")


def factor(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> Factorization:
    """Complete prime factorization of n >= 1 within a step budget.

    Trial division by cached small primes first, then Brent's rho for the
    surviving cofactors; raises BudgetExceeded if the budget runs out.
    """
    if n < 1:
        raise ValueError("factor requires n >= 1")
    global _TRIAL_PRIMES
    if _TRIAL_PRIMES is None:
        _TRIAL_PRIMES = _sieve_trial_primes()

    value = n
    found: dict[int, int] = {}
    steps = [budget]
    for p in _TRIAL_PRIMES:
        if p * p > n:
            break
        steps[0] -= 1
        if steps[0] < 0:
            raise BudgetExceeded(f"factoring budget exhausted on {value}")
        while n % p == 0:
            found[p] = found.get(p, 0) + 1
            n //= p

    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            found[m] = found.get(m, 0) + 1
            continue
        root, exact = int_nth_root(m, 2)
        if exact:
            stack.extend((root, root))
            continue
        d = _brent_rho(m, steps)
        stack.extend((d, m // d))

    return Factorization(value, tuple(sorted(found.items())))


def int_nth_root(n: int, k: int) -> tuple[int, bool]:
    """(floor(n**(1/k)), whether the root is exact), for n >= 0, k >= 1."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if k < 1:
        raise ValueError("k must be >= 1")
    if k == 1 or n < 2:
        return n, True
    if k == 2:
        r = math.isqrt(n)
        return r, r * r == n
    if n.bit_length() <= k:
        return 1, n == 1
    # Newton iteration on integers, then a safety correction.
    r = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        nr = ((k - 1) * r + n // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r, r**k == n


def is_exponent_image(n: int, i: int, j: int, s) -> int | None:
    """The unique k with n == i * k**j and k in s, or None.

    ``s`` is any object with a ``contains(k)`` method (an ExponentSet).
    Uniqueness holds because j >= 2 and k >= 1; no enumeration happens, so n
    may be very large.
    """
    if n < 1 or i < 1:
        raise ValueError("n and i must be positive")
    if j < 2:
        raise ValueError("j must be >= 2")
    if n % i:
        return None
    k, exact = int_nth_root(n // i, j)
    if exact and k >= 1 and s.contains(k):
        return k
    return None


def crt_solve(congruences: list[tuple[int, int]]) -> tuple[int, int]:
    """Solve x = r_i (mod m_i) simultaneously; moduli need not be coprime.

    Returns (x, alpha) with 0 <= x < alpha and alpha = lcm of the moduli;
    every integer solution is x + alpha*Z. Raises InconsistentSystem when two
    congruences conflict on a shared factor.
    """
    if not congruences:
        raise ValueError("need at least one congruence")
    x, m = 0, 1
    for r, mod in congruences:
        if mod < 1:
            raise ValueError("moduli must be >= 1")
        g = math.gcd(m, mod)
        if (r - x) % g:
            raise InconsistentSystem(
                f"x = {x} (mod {m}) conflicts with x = {r} (mod {mod})"
            )
        lcm = m // g * mod
        if mod > g:
            t = ((r - x) // g * pow(m // g, -1, mod // g)) % (mod // g)
            x += m * t
        x %= lcm
        m = lcm
    return x, m
