"""Symbolic exponent sets with exact membership tests and bounded enumeration.

Infinite sets stay symbolic; they are only ever materialized up to an
explicit bound. Pell-derived kinds enumerate equation solutions on demand.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

from .arith import factor, int_nth_root, is_prime

KINDS = (
    "naturals",
    "primes",
    "primes_in_ap",
    "squarefree",
    "explicit",
    "geometric",
    "pell_x",
    "pell_y",
)


@dataclass(frozen=True)
class ExponentSet:
    """A subset of the positive integers used as a series index set.

    kind selects the family; the remaining fields are kind-specific
    parameters. ``min_value`` is an optional lower cutoff applied to
    membership and enumeration alike. Build instances through the factory
    functions below, which validate parameters.
    """

    kind: str
    d: int = 0
    h: int = 0
    members: tuple[int, ...] = ()
    u: int = 0
    j: int = 0
    D: int = 0
    scale: int = 1
    min_value: int = 1

    def contains(self, n: int) -> bool:
        if n < max(1, self.min_value):
            return False
        if self.kind == "naturals":
            return True
        if self.kind == "primes":
            return is_prime(n)
        if self.kind == "primes_in_ap":
            return n % self.d == self.h % self.d and is_prime(n)
        if self.kind == "squarefree":
            return factor(n).is_squarefree
        if self.kind == "explicit":
            idx = bisect_right(self.members, n)
            return idx > 0 and self.members[idx - 1] == n
        if self.kind == "geometric":
            if n % self.u:
                return False
            q = n // self.u
            return q & (q - 1) == 0 and (q.bit_length() - 1) % self.j == 0
        if self.kind == "pell_x":
            return any(x == n for x, _ in self._pell_pairs(n))
        if self.kind == "pell_y":
            return any(self.scale * y == n for _, y in self._pell_pairs(n))
        raise ValueError(f"unknown set kind {self.kind!r}")

    def members_up_to(self, limit: int) -> list[int]:
        if limit < 1:
            raise ValueError("limit must be >= 1")
        lo = max(1, self.min_value)
        if self.kind == "naturals":
            out = list(range(lo, limit + 1))
        elif self.kind == "primes":
            out = _prime_sieve(limit)
        elif self.kind == "primes_in_ap":
            out = [p for p in _prime_sieve(limit) if p % self.d == self.h % self.d]
        elif self.kind == "squarefree":
            out = _squarefree_sieve(limit)
        elif self.kind == "explicit":
            out = list(self.members[: bisect_right(self.members, limit)])
        elif self.kind == "geometric":
            out = []
            v = self.u
            step = 1 << self.j
            while v <= limit:
                out.append(v)
                v *= step
        elif self.kind == "pell_x":
            out = [x for x, _ in self._pell_pairs(limit) if x <= limit]
        elif self.kind == "pell_y":
            out = [self.scale * y for _, y in self._pell_pairs(limit) if self.scale * y <= limit]
        else:
            raise ValueError(f"unknown set kind {self.kind!r}")
        return [n for n in out if n >= lo]

    def _pell_pairs(self, limit: int) -> list[tuple[int, int]]:
        # Solutions grow geometrically, so this list is logarithmic in limit.
        from .dependence import pell_iter  # local import: dependence uses this module

        pairs = []
        for sol in pell_iter(self.D):
            if sol.x > limit and self.scale * sol.y > limit:
                break
            pairs.append((sol.x, sol.y))
        return pairs

    @property
    def is_finite(self) -> bool:
        return self.kind == "explicit"

    def describe(self) -> str:
        if self.kind == "primes_in_ap":
            return f"primes = {self.h} (mod {self.d})"
        if self.kind == "explicit":
            return "{" + ", ".join(map(str, self.members)) + "}"
        if self.kind == "geometric":
            return f"{{{self.u} * 2^({self.j}m)}}"
        if self.kind == "pell_x":
            return f"{{x : x^2 - {self.D} y^2 = 1}}"
        if self.kind == "pell_y":
            return f"{{{self.scale} y : x^2 - {self.D} y^2 = 1}}"
        return self.kind

    def to_json(self) -> dict:
        obj: dict = {"kind": self.kind}
        if self.kind == "primes_in_ap":
            obj.update(d=self.d, h=self.h)
        elif self.kind == "explicit":
            obj["members"] = list(self.members)
        elif self.kind == "geometric":
            obj.update(u=self.u, j=self.j)
        elif self.kind == "pell_x":
            obj["D"] = self.D
        elif self.kind == "pell_y":
            obj.update(D=self.D, scale=self.scale)
        if self.min_value > 1:
            obj["min"] = self.min_value
        return obj


def naturals(min_value: int = 1) -> ExponentSet:
    return ExponentSet("naturals", min_value=min_value)


def primes(min_value: int = 1) -> ExponentSet:
    return ExponentSet("primes", min_value=min_value)


def primes_in_ap(d: int, h: int, min_value: int = 1) -> ExponentSet:
    """Primes congruent to h modulo d; requires gcd(d, h) == 1."""
    if d < 1 or h < 1:
        raise ValueError("d and h must be positive")
    if math.gcd(d, h) != 1:
        raise ValueError(f"gcd({d}, {h}) != 1: the progression holds no primes beyond one")
    return ExponentSet("primes_in_ap", d=d, h=h, min_value=min_value)


def squarefree(min_value: int = 1) -> ExponentSet:
    return ExponentSet("squarefree", min_value=min_value)


def explicit(members, min_value: int = 1) -> ExponentSet:
    members = tuple(members)
    if any(m < 1 for m in members):
        raise ValueError("explicit members must be positive")
    if any(a >= b for a, b in zip(members, members[1:])):
        raise ValueError("explicit members must be strictly increasing")
    return ExponentSet("explicit", members=members, min_value=min_value)


def geometric(u: int, j: int, min_value: int = 1) -> ExponentSet:
    """The set {u * 2**(j*m) : m = 0, 1, 2, ...}."""
    if u < 1:
        raise ValueError("base point u must be positive")
    if j < 2:
        raise ValueError("ratio exponent j must be >= 2")
    return ExponentSet("geometric", u=u, j=j, min_value=min_value)


def _require_nonsquare(D: int) -> None:
    from .dependence import SquareD

    if D < 1:
        raise ValueError("D must be positive")
    if int_nth_root(D, 2)[1]:
        raise SquareD(f"{D} is a perfect square")


def pell_x(D: int, min_value: int = 1) -> ExponentSet:
    """First coordinates x of the positive solutions of x^2 - D y^2 = 1."""
    _require_nonsquare(D)
    return ExponentSet("pell_x", D=D, min_value=min_value)


def pell_y(D: int, scale: int = 1, min_value: int = 1) -> ExponentSet:
    """Scaled second coordinates scale*y of the solutions of x^2 - D y^2 = 1."""
    _require_nonsquare(D)
    if scale < 1:
        raise ValueError("scale must be positive")
    return ExponentSet("pell_y", D=D, scale=scale, min_value=min_value)


def set_contains(s: ExponentSet, n: int) -> bool:
    """Exact membership verdict for n in s."""
    return s.contains(n)


def set_enumerate(s: ExponentSet, limit: int) -> list[int]:
    """All members of s up to limit, strictly increasing."""
    return s.members_up_to(limit)


def from_json(obj: dict) -> ExponentSet:
    """Parse the structured-text form, e.g. {"kind": "primes_in_ap", "d": 4, "h": 3}."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError("set spec must be an object with a 'kind' field")
    kind = obj["kind"]
    mv = obj.get("min", 1)
    if kind == "naturals":
        return naturals(mv)
    if kind == "primes":
        return primes(mv)
    if kind == "primes_in_ap":
        return primes_in_ap(obj["d"], obj["h"], mv)
    if kind == "squarefree":
        return squarefree(mv)
    if kind == "explicit":
        return explicit(obj["members"], mv)
    if kind == "geometric":
        return geometric(obj["u"], obj["j"], mv)
    if kind == "pell_x":
        return pell_x(obj["D"], mv)
    if kind == "pell_y":
        return pell_y(obj["D"], obj.get("scale", 1), mv)
    raise ValueError(f"unknown set kind {kind!r}")


def _prime_sieve(limit: int) -> list[int]:
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, limit + 1, p)))
    return [i for i, f in enumerate(flags) if f]


def _squarefree_sieve(limit: int) -> list[int]:
    flags = bytearray([1]) * (limit + 1)
    for p in range(2, math.isqrt(limit) + 1):
        sq = p * p
        flags[sq::sq] = bytearray(len(range(sq, limit + 1, sq)))
    return [i for i in range(1, limit + 1) if flags[i]]
