"""High-precision evaluation of gap-power series sum a(n) / b**(i*n**j).

Values are exact base-b fixed-point numbers carrying a proven truncation
bound, so digit-pattern assertions are meaningful. The coefficient-sequence
view (one integer per base-b position) and its zero-run scans live here too.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arith import int_nth_root, is_exponent_image
from .sets import ExponentSet, set_enumerate

# Guard digits appended beyond the requested precision; keeps carry
# uncertainty away from the digits a caller asked for at desk scale.
GUARD_DIGITS = 16

_DIGIT_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"


class CoeffFn:
    """Bounded nonzero integer coefficients attached to set members.

    Three shapes cover everything the toolkit needs: a constant, the
    alternating sign (-1)**n, and an explicit table.
    """

    def __init__(self, kind: str, value: int = 1, table: dict[int, int] | None = None,
                 bound: int | None = None):
        if kind not in ("const", "alternating", "table"):
            raise ValueError(f"unknown coefficient kind {kind!r}")
        self.kind = kind
        self.value = value
        self.table = dict(table) if table else {}
        if kind == "const":
            if value == 0:
                raise ValueError("constant coefficient must be nonzero")
            self.bound = abs(value)
        elif kind == "alternating":
            self.bound = 1
        else:
            if not self.table:
                raise ValueError("coefficient table must be nonempty")
            if any(v == 0 for v in self.table.values()):
                raise ValueError("coefficient table values must be nonzero")
            worst = max(abs(v) for v in self.table.values())
            self.bound = worst if bound is None else bound
            if self.bound < worst:
                raise ValueError("declared bound is below a table entry")

    @classmethod
    def constant(cls, c: int = 1) -> "CoeffFn":
        return cls("const", value=c)

    @classmethod
    def alternating(cls) -> "CoeffFn":
        return cls("alternating")

    @classmethod
    def from_table(cls, table: dict[int, int], bound: int | None = None) -> "CoeffFn":
        return cls("table", table=table, bound=bound)

    def __call__(self, n: int) -> int:
        if self.kind == "const":
            return self.value
        if self.kind == "alternating":
            return -1 if n % 2 else 1
        try:
            return self.table[n]
        except KeyError:
            raise ValueError(f"coefficient table has no entry for member {n}") from None

    def to_json(self) -> dict:
        if self.kind == "const":
            return {"kind": "const", "value": self.value}
        if self.kind == "alternating":
            return {"kind": "alternating"}
        return {"kind": "table", "values": {str(k): v for k, v in self.table.items()},
                "bound": self.bound}

    @classmethod
    def from_json(cls, obj: dict) -> "CoeffFn":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError("coeff spec must be an object with a 'kind' field")
        kind = obj["kind"]
        if kind == "const":
            return cls.constant(obj.get("value", 1))
        if kind == "alternating":
            return cls.alternating()
        if kind == "table":
            table = {int(k): int(v) for k, v in obj["values"].items()}
            return cls.from_table(table, obj.get("bound"))
        raise ValueError(f"unknown coefficient kind {kind!r}")


@dataclass(frozen=True)
class SeriesSpec:
    """One series sum over n in `set` of coeff(n) / b**(i * n**j)."""

    i: int
    j: int
    set: ExponentSet
    coeff: CoeffFn

    def __post_init__(self) -> None:
        if self.i < 1:
            raise ValueError("i must be positive")
        if self.j < 2:
            raise ValueError("j must be >= 2 (smaller j gives a rational function)")

    def exponent(self, n: int) -> int:
        return self.i * n**self.j

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "set": self.set.to_json(),
                "coeff": self.coeff.to_json()}


@dataclass(frozen=True)
class FixedPointValue:
    """Base-b fixed point number mantissa / b**scale with a rigorous error bound.

    ``error_bound`` bounds |true - represented| and is carried through every
    arithmetic step; exact values carry bound zero.
    """

    base: int
    mantissa: int
    scale: int
    error_bound: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if self.scale < 1:
            raise ValueError("scale must be >= 1")
        if not isinstance(self.error_bound, Fraction):
            object.__setattr__(self, "error_bound", Fraction(self.error_bound))
        if self.error_bound < 0:
            raise ValueError("error bound must be nonnegative")

    @classmethod
    def from_int(cls, value: int, base: int, scale: int) -> "FixedPointValue":
        return cls(base, value * base**scale, scale)

    @classmethod
    def zero(cls, base: int, scale: int = 1) -> "FixedPointValue":
        return cls(base, 0, scale)

    @property
    def is_exact(self) -> bool:
        return self.error_bound == 0

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, self.base**self.scale)

    def scaled_mantissa(self, target_scale: int) -> int:
        """Mantissa at a coarser-grained scale >= self.scale; exact."""
        if target_scale < self.scale:
            raise ValueError("cannot reduce scale without rounding")
        return self.mantissa * self.base ** (target_scale - self.scale)

    def shift(self, k: int) -> "FixedPointValue":
        """The value times base**k, represented exactly (k < scale)."""
        if k >= self.scale:
            raise ValueError("shift would consume the whole fractional scale")
        return FixedPointValue(self.base, self.mantissa, self.scale - k,
                               self.error_bound * self.base**k)

    def to_decimal(self, places: int = 30) -> str:
        """Decimal rendering, truncated toward zero."""
        denom = self.base**self.scale
        sign = "-" if self.mantissa < 0 else ""
        m = abs(self.mantissa)
        int_part, rem = divmod(m, denom)
        frac = rem * 10**places // denom
        return f"{sign}{int_part}.{frac:0{places}d}"


@dataclass(frozen=True)
class DigitRendering:
    """Base-b fractional digits, most significant first.

    ``uncertain`` lists the 1-based positions whose digit could change if the
    true value sits anywhere inside the error interval (carry boundaries).
    """

    digits: str
    uncertain: tuple[int, ...]


@dataclass(frozen=True)
class LinearFormSpec:
    """constant + sum of weight * series, all over the same base."""

    base: int
    constant: int
    terms: tuple[tuple[int, SeriesSpec], ...]

    def __post_init__(self) -> None:
        if self.base < 2:
            raise ValueError("base must be >= 2")

    @property
    def coeff_ceiling(self) -> int:
        """Largest declared coefficient bound across the terms."""
        return max((spec.coeff.bound for _, spec in self.terms), default=0)

    @property
    def weight_mass(self) -> int:
        return sum(abs(w) for w, _ in self.terms)


def form(base: int, constant: int = 0, terms=()) -> LinearFormSpec:
    return LinearFormSpec(base, constant, tuple((int(w), s) for w, s in terms))


def eval_series(spec: SeriesSpec, b: int, digits: int) -> FixedPointValue:
    """Evaluate the series at 1/b to `digits` fractional base-b digits.

    Every member with exponent i*n**j <= digits + GUARD_DIGITS contributes
    exactly; the error bound covers all omitted terms. An explicit set whose
    members were all included yields an exact value.
    """
    if b < 2:
        raise ValueError("base must be >= 2")
    if digits < 1:
        raise ValueError("digits must be >= 1")
    scale = digits + GUARD_DIGITS
    n_cap = int_nth_root(scale // spec.i, spec.j)[0] if spec.i <= scale else 0
    members = set_enumerate(spec.set, n_cap) if n_cap >= 1 else []

    mantissa = 0
    for n in members:
        mantissa += spec.coeff(n) * b ** (scale - spec.exponent(n))

    if spec.set.is_finite:
        all_members = (spec.set.members_up_to(spec.set.members[-1])
                       if spec.set.members else [])
        error = Fraction(0) if len(members) == len(all_members) else _tail(spec.coeff.bound, b, scale)
    else:
        error = _tail(spec.coeff.bound, b, scale)
    return FixedPointValue(b, mantissa, scale, error)


def _tail(bound: int, b: int, scale: int) -> Fraction:
    # All omitted exponents exceed `scale` and are distinct:
    # sum over m > scale of bound * b**-m.
    return Fraction(bound, (b - 1) * b**scale)


def eval_linear_form(form: LinearFormSpec, digits: int) -> FixedPointValue:
    """constant + weighted series values, with error bounds accumulated."""
    scale = digits + GUARD_DIGITS
    mantissa = form.constant * form.base**scale
    error = Fraction(0)
    for w, spec in form.terms:
        v = eval_series(spec, form.base, digits)
        mantissa += w * v.mantissa
        error += abs(w) * v.error_bound
    return FixedPointValue(form.base, mantissa, scale, error)


def coefficient_at(form: LinearFormSpec, n: int) -> int:
    """The exact integer sitting at base-b position n in the combined series.

    For each term this is weight * a(k) when n == i * k**j for a member k,
    zero otherwise; membership runs through root extraction, never
    enumeration, so n may be astronomically large.
    """
    total = 0
    for w, spec in form.terms:
        k = is_exponent_image(n, spec.i, spec.j, spec.set)
        if k is not None:
            total += w * spec.coeff(k)
    return total


def gap_scan(form: LinearFormSpec, range_start: int, range_end: int) -> list[tuple[int, int]]:
    """Maximal runs (start, length) of zero coefficients inside the range."""
    if not 1 <= range_start <= range_end:
        raise ValueError("need 1 <= range_start <= range_end")
    runs: list[tuple[int, int]] = []
    run_start = None
    for n in range(range_start, range_end + 1):
        if coefficient_at(form, n) == 0:
            if run_start is None:
                run_start = n
        elif run_start is not None:
            runs.append((run_start, n - run_start))
            run_start = None
    if run_start is not None:
        runs.append((run_start, range_end - run_start + 1))
    return runs


def exclusion_window_check(form: LinearFormSpec, center: int, radius: int) -> bool:
    """True iff every position center +- u, u = 1..radius-1, carries a zero.

    radius == 1 is the empty window and holds vacuously.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if center <= radius:
        raise ValueError("center must exceed the window radius")
    for u in range(1, radius):
        if coefficient_at(form, center - u) or coefficient_at(form, center + u):
            return False
    return True


def tail_bound(form: LinearFormSpec, position: int, window: int) -> Fraction:
    """Remainder bound m * (b**-window + 2 * b**-(2*window)) for the form.

    Here m is the largest declared coefficient bound times the total weight
    mass; it dominates both the single coefficient at the split position and
    the whole tail beyond it. `position` marks where the form is split and
    does not enter the bound itself.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    c2 = form.coeff_ceiling * form.weight_mass
    b = form.base
    return Fraction(c2, b**window) + Fraction(2 * c2, b ** (2 * window))


def fraction_sci(fr: Fraction, sig: int = 3) -> str:
    """Compact scientific-notation rendering of an exact fraction."""
    if fr == 0:
        return "0"
    sign = "-" if fr < 0 else ""
    f = -fr if fr < 0 else fr
    num, den = f.numerator, f.denominator
    e = len(str(num)) - len(str(den))
    while True:
        shift = sig - 1 - e
        if shift >= 0:
            scaled = num * 10**shift // den
        else:
            scaled = num // (den * 10**-shift)
        if scaled >= 10**sig:
            e += 1
        elif scaled < 10 ** (sig - 1):
            e -= 1
        else:
            break
    digits = str(scaled)
    return f"{sign}{digits[0]}.{digits[1:]}e{e:+d}"


def render_digits(v: FixedPointValue, count: int) -> DigitRendering:
    """First `count` fractional base-b digits of |v|, most significant first.

    A digit is flagged uncertain when a perturbation within the error bound
    could change it, i.e. the digit prefix differs between value - error and
    value + error (carry propagation included).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if count > v.scale:
        raise ValueError("count exceeds the stored scale")
    if v.base > len(_DIGIT_CHARS):
        raise ValueError(f"digit rendering supports bases up to {len(_DIGIT_CHARS)}")

    b = v.base
    step = b ** (v.scale - count)
    m = abs(v.mantissa)
    prefix = m // step

    digits = []
    p = prefix
    for _ in range(count):
        p, d = divmod(p, b)
        digits.append(_DIGIT_CHARS[d])
    digit_str = "".join(reversed(digits))

    if v.error_bound == 0:
        return DigitRendering(digit_str, ())

    slack = v.error_bound * b**v.scale
    spread = slack.numerator // slack.denominator + 1  # integer cover of the error
    lo = (m - spread) // step
    hi = (m + spread) // step
    if lo < 0:
        return DigitRendering(digit_str, tuple(range(1, count + 1)))

    uncertain = []
    for pos in range(1, count + 1):
        shift = b ** (count - pos)
        if lo // shift != hi // shift:
            uncertain = list(range(pos, count + 1))
            break
    return DigitRendering(digit_str, tuple(uncertain))
